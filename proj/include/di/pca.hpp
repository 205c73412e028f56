#pragma once

#include <cstdint>
#include <vector>

#include "di/dataset.hpp"

namespace di {

// Two-component PCA scores for n flattened samples. Variances are the
// eigenvalues of the centered covariance (sample mean removed, divisor n).
struct PcaResult {
  std::vector<double> pc1, pc2;
  double var1 = 0.0, var2 = 0.0;
};

// Mean-centered PCA via the n x n Gram matrix (dim is typically >> n).
// Requires n >= 3; all-identical samples raise ConfigError.
PcaResult pca2(const std::vector<float>& data, int64_t n, int64_t dim);
PcaResult pca2(const Dataset& dataset);

// Mean pairwise Euclidean distance between per-domain centroids in the
// 2D embedding; the separability proxy used to compare pre/post DGE.
double domain_centroid_mean_distance(const PcaResult& pca,
                                     const std::vector<uint16_t>& domains);

}  // namespace di
