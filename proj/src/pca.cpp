#include "di/pca.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "di/errors.hpp"
#include "di/rng.hpp"

namespace di {

namespace {

// Largest eigenpair of symmetric g (n x n) by power iteration with a
// seeded start vector; deterministic for fixed inputs.
double top_eigenpair(const std::vector<double>& g, int64_t n, std::vector<double>& v) {
  CounterRng rng(11, "pca-start");
  v.resize(static_cast<size_t>(n));
  for (auto& x : v) x = rng.next_normal();
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;

  std::vector<double> w(static_cast<size_t>(n));
  double lambda = 0;
  for (int iter = 0; iter < 500; ++iter) {
    for (int64_t i = 0; i < n; ++i) {
      double acc = 0;
      const double* row = g.data() + i * n;
      for (int64_t j = 0; j < n; ++j) acc += row[j] * v[static_cast<size_t>(j)];
      w[static_cast<size_t>(i)] = acc;
    }
    double wnorm = 0;
    for (double x : w) wnorm += x * x;
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0) {  // v lies in the null space: eigenvalue 0
      lambda = 0;
      break;
    }
    double diff = 0;
    for (int64_t i = 0; i < n; ++i) {
      double next = w[static_cast<size_t>(i)] / wnorm;
      diff = std::max(diff, std::abs(next - v[static_cast<size_t>(i)]));
      v[static_cast<size_t>(i)] = next;
    }
    lambda = wnorm;
    if (diff < 1e-13) break;
  }
  // Rayleigh quotient on the final vector
  double quad = 0;
  for (int64_t i = 0; i < n; ++i) {
    double acc = 0;
    const double* row = g.data() + i * n;
    for (int64_t j = 0; j < n; ++j) acc += row[j] * v[static_cast<size_t>(j)];
    quad += acc * v[static_cast<size_t>(i)];
  }
  return std::max(quad, 0.0);
}

// Sign convention: the coordinate of largest magnitude (first on ties)
// is positive, so embeddings are reproducible across runs.
void fix_sign(std::vector<double>& v) {
  size_t best = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] < 0)
    for (auto& x : v) x = -x;
}

}  // namespace

PcaResult pca2(const std::vector<float>& data, int64_t n, int64_t dim) {
  if (n < 3) throw ConfigError("PCA needs at least 3 samples, got " + std::to_string(n));
  if (dim < 1) throw ConfigError("PCA sample dimension must be positive");
  if (static_cast<int64_t>(data.size()) != n * dim)
    throw ShapeError("PCA data length does not match n*dim");

  std::vector<double> mean(static_cast<size_t>(dim), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    const float* row = data.data() + i * dim;
    for (int64_t j = 0; j < dim; ++j) mean[static_cast<size_t>(j)] += row[j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);

  std::vector<double> centered(static_cast<size_t>(n * dim));
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < dim; ++j)
      centered[static_cast<size_t>(i * dim + j)] =
          static_cast<double>(data[static_cast<size_t>(i * dim + j)]) - mean[static_cast<size_t>(j)];

  // Gram matrix G = X X^T; its eigenpairs give the PCA scores directly:
  // score_k = sqrt(lambda_k) * u_k.
  std::vector<double> g(static_cast<size_t>(n * n), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = i; j < n; ++j) {
      const double* a = centered.data() + i * dim;
      const double* b = centered.data() + j * dim;
      double acc = 0;
      for (int64_t k = 0; k < dim; ++k) acc += a[k] * b[k];
      g[static_cast<size_t>(i * n + j)] = acc;
      g[static_cast<size_t>(j * n + i)] = acc;
    }
  }

  double trace = 0;
  for (int64_t i = 0; i < n; ++i) trace += g[static_cast<size_t>(i * n + i)];
  if (trace <= 1e-12) throw ConfigError("PCA input is degenerate: all samples identical");

  PcaResult out;
  std::vector<double> u1, u2;
  double l1 = top_eigenpair(g, n, u1);

  // Deflate and repeat for the second component
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j)
      g[static_cast<size_t>(i * n + j)] -= l1 * u1[static_cast<size_t>(i)] * u1[static_cast<size_t>(j)];
  double l2 = top_eigenpair(g, n, u2);
  if (l2 < l1 * 1e-12) l2 = 0;  // collinear data: suppress numeric dust

  fix_sign(u1);
  fix_sign(u2);
  out.pc1.resize(static_cast<size_t>(n));
  out.pc2.resize(static_cast<size_t>(n));
  const double s1 = std::sqrt(l1), s2 = std::sqrt(l2);
  for (int64_t i = 0; i < n; ++i) {
    out.pc1[static_cast<size_t>(i)] = s1 * u1[static_cast<size_t>(i)];
    out.pc2[static_cast<size_t>(i)] = s2 * u2[static_cast<size_t>(i)];
  }
  out.var1 = l1 / static_cast<double>(n);
  out.var2 = l2 / static_cast<double>(n);
  return out;
}

PcaResult pca2(const Dataset& dataset) {
  return pca2(dataset.samples, dataset.count(), dataset.sample_size());
}

double domain_centroid_mean_distance(const PcaResult& pca,
                                     const std::vector<uint16_t>& domains) {
  if (domains.size() != pca.pc1.size())
    throw ShapeError("domain label count does not match embedding size");
  std::map<uint16_t, std::array<double, 3>> acc;  // domain -> {sum1, sum2, count}
  for (size_t i = 0; i < domains.size(); ++i) {
    auto& a = acc[domains[i]];
    a[0] += pca.pc1[i];
    a[1] += pca.pc2[i];
    a[2] += 1;
  }
  if (acc.size() < 2) throw ConfigError("centroid distance needs at least 2 domains");
  std::vector<std::array<double, 2>> centroids;
  for (auto& [d, a] : acc) centroids.push_back({a[0] / a[2], a[1] / a[2]});
  double total = 0;
  int64_t pairs = 0;
  for (size_t i = 0; i < centroids.size(); ++i)
    for (size_t j = i + 1; j < centroids.size(); ++j) {
      total += std::hypot(centroids[i][0] - centroids[j][0], centroids[i][1] - centroids[j][1]);
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

}  // namespace di
