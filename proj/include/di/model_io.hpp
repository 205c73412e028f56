#pragma once

#include <string>
#include <variant>

#include "di/ahnet.hpp"
#include "di/recognizers.hpp"

namespace di {

using ModelAny = std::variant<CnnModel, KnnModel, SvmModel>;

// Models travel in the DIMDL container with an "arch" block carrying
// kind, class count, sample shape and the model-specific settings.
void save_model(const std::string& path, const CnnModel& model);
void save_model(const std::string& path, const KnnModel& model);
void save_model(const std::string& path, const SvmModel& model);
void save_model(const std::string& path, const ModelAny& model);

ModelAny load_model(const std::string& path);

const char* model_kind_name(const ModelAny& model);

}  // namespace di
