#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "ssam/model.hpp"
#include "ssam/preprocess.hpp"

namespace ssam {

inline constexpr int kBundleFormatVersion = 1;

/// Training-run provenance kept with the weights.
struct TrainSummary {
  std::size_t epochs = 50;
  std::size_t batch_size = 10;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t shuffle_seed = 42;
  bool shuffle = true;
};

/// Data-pipeline provenance needed to rebuild the same split later.
struct DataSummary {
  std::string feature = "Adj Close";
  double split_ratio = 0.9;
  bool fit_scaler_on_all = false;
};

/// Everything a trained model needs to predict and denormalize: config,
/// weights, scaler, and the run summaries.
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  ModelParams params;
  TrainSummary train;
  DataSummary data;
  ScalerParams scaler;
};

/// Writes the bundle as a self-describing text document: a header block of
/// key-values, then one section per tensor with name, shape, and values at
/// 17 significant digits (doubles round-trip exactly). Validates shapes
/// before emitting any bytes.
void save(const ModelBundle& bundle, std::ostream& sink);
ModelBundle load(std::istream& source);

/// Conventional file extension: .ssam
void save_file(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_file(const std::filesystem::path& path);

}  // namespace ssam
