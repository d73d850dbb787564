#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbf/protocol.hpp"

namespace dbf::cli {

struct GeneratorSection {
  std::string dataset = "ads1";
  std::size_t length = 3000;
  double sigma = 0.05;
};

struct ModelSection {
  std::size_t lag = 3;
  std::string kernel = "linear";
  std::optional<double> radius;
  std::size_t s = 20;
  std::size_t window = 0;
  int max_iters = 500;
  double tol = 1e-8;
  double lambda1 = 1e-3;
  double lambda2 = 1.0;
  std::vector<int> order{1, 0, 0};  // ARIMA (p, d, q)
};

struct ProtocolSection {
  std::vector<std::string> algorithms{"tdbf", "edbf", "arima"};
  std::size_t first = 750;
  std::size_t step = 25;
  std::size_t holdout = 25;
  std::size_t horizon = 25;
  bool recursive = true;
  // Per-algorithm grid overrides.
  std::map<std::string, std::vector<HyperParams>> grids;
};

/// Everything a command reads. Precedence when assembled by the CLI:
/// explicit flags, then the --config file, then these defaults.
struct RunConfig {
  std::string input;
  std::string output;
  std::string plots_dir;
  std::string algorithm = "dbf-alt";
  std::size_t horizon = 1;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  GeneratorSection generator;
  ModelSection model;
  ProtocolSection protocol;
};

nlohmann::json to_json(const RunConfig& config);

/// Missing keys keep their current values; unknown keys are rejected.
void merge_json(RunConfig& config, const nlohmann::json& j);

RunConfig config_from_json(const nlohmann::json& j);

}  // namespace dbf::cli
