#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dwrnet/dwr/dwr.hpp"

namespace dwrnet::run {

/// Optional (p, delta) grid; every cell is an independent experiment.
struct Sweep {
  std::vector<double> p;
  std::vector<double> delta;
  bool empty() const { return p.empty() && delta.empty(); }
};

struct ExperimentConfig {
  dwr::Experiment exp;
  Sweep sweep;
  std::string output_dir = "out";
};

/// Parses and validates; ConfigError lists every violation.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json serialize_config(const ExperimentConfig& cfg);

nlohmann::json functional_to_json(const goals::GoalFunctional& J);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> level;
  std::optional<std::string> output_dir;
  bool dry_run = false;
};

/// Runs the estimation loop for the config (every sweep cell), writes outputs and
/// returns the exit code: 0 on success, the failing error's code otherwise.
int run(const ExperimentConfig& cfg, const Overrides& overrides);

/// x,y,value[,exact,abs_err] over an n x n grid of the bounding box, keeping
/// points strictly inside the domain.
void export_pointcloud(const pde::Field& field, int component, const geo::Domain& domain, int n,
                       const std::filesystem::path& path, const pde::Field* exact = nullptr);
std::string pointcloud_csv(const pde::Field& field, int component, const geo::Domain& domain, int n,
                           const pde::Field* exact = nullptr);

/// Experiment of one sweep cell (seed offset by the cell index).
dwr::Experiment sweep_cell(const ExperimentConfig& cfg, std::size_t index);
std::size_t sweep_size(const ExperimentConfig& cfg);

}  // namespace dwrnet::run
