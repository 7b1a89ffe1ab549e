#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "dwrnet/network/checkpoint.hpp"
#include "dwrnet/runner/runner.hpp"

namespace dwrnet::run {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_failure(const fs::path& dir, const std::string& what, int code) {
  try {
    fs::create_directories(dir);
    write_text(dir / "failure.json", json{{"error", what}, {"exit_code", code}}.dump(2) + "\n");
  } catch (const std::exception&) {
    // the caller still reports the failure on stderr
  }
}

const char* kComponentNames[] = {"u", "v", "p"};

// Runs one experiment cell and writes its outputs into dir. Returns the exit code.
int run_cell(const dwr::Experiment& exp, const fs::path& dir, std::optional<int> level, std::ostream& log) {
  fs::create_directories(dir);
  const auto result = dwr::run_algorithm1(exp, level);
  const pde::Problem problem = pde::make_problem(exp.problem, exp.params);
  json reports = json::array();
  json timing = json::array();
  int code = 0;
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& rep = result.reports[i];
    const auto& art = result.artifacts[i];
    reports.push_back(rep.to_json());
    timing.push_back({{"level", rep.level}, {"seconds", rep.seconds}});
    const fs::path ldir = dir / ("level_" + std::to_string(rep.level));
    fs::create_directories(ldir);
    if (art.primal) {
      art.primal_trace.write_csv(ldir / "trace_primal.csv");
      nn::save_checkpoint(art.primal->net, ldir / "primal.json");
      const auto u = art.primal->field();
      for (int c = 0; c < problem.n_fields(); ++c) {
        const std::string file = problem.n_fields() == 1 ? "pointcloud.csv" : std::string("pointcloud_") + kComponentNames[c] + ".csv";
        export_pointcloud(*u, c, problem.domain, exp.test_grid, ldir / file, problem.exact.get());
      }
    }
    if (art.adjoint) {
      art.adjoint_trace.write_csv(ldir / "trace_adjoint.csv");
      nn::save_checkpoint(art.adjoint->net, ldir / "adjoint.json");
    }
    log << exp.name << " level " << rep.level << ": n=" << rep.n_int + rep.n_bnd << " loss=" << rep.loss_primal
        << " eta=" << rep.eta;
    if (rep.i_eff) log << " i_eff=" << *rep.i_eff;
    if (!rep.error.empty()) log << " error: " << rep.error;
    log << '\n';
    if (!rep.error.empty() && code == 0) code = rep.error_code;
  }
  write_text(dir / "report.json", json{{"experiment", exp.name}, {"levels", reports}}.dump(2) + "\n");
  write_text(dir / "timing.json", timing.dump(2) + "\n");
  write_text(dir / "sweep.csv", dwr::sweep_csv(result.reports));
  if (!result.reports.empty()) {
    const fs::path last = dir / ("level_" + std::to_string(result.reports.back().level));
    for (const char* f : {"trace_primal.csv", "pointcloud.csv", "pointcloud_u.csv"}) {
      if (fs::exists(last / f)) {
        const std::string target = std::string(f) == "trace_primal.csv" ? "trace.csv" : "pointcloud.csv";
        fs::copy_file(last / f, dir / target, fs::copy_options::overwrite_existing);
      }
    }
  }
  if (code != 0) write_failure(dir, result.reports.back().error, code);
  return code;
}

}  // namespace

int run(const ExperimentConfig& base, const Overrides& ov) {
  ExperimentConfig cfg = base;
  if (ov.seed) cfg.exp.seed = *ov.seed;
  if (ov.output_dir) cfg.output_dir = *ov.output_dir;
  const fs::path out = cfg.output_dir;
  try {
    const std::size_t cells = sweep_size(cfg);
    for (std::size_t k = 0; k < cells; ++k) sweep_cell(cfg, k).validate();
    if (ov.level && (*ov.level < 0 || *ov.level >= static_cast<int>(cfg.exp.schedule.size())))
      throw ConfigError("--level " + std::to_string(*ov.level) + " is outside the schedule");
    if (ov.dry_run) {
      std::cout << "config ok: " << cfg.exp.name << ", problem " << cfg.exp.problem << ", " << cells << " cell(s), "
                << cfg.exp.schedule.size() << " level(s)\n";
      return 0;
    }
    fs::create_directories(out);
    write_text(out / "config.json", serialize_config(cfg).dump(2) + "\n");
    if (cells == 1) return run_cell(cfg.exp, out, ov.level, std::cout);

    const int jobs = std::max(1, std::min<int>(ov.jobs.value_or(1), static_cast<int>(cells)));
    if (jobs > 1) kernels::set_num_threads(1);
    std::vector<int> codes(cells, 0);
    std::vector<std::string> errors(cells);
    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    auto worker = [&] {
      for (std::size_t k = next++; k < cells; k = next++) {
        const auto exp = sweep_cell(cfg, k);
        std::ostringstream log;
        try {
          codes[k] = run_cell(exp, out / exp.name, ov.level, log);
        } catch (const Error& e) {
          codes[k] = e.exit_code();
          errors[k] = e.what();
        }
        std::lock_guard<std::mutex> lock(log_mu);
        std::cout << log.str();
        if (!errors[k].empty()) std::cerr << exp.name << ": " << errors[k] << '\n';
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    json summary = json::array();
    int code = 0;
    for (std::size_t k = 0; k < cells; ++k) {
      summary.push_back({{"cell", sweep_cell(cfg, k).name}, {"exit_code", codes[k]}});
      if (codes[k] != 0 && code == 0) code = codes[k];
    }
    write_text(out / "cells.json", summary.dump(2) + "\n");
    return code;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    if (!ov.dry_run) write_failure(out, e.what(), e.exit_code());
    return e.exit_code();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    write_failure(out, e.what(), e.exit_code());
    return e.exit_code();
  }
}

}  // namespace dwrnet::run
