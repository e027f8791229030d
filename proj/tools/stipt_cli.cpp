// SPDX-License-Identifier: Apache-2.0
//
// stipt - RIS-aided terahertz information and power transfer simulator
// Copyright (C) 2026 The stipt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// stipt: run, sweep and validate from the command line.
//
//   stipt run --config F --mode M --seed S --out F [--timings] [--channels F]
//   stipt sweep --config F --spec F --out-dir D --workers W
//   stipt validate --level {fast,full}
//
// Exit codes: 0 ok, 1 internal failure, 2 config error.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "stipt/bcd.hpp"
#include "stipt/report_io.hpp"
#include "stipt/scenario.hpp"
#include "stipt/sweep.hpp"
#include "stipt/thz_channel.hpp"
#include "stipt/validate.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kConfig = 2;

stipt::Scenario base_scenario(const std::string& config, const std::string& preset) {
  if (!config.empty()) return stipt::load_scenario(config);
  if (preset == "full") return stipt::full_scale_scenario();
  return stipt::desk_scenario(1);
}

// Redraws the layout from `seed` when the scenario carries one.
stipt::Scenario reseed(const stipt::Scenario& s, std::uint64_t seed) {
  if (s.layout) return stipt::realize_layout(s, *s.layout, seed);
  stipt::Scenario out = s;
  out.rng_seed = seed;
  return out;
}

int workers_from(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("STIPT_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    spdlog::warn("ignoring STIPT_WORKERS={}", env);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

fs::path trace_path_for(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".trace.csv");
  return p;
}

struct RunArgs {
  std::string config;
  std::string preset = "desk";
  std::string mode = "PropBCD";
  std::optional<std::uint64_t> seed;
  std::string out = "report.json";
  std::string channels;
  bool timings = false;
};

int cmd_run(const RunArgs& a) {
  stipt::Scenario s = base_scenario(a.config, a.preset);
  if (a.seed) s = reseed(s, *a.seed);
  stipt::validate(s);
  const stipt::Mode mode = stipt::parse_mode(a.mode);
  const stipt::BcdOptions options;
  const stipt::SolveReport rep = stipt::run(s, mode, options);

  const fs::path out(a.out);
  stipt::write_text(out, stipt::report_json(rep, s, options, a.timings));
  stipt::write_text(trace_path_for(out), stipt::trace_csv(rep));
  if (!a.channels.empty())
    stipt::write_text(a.channels, stipt::channel_csv(stipt::build_channels(s, rep.final.L, rep.final.phi)));

  const auto& last = rep.trace.back();
  std::cout << stipt::to_string(mode) << ": sum rate " << last.sum_rate << " bit/s/Hz after " << last.iteration
            << " iterations, " << (last.feasible() ? "feasible" : "INFEASIBLE") << '\n';
  return kOk;
}

struct SweepArgs {
  std::string config;
  std::string preset = "desk";
  std::string spec;
  std::string out_dir = "sweep_out";
  int workers = 0;
  int seeds = 0;
};

int cmd_sweep(const SweepArgs& a) {
  const stipt::Scenario base = base_scenario(a.config, a.preset);
  stipt::validate(base);
  stipt::SweepSpec spec = stipt::load_sweep_spec(a.spec);
  if (a.seeds > 0) spec.seeds_per_point = a.seeds;
  stipt::validate(spec);

  const int workers = workers_from(a.workers);
  const std::size_t total = spec.values.size() * spec.modes.size() * spec.seeds_per_point;
  std::size_t done = 0;
  spdlog::info("sweeping {} over {} runs on {} workers", stipt::to_string(spec.parameter), total, workers);
  const auto result = stipt::run_sweep(base, spec, workers, {}, [&](const stipt::SweepRun& r) {
    ++done;
    if (r.ok)
      spdlog::info("[{}/{}] {}={} {} seed {}: {:.4f}", done, total, stipt::to_string(spec.parameter), r.value,
                   stipt::to_string(r.mode), r.seed, r.sum_rate);
    else
      spdlog::warn("[{}/{}] {}={} {} seed {} failed: {}", done, total, stipt::to_string(spec.parameter), r.value,
                   stipt::to_string(r.mode), r.seed, r.error);
  });

  const fs::path dir(a.out_dir);
  const std::string stem = std::string("sweep_") + stipt::to_string(spec.parameter);
  stipt::write_text(dir / (stem + ".csv"), stipt::sweep_csv(result));
  stipt::write_text(dir / (stem + "_runs.csv"), stipt::sweep_runs_csv(result));
  std::cout << stipt::sweep_csv(result);
  return kOk;
}

int cmd_validate(const std::string& level, const std::string& fault, std::uint64_t seed) {
  stipt::ValidateOptions opt;
  opt.full = level == "full";
  opt.fault = fault;
  opt.seed = seed;
  const auto results = stipt::run_validation(opt);
  std::cout << stipt::format_checks(results);
  return stipt::all_passed(results) ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided THz information and power transfer simulator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Solve one scenario and write its report");
  run->add_option("--config", ra.config, "Scenario JSON (default: desk-scale scenario)")->check(CLI::ExistingFile);
  run->add_option("--preset", ra.preset, "Scenario used without --config")
      ->check(CLI::IsMember({"desk", "full"}));
  run->add_option("--mode", ra.mode, "PropBCD, FixedLoc or BeamOpt")
      ->check(CLI::IsMember({"PropBCD", "FixedLoc", "BeamOpt"}));
  run->add_option("--seed", ra.seed, "Layout seed");
  run->add_option("--out", ra.out, "Report JSON; the trace CSV is written next to it");
  run->add_option("--channels", ra.channels, "Also dump the final channels as CSV");
  run->add_flag("--timings", ra.timings, "Include wall-clock stage timings in the report");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Seeded parameter sweep");
  sweep->add_option("--config", sa.config, "Base scenario JSON")->check(CLI::ExistingFile);
  sweep->add_option("--preset", sa.preset, "Base scenario used without --config")
      ->check(CLI::IsMember({"desk", "full"}));
  sweep->add_option("--spec", sa.spec, "Sweep JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out-dir", sa.out_dir, "Output directory");
  sweep->add_option("--workers", sa.workers, "Worker threads (default: STIPT_WORKERS, then core count)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seeds", sa.seeds, "Override seeds_per_point")->check(CLI::PositiveNumber);

  std::string level = "fast";
  std::string fault;
  std::uint64_t vseed = 7;
  auto* val = app.add_subcommand("validate", "Gradient, minorant and oracle checks");
  val->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  val->add_option("--seed", vseed, "Draw seed");
  val->add_option("--inject-fault", fault, "Corrupt one analytic derivative")
      ->check(CLI::IsMember(stipt::fault_names()))
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors count as configuration errors; --help exits 0.
    return app.exit(e) == 0 ? kOk : kConfig;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("stipt"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*run) return cmd_run(ra);
    if (*sweep) return cmd_sweep(sa);
    return cmd_validate(level, fault, vseed);
  } catch (const stipt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const stipt::InitializationError& e) {
    std::cerr << "initialization failed: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
