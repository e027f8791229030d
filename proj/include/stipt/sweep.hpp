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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "stipt/bcd.hpp"
#include "stipt/scenario.hpp"

namespace stipt {

enum class SweepParameter { kRisElements, kIuCount, kEuCount, kEuPower, kRisPower };

const char* to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(std::string_view name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kRisElements;
  std::vector<double> values;  // element/user counts, or watts for the power axes
  int seeds_per_point = 20;
  std::vector<Mode> modes{Mode::kPropBCD, Mode::kFixedLoc, Mode::kBeamOpt};
  std::uint64_t base_seed = 1;  // realization j uses base_seed + j
};

/// Throws ConfigError with the offending field.
void validate(const SweepSpec& spec);
SweepSpec parse_sweep_spec(std::string_view json_text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Base scenario with the swept parameter set to `value` and users and the
/// initial RIS coordinate redrawn from `seed`. Layout options come from the
/// base scenario, or the desk layout when it has none.
Scenario sweep_point(const Scenario& base, SweepParameter parameter, double value, std::uint64_t seed);

struct SweepRun {
  double value = 0.0;
  Mode mode = Mode::kPropBCD;
  std::uint64_t seed = 0;
  bool ok = false;
  double sum_rate = 0.0;
  std::string error;
};

struct SweepCell {
  double value = 0.0;
  Mode mode = Mode::kPropBCD;
  double mean = 0.0;
  double std_error = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::kRisElements;
  std::vector<SweepRun> runs;    // ordered by (value, mode, seed)
  std::vector<SweepCell> cells;  // ordered by (value, mode)
};

/// Mean and standard error over the successful runs of each (value, mode).
std::vector<SweepCell> aggregate(const std::vector<SweepRun>& runs);

/// Runs every (value, seed, mode) on `workers` threads. Each task owns its
/// scenario and solver state; results are placed by key, so the output does
/// not depend on scheduling.
SweepResult run_sweep(const Scenario& base, const SweepSpec& spec, int workers, const BcdOptions& options = {},
                      const std::function<void(const SweepRun&)>& on_done = {});

/// parameter,value,mode,mean_sum_rate,std_error,n_ok,n_failed
std::string sweep_csv(const SweepResult& result);
/// parameter,value,mode,seed,ok,sum_rate,error
std::string sweep_runs_csv(const SweepResult& result);

}  // namespace stipt
