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
#include <string>
#include <vector>

namespace stipt {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidateOptions {
  bool full = false;  // adds BCD runs and the grid oracles
  std::uint64_t seed = 7;
  // Test hook: name of an analytic derivative to corrupt before it is
  // compared (one of fault_names()).
  std::string fault;
};

std::vector<std::string> fault_names();

std::vector<CheckResult> run_validation(const ValidateOptions& options);
bool all_passed(const std::vector<CheckResult>& results);
std::string format_checks(const std::vector<CheckResult>& results);

}  // namespace stipt
