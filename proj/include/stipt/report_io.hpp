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

#include <filesystem>
#include <string>

#include "stipt/bcd.hpp"
#include "stipt/thz_channel.hpp"

namespace stipt {

/// JSON document for one run. Wall-clock timings are left out unless
/// `with_timings` is set, so equal inputs give byte-identical output.
std::string report_json(const SolveReport& report, const Scenario& scenario, const BcdOptions& options,
                        bool with_timings = false);

/// Convergence trace, one row per recorded iterate:
/// iteration,sum_rate,o_tot,transmit_power,p_ris,p_eu_0..p_eu_{M-1},l_x,l_y,l_z,c1,c2,c3,c4,feasible
std::string trace_csv(const SolveReport& report);

/// Every channel matrix, one entry per line, row-major within a matrix:
/// band,kind,user,row,col,re,im
/// kind is H (direct, per user), G (via RIS, per user), Z (composite, per
/// user) or HR (AP to RIS, user = -1).
std::string channel_csv(const ChannelSet& ch);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stipt
