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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stipt/types.hpp"

namespace stipt {

inline constexpr std::string_view kSchemaVersion = "stipt-v1";

/// Raised for unreadable or invalid experiment configurations. `field()` holds
/// the dotted path of the offending entry, e.g. "radio.eta[1]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct RadioConfig {
  double band_start_hz = 300e9;
  double band_end_hz = 340e9;
  int subband_count = 2;
  std::vector<double> absorption;  // K(f_k), 1/m
  std::vector<double> eta;         // harvesting efficiency per sub-band
  double noise_power = 1e-11;      // W per sub-band
  double g_t = 15.0;
  double g_r = 6.0;

  // Filled by finalize(): sub-band centers (Hz) and wavelengths (m).
  std::vector<double> centers;
  std::vector<double> wavelengths;

  void finalize();
};

/// Reference coordinate of the first element plus element offsets from it.
struct ArrayGeometry {
  Vec3 reference = Vec3::Zero();
  std::vector<Vec3> offsets{Vec3::Zero()};

  int size() const { return static_cast<int>(offsets.size()); }
};

enum class UserKind { kInformation, kEnergy };

struct UserSpec {
  UserKind kind = UserKind::kInformation;
  ArrayGeometry geometry;
  std::optional<double> power_req;  // EU only, W
  std::optional<int> stream_count;  // IU only

  bool is_information() const { return kind == UserKind::kInformation; }
};

struct AxisBounds {
  double min = 0.0;
  double max = 0.0;
  bool pinned() const { return max - min <= 1e-12; }
};
using RisBox = std::array<AxisBounds, 3>;

/// Parameters of the generated indoor layout: AP on the wall x = 0 at a given
/// height, RIS on the X-axis, users scattered on the floor of a square area.
struct LayoutOptions {
  int ap_rows = 5;
  int ap_cols = 10;
  int ris_rows = 10;
  int ris_cols = 10;
  int iu_count = 2;
  int eu_count = 2;
  int rx_antennas = 2;
  int streams = 0;  // 0: one stream per receive antenna
  double pitch = 1e-4;
  double area_width = 3.0;
  double ap_height = 2.0;
  double eu_power_req = 1e-4;
  double min_separation = 0.3;
  bool pin_ris_to_x_axis = true;
};

struct Scenario {
  RadioConfig radio;
  ArrayGeometry ap;
  ArrayGeometry ris;  // ris.reference is the initial coordinate L0
  std::vector<UserSpec> users;
  double p_t_max = 10.0;
  double p_ris_req = 1e-4;
  std::optional<RisBox> ris_box;
  double penalty_fraction = 0.01;
  std::uint64_t rng_seed = 1;
  std::optional<LayoutOptions> layout;

  int subbands() const { return radio.subband_count; }
  int ap_antennas() const { return ap.size(); }
  int ris_elements() const { return ris.size(); }
  int user_count() const { return static_cast<int>(users.size()); }
  std::vector<int> information_users() const;
  std::vector<int> energy_users() const;
  int streams(int user) const;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const Scenario& scenario);

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);

/// Uniform planar array offsets: `cols` elements along `col_axis`, `rows`
/// along `row_axis`, spaced by `pitch`. The first offset is the origin.
std::vector<Vec3> upa_offsets(int rows, int cols, double pitch, const Vec3& col_axis, const Vec3& row_axis);

/// Default radio: 300-340 GHz in two 20 GHz sub-bands.
RadioConfig default_radio();

/// Regenerates AP, RIS and user geometry of `base` from `layout`, drawing user
/// positions and the initial RIS coordinate from `seed`.
Scenario realize_layout(const Scenario& base, const LayoutOptions& layout, std::uint64_t seed);

/// 5x10 AP, 100-element RIS, two IUs and two EUs with N_r = 2, 10 W budget and
/// 0.1 mW harvesting targets. Users are placed from rng_seed = 1.
Scenario full_scale_scenario();

/// Full-scale setup reduced to 4x4 AP antennas and an 8x8 RIS.
Scenario desk_scenario(std::uint64_t seed = 1);

/// Layout used by desk-scale runs and sweeps.
LayoutOptions desk_layout();

}  // namespace stipt
