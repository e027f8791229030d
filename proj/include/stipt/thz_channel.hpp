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

#include <optional>
#include <vector>

#include "stipt/scenario.hpp"
#include "stipt/types.hpp"

namespace stipt {

/// Links between the AP, the RIS and one user on one sub-band.
struct UserLink {
  double distance = 0.0;  // |d_u|, AP to user
  Complex h;              // direct path gain
  CVec v_dir;             // AP transmit vector towards the user
  CVec r_dir;             // user receive vector from the AP
  CMat H;                 // direct channel h r_dir v_dir^H

  double ris_distance = 0.0;  // |d_{0,u}|, RIS to user
  Complex g;                  // cascaded gain
  CVec e;                     // RIS transmit vector towards the user
  CVec r;                     // user receive vector from the RIS
  CVec u;                     // conj(e) .* e_k, used as a row: u * phi

  CMat G;  // g (u phi) r v_k^H
  CMat Z;  // H + G
};

struct SubbandChannels {
  double wavelength = 0.0;
  double absorption = 0.0;
  Complex H_gain;  // scalar AP-RIS gain
  CVec v;          // AP transmit vector towards the RIS
  CVec e;          // RIS receive vector from the AP
  std::vector<UserLink> links;  // one per scenario user

  /// AP-RIS channel matrix H_gain e v^H.
  CMat ris_matrix() const;
};

struct ChannelSet {
  Vec3 ris_position = Vec3::Zero();
  double ap_ris_distance = 0.0;
  CVec phi;
  std::vector<SubbandChannels> bands;
  std::vector<int> iu;  // scenario indices of information users
  std::vector<int> eu;  // scenario indices of energy users

  int subbands() const { return static_cast<int>(bands.size()); }
  const UserLink& link(int k, int user) const { return bands[k].links[user]; }
  const UserLink& iu_link(int k, int i) const { return bands[k].links[iu[i]]; }
  const UserLink& eu_link(int k, int m) const { return bands[k].links[eu[m]]; }
};

struct HarvestedPower {
  double ris = 0.0;
  std::vector<double> eu;
};

/// (2 pi / lambda) (d . offset) / |d|. Throws std::invalid_argument on |d| = 0.
double steering_phase(const Vec3& d_vec, const Vec3& offset, double wavelength);

/// Entries exp(-j steering_phase(d_vec, offsets[n], wavelength)).
CVec array_vector(const Vec3& d_vec, const std::vector<Vec3>& offsets, double wavelength);

/// Direct LOS gain. Throws std::invalid_argument for distance <= 0.
Complex los_gain(double distance, double wavelength, double absorption, double g_t, double g_r);

/// AP-RIS-user cascaded gain. Throws std::invalid_argument for r <= 0 or d0 <= 0.
Complex cascade_gain(double r, double d0, double wavelength, double absorption, double g_t, double g_r);

/// Throws std::invalid_argument when L coincides with the AP or a user reference.
ChannelSet build_channels(const Scenario& scenario, const Vec3& ris_position, const CVec& phi);

/// Rebuilds G and Z for new reflecting coefficients without touching geometry.
void set_reflection(ChannelSet& ch, const CVec& phi);

/// q_in - q_out per sub-band (unweighted).
std::vector<double> ris_absorbed_power(const ChannelSet& ch, const PrecoderSet& F);

HarvestedPower harvested_powers(const ChannelSet& ch, const PrecoderSet& F, const RadioConfig& radio);

/// Sum of squared Frobenius norms.
double transmit_power(const PrecoderSet& F);

}  // namespace stipt
