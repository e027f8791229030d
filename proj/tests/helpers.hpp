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

#include <cmath>
#include <random>

#include "stipt/scenario.hpp"
#include "stipt/thz_channel.hpp"
#include "stipt/types.hpp"

namespace stipt::test {

using Rng = std::mt19937_64;

inline Scenario make_scenario(std::uint64_t seed, int ap_rows, int ap_cols, int iu, int eu, int ris_rows,
                              int ris_cols, double noise = 1e-11) {
  Scenario base = full_scale_scenario();
  base.radio.noise_power = noise;
  LayoutOptions l = desk_layout();
  l.ap_rows = ap_rows;
  l.ap_cols = ap_cols;
  l.iu_count = iu;
  l.eu_count = eu;
  l.ris_rows = ris_rows;
  l.ris_cols = ris_cols;
  return realize_layout(base, l, seed);
}

inline CMat random_cmat(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMat M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = Complex(n(rng), n(rng));
  return M;
}

inline PrecoderSet random_precoders(const Scenario& s, Rng& rng, double power) {
  PrecoderSet F(s.subbands());
  double total = 0.0;
  for (auto& band : F)
    for (int u : s.information_users()) {
      band.push_back(random_cmat(rng, s.ap_antennas(), s.streams(u)));
      total += band.back().squaredNorm();
    }
  for (auto& band : F)
    for (auto& Fi : band) Fi *= std::sqrt(power / total);
  return F;
}

// Entries drawn uniformly from the closed unit disc.
inline CVec random_phi(Rng& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVec phi(n);
  for (int i = 0; i < n; ++i) phi[i] = std::polar(std::sqrt(u(rng)), 2.0 * kPi * u(rng));
  return phi;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace stipt::test
