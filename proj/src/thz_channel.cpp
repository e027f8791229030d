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

#include "stipt/thz_channel.hpp"

#include <cmath>
#include <stdexcept>

namespace stipt {

namespace {

constexpr Complex kJ{0.0, 1.0};

Complex propagation_phase(double distance, double wavelength) {
  return std::exp(-kJ * (2.0 * kPi * distance / wavelength));
}

}  // namespace

CMat SubbandChannels::ris_matrix() const { return H_gain * e * v.adjoint(); }

double steering_phase(const Vec3& d_vec, const Vec3& offset, double wavelength) {
  const double n = d_vec.norm();
  if (!(n > 0.0)) throw std::invalid_argument("steering_phase: zero-length direction");
  return 2.0 * kPi / wavelength * d_vec.dot(offset) / n;
}

CVec array_vector(const Vec3& d_vec, const std::vector<Vec3>& offsets, double wavelength) {
  CVec out(static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t n = 0; n < offsets.size(); ++n) out[n] = std::polar(1.0, -steering_phase(d_vec, offsets[n], wavelength));
  return out;
}

Complex los_gain(double distance, double wavelength, double absorption, double g_t, double g_r) {
  if (!(distance > 0.0)) throw std::invalid_argument("los_gain: distance must be positive");
  const double mag = g_r * g_t * wavelength / (4.0 * kPi * distance) * std::exp(-0.5 * absorption * distance);
  return mag * propagation_phase(distance, wavelength);
}

Complex cascade_gain(double r, double d0, double wavelength, double absorption, double g_t, double g_r) {
  if (!(r > 0.0) || !(d0 > 0.0)) throw std::invalid_argument("cascade_gain: distances must be positive");
  const double mag =
      g_t * g_r * wavelength / (8.0 * std::sqrt(kPi * kPi * kPi) * r * d0) * std::exp(-0.5 * absorption * (r + d0));
  return mag * propagation_phase(r + d0, wavelength);
}

ChannelSet build_channels(const Scenario& s, const Vec3& L, const CVec& phi) {
  if (phi.size() != s.ris_elements()) throw std::invalid_argument("build_channels: phi has wrong length");
  ChannelSet ch;
  ch.ris_position = L;
  ch.iu = s.information_users();
  ch.eu = s.energy_users();
  const Vec3 d0 = L - s.ap.reference;
  ch.ap_ris_distance = d0.norm();
  if (!(ch.ap_ris_distance > 0.0)) throw std::invalid_argument("build_channels: RIS coincides with the AP");

  const auto& radio = s.radio;
  ch.bands.resize(radio.subband_count);
  for (int k = 0; k < radio.subband_count; ++k) {
    auto& band = ch.bands[k];
    band.wavelength = radio.wavelengths[k];
    band.absorption = radio.absorption[k];
    const double lam = band.wavelength;
    const double Kf = band.absorption;
    band.H_gain = los_gain(ch.ap_ris_distance, lam, Kf, radio.g_t, 1.0);
    band.v = array_vector(d0, s.ap.offsets, lam);
    band.e = array_vector(d0, s.ris.offsets, lam);

    band.links.resize(s.users.size());
    for (std::size_t u = 0; u < s.users.size(); ++u) {
      const auto& user = s.users[u].geometry;
      auto& link = band.links[u];
      const Vec3 du = user.reference - s.ap.reference;
      link.distance = du.norm();
      link.h = los_gain(link.distance, lam, Kf, radio.g_t, radio.g_r);
      link.v_dir = array_vector(du, s.ap.offsets, lam);
      link.r_dir = array_vector(du, user.offsets, lam);
      link.H = link.h * link.r_dir * link.v_dir.adjoint();

      const Vec3 d0u = user.reference - L;
      link.ris_distance = d0u.norm();
      if (!(link.ris_distance > 0.0)) throw std::invalid_argument("build_channels: RIS coincides with a user");
      link.g = cascade_gain(link.ris_distance, ch.ap_ris_distance, lam, Kf, radio.g_t, radio.g_r);
      link.e = array_vector(d0u, s.ris.offsets, lam);
      link.r = array_vector(d0u, user.offsets, lam);
      link.u = link.e.conjugate().cwiseProduct(band.e);
    }
  }
  set_reflection(ch, phi);
  return ch;
}

void set_reflection(ChannelSet& ch, const CVec& phi) {
  ch.phi = phi;
  for (auto& band : ch.bands) {
    for (auto& link : band.links) {
      const Complex up = link.u.cwiseProduct(phi).sum();  // u * phi as a row product
      link.G = (link.g * up) * link.r * band.v.adjoint();
      link.Z = link.H + link.G;
    }
  }
}

std::vector<double> ris_absorbed_power(const ChannelSet& ch, const PrecoderSet& F) {
  std::vector<double> out(ch.bands.size(), 0.0);
  const RVec absorb = (1.0 - ch.phi.array().abs2()).matrix();
  for (std::size_t k = 0; k < ch.bands.size(); ++k) {
    const CMat Hk = ch.bands[k].ris_matrix();
    for (const auto& Fi : F[k]) {
      const CMat HF = Hk * Fi;
      out[k] += absorb.dot(HF.rowwise().squaredNorm());
    }
  }
  return out;
}

HarvestedPower harvested_powers(const ChannelSet& ch, const PrecoderSet& F, const RadioConfig& radio) {
  if (static_cast<int>(F.size()) != ch.subbands()) throw std::invalid_argument("harvested_powers: sub-band count mismatch");
  HarvestedPower p;
  const auto absorbed = ris_absorbed_power(ch, F);
  for (std::size_t k = 0; k < absorbed.size(); ++k) p.ris += radio.eta[k] * absorbed[k];
  p.eu.assign(ch.eu.size(), 0.0);
  for (std::size_t m = 0; m < ch.eu.size(); ++m) {
    for (int k = 0; k < ch.subbands(); ++k) {
      const CMat& Z = ch.eu_link(k, static_cast<int>(m)).Z;
      for (const auto& Fi : F[k]) {
        if (Fi.rows() != Z.cols()) throw std::invalid_argument("harvested_powers: precoder dimension mismatch");
        p.eu[m] += radio.eta[k] * (Z * Fi).squaredNorm();
      }
    }
  }
  return p;
}

double transmit_power(const PrecoderSet& F) {
  double p = 0.0;
  for (const auto& band : F)
    for (const auto& Fi : band) p += Fi.squaredNorm();
  return p;
}

}  // namespace stipt
