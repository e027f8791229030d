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

#include "stipt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace stipt {

using nlohmann::json;

namespace {

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& node, const std::string& key, const std::string& path) {
  if (!node.is_object() || !node.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing field");
  return node.at(key);
}

double as_number(const json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path, "expected a number");
  return node.get<double>();
}

int as_int(const json& node, const std::string& path) {
  if (!node.is_number_integer()) throw ConfigError(path, "expected an integer");
  return node.get<int>();
}

double number_field(const json& node, const std::string& key, const std::string& path) {
  return as_number(require(node, key, path), path + "." + key);
}

Vec3 as_vec3(const json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 3) throw ConfigError(path, "expected a 3-vector");
  return {as_number(node[0], index_path(path, 0)), as_number(node[1], index_path(path, 1)),
          as_number(node[2], index_path(path, 2))};
}

std::vector<double> as_number_list(const json& node, const std::string& path) {
  if (!node.is_array()) throw ConfigError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(as_number(node[i], index_path(path, i)));
  return out;
}

Vec3 plane_axis(char c, const std::string& path) {
  switch (c) {
    case 'x': return Vec3::UnitX();
    case 'y': return Vec3::UnitY();
    case 'z': return Vec3::UnitZ();
    default: throw ConfigError(path, "plane must be two of x, y, z");
  }
}

ArrayGeometry parse_array(const json& node, const std::string& path) {
  ArrayGeometry g;
  g.reference = as_vec3(require(node, "reference", path), path + ".reference");
  if (node.contains("offsets")) {
    const auto& offs = node.at("offsets");
    if (!offs.is_array() || offs.empty()) throw ConfigError(path + ".offsets", "expected a nonempty list of 3-vectors");
    g.offsets.clear();
    for (std::size_t i = 0; i < offs.size(); ++i) g.offsets.push_back(as_vec3(offs[i], index_path(path + ".offsets", i)));
  } else if (node.contains("upa")) {
    const auto& upa = node.at("upa");
    const std::string p = path + ".upa";
    const int rows = as_int(require(upa, "rows", p), p + ".rows");
    const int cols = as_int(require(upa, "cols", p), p + ".cols");
    const double pitch = number_field(upa, "pitch_m", p);
    const std::string plane = upa.value("plane", std::string("xz"));
    if (plane.size() != 2 || plane[0] == plane[1]) throw ConfigError(p + ".plane", "plane must be two distinct axes");
    if (rows < 1 || cols < 1) throw ConfigError(p, "rows and cols must be positive");
    if (!(pitch > 0.0)) throw ConfigError(p + ".pitch_m", "pitch must be positive");
    g.offsets = upa_offsets(rows, cols, pitch, plane_axis(plane[0], p + ".plane"), plane_axis(plane[1], p + ".plane"));
  } else {
    g.offsets = {Vec3::Zero()};
  }
  return g;
}

json array_to_json(const ArrayGeometry& g) {
  json offs = json::array();
  for (const auto& o : g.offsets) offs.push_back({o.x(), o.y(), o.z()});
  return {{"reference", {g.reference.x(), g.reference.y(), g.reference.z()}}, {"offsets", offs}};
}

LayoutOptions parse_layout(const json& node, const std::string& path) {
  LayoutOptions l;
  auto get_int = [&](const char* key, int& dst) {
    if (node.contains(key)) dst = as_int(node.at(key), path + "." + key);
  };
  auto get_num = [&](const char* key, double& dst) {
    if (node.contains(key)) dst = as_number(node.at(key), path + "." + key);
  };
  get_int("ap_rows", l.ap_rows);
  get_int("ap_cols", l.ap_cols);
  get_int("ris_rows", l.ris_rows);
  get_int("ris_cols", l.ris_cols);
  get_int("iu_count", l.iu_count);
  get_int("eu_count", l.eu_count);
  get_int("rx_antennas", l.rx_antennas);
  get_int("streams", l.streams);
  get_num("pitch_m", l.pitch);
  get_num("area_width_m", l.area_width);
  get_num("ap_height_m", l.ap_height);
  get_num("eu_power_req_w", l.eu_power_req);
  get_num("min_separation_m", l.min_separation);
  if (node.contains("pin_ris_to_x_axis")) {
    if (!node.at("pin_ris_to_x_axis").is_boolean()) throw ConfigError(path + ".pin_ris_to_x_axis", "expected a boolean");
    l.pin_ris_to_x_axis = node.at("pin_ris_to_x_axis").get<bool>();
  }
  if (l.ap_rows < 1 || l.ap_cols < 1 || l.ris_rows < 1 || l.ris_cols < 1 || l.rx_antennas < 1 || l.iu_count < 1 ||
      l.eu_count < 0 || l.streams < 0)
    throw ConfigError(path, "array sizes and user counts must be positive");
  if (!(l.pitch > 0.0) || !(l.area_width > 0.0)) throw ConfigError(path, "pitch and area width must be positive");
  return l;
}

json layout_to_json(const LayoutOptions& l) {
  return {{"ap_rows", l.ap_rows},
          {"ap_cols", l.ap_cols},
          {"ris_rows", l.ris_rows},
          {"ris_cols", l.ris_cols},
          {"iu_count", l.iu_count},
          {"eu_count", l.eu_count},
          {"rx_antennas", l.rx_antennas},
          {"streams", l.streams},
          {"pitch_m", l.pitch},
          {"area_width_m", l.area_width},
          {"ap_height_m", l.ap_height},
          {"eu_power_req_w", l.eu_power_req},
          {"min_separation_m", l.min_separation},
          {"pin_ris_to_x_axis", l.pin_ris_to_x_axis}};
}

bool finite(const Vec3& v) { return v.allFinite(); }

void validate_array(const ArrayGeometry& g, const std::string& path) {
  if (g.offsets.empty()) throw ConfigError(path + ".offsets", "array needs at least one element");
  if (!finite(g.reference)) throw ConfigError(path + ".reference", "coordinate must be finite");
  if (g.offsets.front().norm() != 0.0) throw ConfigError(index_path(path + ".offsets", 0), "first offset must be the origin");
  for (std::size_t i = 0; i < g.offsets.size(); ++i)
    if (!finite(g.offsets[i])) throw ConfigError(index_path(path + ".offsets", i), "offset must be finite");
}

}  // namespace

void RadioConfig::finalize() {
  centers.resize(subband_count);
  wavelengths.resize(subband_count);
  const double width = (band_end_hz - band_start_hz) / subband_count;
  for (int k = 0; k < subband_count; ++k) {
    centers[k] = band_start_hz + (k + 0.5) * width;
    wavelengths[k] = kSpeedOfLight / centers[k];
  }
}

std::vector<int> Scenario::information_users() const {
  std::vector<int> out;
  for (int u = 0; u < user_count(); ++u)
    if (users[u].is_information()) out.push_back(u);
  return out;
}

std::vector<int> Scenario::energy_users() const {
  std::vector<int> out;
  for (int u = 0; u < user_count(); ++u)
    if (!users[u].is_information()) out.push_back(u);
  return out;
}

int Scenario::streams(int user) const { return users.at(user).stream_count.value_or(0); }

void validate(const Scenario& s) {
  const auto& r = s.radio;
  if (!(r.band_end_hz > r.band_start_hz) || !(r.band_start_hz > 0.0))
    throw ConfigError("radio.band_end_hz", "band_end_hz must exceed band_start_hz > 0");
  if (r.subband_count < 1) throw ConfigError("radio.subband_count", "must be a positive integer");
  if (static_cast<int>(r.absorption.size()) != r.subband_count)
    throw ConfigError("radio.absorption_per_m", "needs one entry per sub-band");
  if (static_cast<int>(r.eta.size()) != r.subband_count) throw ConfigError("radio.eta", "needs one entry per sub-band");
  for (std::size_t k = 0; k < r.absorption.size(); ++k)
    if (!(r.absorption[k] >= 0.0) || !std::isfinite(r.absorption[k]))
      throw ConfigError(index_path("radio.absorption_per_m", k), "absorption must be finite and nonnegative");
  for (std::size_t k = 0; k < r.eta.size(); ++k)
    if (!(r.eta[k] >= 0.0 && r.eta[k] <= 1.0)) throw ConfigError(index_path("radio.eta", k), "eta must lie in [0, 1]");
  if (!(r.noise_power > 0.0)) throw ConfigError("radio.noise_power_w", "noise power must be positive");
  if (!(r.g_t > 0.0)) throw ConfigError("radio.g_t", "gain must be positive");
  if (!(r.g_r > 0.0)) throw ConfigError("radio.g_r", "gain must be positive");
  if (static_cast<int>(r.centers.size()) != r.subband_count) throw ConfigError("radio", "sub-band centers not computed");

  validate_array(s.ap, "ap");
  validate_array(s.ris, "ris");
  if (!(s.p_t_max > 0.0)) throw ConfigError("p_t_max_w", "transmit budget must be positive");
  if (!(s.p_ris_req >= 0.0)) throw ConfigError("p_ris_req_w", "RIS requirement must be nonnegative");
  if (!(s.penalty_fraction > 0.0)) throw ConfigError("penalty_fraction", "must be positive");

  int ius = 0;
  for (std::size_t u = 0; u < s.users.size(); ++u) {
    const auto& user = s.users[u];
    const std::string path = index_path("users", u);
    validate_array(user.geometry, path);
    if (user.is_information()) {
      ++ius;
      if (user.power_req) throw ConfigError(path + ".power_req_w", "information users carry no power requirement");
      if (!user.stream_count) throw ConfigError(path + ".streams", "information users need a stream count");
      const int d = *user.stream_count;
      if (d < 1 || d > std::min(user.geometry.size(), s.ap.size()))
        throw ConfigError(path + ".streams", "stream count must lie in [1, min(N_r, N_t)]");
    } else {
      if (user.stream_count) throw ConfigError(path + ".streams", "energy users carry no stream count");
      if (!user.power_req || !(*user.power_req >= 0.0))
        throw ConfigError(path + ".power_req_w", "energy users need a nonnegative power requirement");
    }
  }
  if (ius < 1) throw ConfigError("users", "at least one information user is required");

  if (s.ris_box) {
    static constexpr const char* kAxes[] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
      const auto& b = (*s.ris_box)[a];
      const std::string path = std::string("ris_box.") + kAxes[a];
      if (!(b.max >= b.min)) throw ConfigError(path, "max must not be below min");
      const double l = s.ris.reference[a];
      if (l < b.min - 1e-12 || l > b.max + 1e-12) throw ConfigError(path, "initial RIS coordinate lies outside the box");
    }
  }
}

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse failure: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("", "top level must be an object");
  const auto& schema = require(root, "schema", "");
  if (!schema.is_string() || schema.get<std::string>() != kSchemaVersion)
    throw ConfigError("schema", "expected \"" + std::string(kSchemaVersion) + "\"");

  Scenario s;
  const auto& radio = require(root, "radio", "");
  s.radio.band_start_hz = number_field(radio, "band_start_hz", "radio");
  s.radio.band_end_hz = number_field(radio, "band_end_hz", "radio");
  s.radio.subband_count = as_int(require(radio, "subband_count", "radio"), "radio.subband_count");
  s.radio.absorption = as_number_list(require(radio, "absorption_per_m", "radio"), "radio.absorption_per_m");
  s.radio.eta = as_number_list(require(radio, "eta", "radio"), "radio.eta");
  s.radio.noise_power = number_field(radio, "noise_power_w", "radio");
  s.radio.g_t = number_field(radio, "g_t", "radio");
  s.radio.g_r = number_field(radio, "g_r", "radio");
  if (s.radio.subband_count < 1) throw ConfigError("radio.subband_count", "must be a positive integer");
  s.radio.finalize();

  s.p_t_max = number_field(root, "p_t_max_w", "");
  s.p_ris_req = number_field(root, "p_ris_req_w", "");
  if (root.contains("penalty_fraction")) s.penalty_fraction = as_number(root.at("penalty_fraction"), "penalty_fraction");
  if (root.contains("rng_seed")) {
    const auto& seed = root.at("rng_seed");
    if (!seed.is_number_unsigned()) throw ConfigError("rng_seed", "expected a nonnegative integer");
    s.rng_seed = seed.get<std::uint64_t>();
  }
  if (root.contains("layout") && !root.at("layout").is_null()) s.layout = parse_layout(root.at("layout"), "layout");

  const bool explicit_geometry = root.contains("ap") || root.contains("ris") || root.contains("users");
  if (explicit_geometry || !s.layout) {
    s.ap = parse_array(require(root, "ap", ""), "ap");
    s.ris = parse_array(require(root, "ris", ""), "ris");
    const auto& users = require(root, "users", "");
    if (!users.is_array()) throw ConfigError("users", "expected a list");
    for (std::size_t u = 0; u < users.size(); ++u) {
      const std::string path = index_path("users", u);
      const auto& node = users[u];
      UserSpec spec;
      const auto& kind = require(node, "kind", path);
      if (kind == "IU") {
        spec.kind = UserKind::kInformation;
      } else if (kind == "EU") {
        spec.kind = UserKind::kEnergy;
      } else {
        throw ConfigError(path + ".kind", "kind must be \"IU\" or \"EU\"");
      }
      spec.geometry = parse_array(node, path);
      if (node.contains("power_req_w")) spec.power_req = as_number(node.at("power_req_w"), path + ".power_req_w");
      if (node.contains("streams")) spec.stream_count = as_int(node.at("streams"), path + ".streams");
      if (spec.is_information() && !spec.stream_count) spec.stream_count = spec.geometry.size();
      s.users.push_back(std::move(spec));
    }
    if (root.contains("ris_box") && !root.at("ris_box").is_null()) {
      const auto& box = root.at("ris_box");
      if (!box.is_array() || box.size() != 3) throw ConfigError("ris_box", "expected three [min, max] pairs");
      RisBox b;
      for (int a = 0; a < 3; ++a) {
        const auto bounds = as_number_list(box[a], index_path("ris_box", a));
        if (bounds.size() != 2) throw ConfigError(index_path("ris_box", a), "expected [min, max]");
        b[a] = {bounds[0], bounds[1]};
      }
      s.ris_box = b;
    }
  } else {
    s = realize_layout(s, *s.layout, s.rng_seed);
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["schema"] = kSchemaVersion;
  root["radio"] = {{"band_start_hz", s.radio.band_start_hz}, {"band_end_hz", s.radio.band_end_hz},
                   {"subband_count", s.radio.subband_count}, {"absorption_per_m", s.radio.absorption},
                   {"eta", s.radio.eta}, {"noise_power_w", s.radio.noise_power},
                   {"g_t", s.radio.g_t}, {"g_r", s.radio.g_r}};
  root["ap"] = array_to_json(s.ap);
  root["ris"] = array_to_json(s.ris);
  json users = json::array();
  for (const auto& u : s.users) {
    json node = array_to_json(u.geometry);
    node["kind"] = u.is_information() ? "IU" : "EU";
    if (u.power_req) node["power_req_w"] = *u.power_req;
    if (u.stream_count) node["streams"] = *u.stream_count;
    users.push_back(node);
  }
  root["users"] = users;
  root["p_t_max_w"] = s.p_t_max;
  root["p_ris_req_w"] = s.p_ris_req;
  if (s.ris_box) {
    json box = json::array();
    for (const auto& b : *s.ris_box) box.push_back({b.min, b.max});
    root["ris_box"] = box;
  }
  root["penalty_fraction"] = s.penalty_fraction;
  root["rng_seed"] = s.rng_seed;
  if (s.layout) root["layout"] = layout_to_json(*s.layout);
  return root.dump(2);
}

std::vector<Vec3> upa_offsets(int rows, int cols, double pitch, const Vec3& col_axis, const Vec3& row_axis) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.push_back(pitch * (c * col_axis + r * row_axis));
  return out;
}

RadioConfig default_radio() {
  RadioConfig r;
  r.band_start_hz = 300e9;
  r.band_end_hz = 340e9;
  r.subband_count = 2;
  r.absorption = {0.0033, 0.0045};
  r.eta = {0.5, 0.5};
  r.noise_power = 1e-11;  // -80 dBm
  r.g_t = 15.0;
  r.g_r = 6.0;
  r.finalize();
  return r;
}

Scenario realize_layout(const Scenario& base, const LayoutOptions& l, std::uint64_t seed) {
  Scenario s = base;
  s.layout = l;
  s.rng_seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, l.area_width);

  // AP on the wall x = 0, facing the room; RIS on the wall y = 0 along the X-axis.
  s.ap.reference = Vec3(0.0, 0.5 * l.area_width, l.ap_height);
  s.ap.offsets = upa_offsets(l.ap_rows, l.ap_cols, l.pitch, Vec3::UnitY(), Vec3::UnitZ());
  s.ris.reference = Vec3(coord(rng), 0.0, 0.0);
  s.ris.offsets = upa_offsets(l.ris_rows, l.ris_cols, l.pitch, Vec3::UnitX(), Vec3::UnitZ());

  // Users on the floor, kept away from the RIS line and from each other.
  std::vector<Vec3> placed;
  s.users.clear();
  const int total = l.iu_count + l.eu_count;
  for (int u = 0; u < total; ++u) {
    Vec3 p;
    for (int attempt = 0;; ++attempt) {
      p = Vec3(coord(rng), coord(rng), 0.0);
      bool ok = p.y() >= l.min_separation;
      for (const auto& q : placed) ok = ok && (p - q).norm() >= l.min_separation;
      if (ok || attempt > 1000) break;
    }
    placed.push_back(p);
    UserSpec spec;
    spec.geometry.reference = p;
    spec.geometry.offsets = upa_offsets(1, l.rx_antennas, l.pitch, Vec3::UnitX(), Vec3::UnitZ());
    if (u < l.iu_count) {
      spec.kind = UserKind::kInformation;
      spec.stream_count = l.streams > 0 ? l.streams : l.rx_antennas;
    } else {
      spec.kind = UserKind::kEnergy;
      spec.power_req = l.eu_power_req;
    }
    s.users.push_back(std::move(spec));
  }
  if (l.pin_ris_to_x_axis) {
    s.ris_box = RisBox{AxisBounds{0.0, l.area_width}, AxisBounds{0.0, 0.0}, AxisBounds{0.0, 0.0}};
  } else {
    s.ris_box.reset();
  }
  return s;
}

Scenario full_scale_scenario() {
  Scenario base;
  base.radio = default_radio();
  base.p_t_max = 10.0;
  base.p_ris_req = 1e-4;
  base.penalty_fraction = 0.01;
  return realize_layout(base, LayoutOptions{}, 1);
}

LayoutOptions desk_layout() {
  LayoutOptions l;
  l.ap_rows = 4;
  l.ap_cols = 4;
  l.ris_rows = 8;
  l.ris_cols = 8;
  return l;
}

Scenario desk_scenario(std::uint64_t seed) {
  Scenario base = full_scale_scenario();
  return realize_layout(base, desk_layout(), seed);
}

}  // namespace stipt
