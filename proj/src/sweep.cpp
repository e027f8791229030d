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

#include "stipt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "format.hpp"

namespace stipt {

namespace {

bool is_count(SweepParameter p) {
  return p == SweepParameter::kRisElements || p == SweepParameter::kIuCount || p == SweepParameter::kEuCount;
}

// rows x cols with rows the largest divisor not above sqrt(n).
std::pair<int, int> ris_shape(int n) {
  int rows = 1;
  for (int r = 1; r * r <= n; ++r)
    if (n % r == 0) rows = r;
  return {rows, n / rows};
}

}  // namespace

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kRisElements: return "ris_elements";
    case SweepParameter::kIuCount: return "iu_count";
    case SweepParameter::kEuCount: return "eu_count";
    case SweepParameter::kEuPower: return "eu_power";
    case SweepParameter::kRisPower: return "ris_power";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  for (auto p : {SweepParameter::kRisElements, SweepParameter::kIuCount, SweepParameter::kEuCount,
                 SweepParameter::kEuPower, SweepParameter::kRisPower})
    if (name == to_string(p)) return p;
  throw ConfigError("parameter", "unknown sweep parameter \"" + std::string(name) + "\"");
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("values", "must not be empty");
  for (std::size_t j = 0; j < spec.values.size(); ++j) {
    const double v = spec.values[j];
    const std::string field = "values[" + std::to_string(j) + "]";
    if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
    if (is_count(spec.parameter)) {
      if (v != std::floor(v)) throw ConfigError(field, "must be an integer");
      const double lo = spec.parameter == SweepParameter::kEuCount ? 0.0 : 1.0;
      if (v < lo || v > 4096) throw ConfigError(field, "out of range");
    } else if (v < 0.0) {
      throw ConfigError(field, "power must be non-negative");
    }
  }
  if (spec.seeds_per_point < 1) throw ConfigError("seeds_per_point", "must be at least 1");
  if (spec.modes.empty()) throw ConfigError("modes", "must not be empty");
}

SweepSpec parse_sweep_spec(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "sweep spec must be an object");
  SweepSpec spec;
  try {
    if (!j.contains("parameter")) throw ConfigError("parameter", "missing");
    spec.parameter = parse_sweep_parameter(j.at("parameter").get<std::string>());
    if (!j.contains("values")) throw ConfigError("values", "missing");
    spec.values = j.at("values").get<std::vector<double>>();
    if (j.contains("seeds_per_point")) spec.seeds_per_point = j.at("seeds_per_point").get<int>();
    if (j.contains("base_seed")) spec.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("modes")) {
      spec.modes.clear();
      std::size_t idx = 0;
      for (const auto& m : j.at("modes")) {
        try {
          spec.modes.push_back(parse_mode(m.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError("modes[" + std::to_string(idx) + "]", e.what());
        }
        ++idx;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("", std::string("wrong type: ") + e.what());
  }
  validate(spec);
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_sweep_spec(os.str());
}

Scenario sweep_point(const Scenario& base, SweepParameter parameter, double value, std::uint64_t seed) {
  Scenario s = base;
  LayoutOptions layout = base.layout.value_or(desk_layout());
  switch (parameter) {
    case SweepParameter::kRisElements: {
      const auto [rows, cols] = ris_shape(static_cast<int>(value));
      layout.ris_rows = rows;
      layout.ris_cols = cols;
      break;
    }
    case SweepParameter::kIuCount: layout.iu_count = static_cast<int>(value); break;
    case SweepParameter::kEuCount: layout.eu_count = static_cast<int>(value); break;
    case SweepParameter::kEuPower: layout.eu_power_req = value; break;
    case SweepParameter::kRisPower: s.p_ris_req = value; break;
  }
  return realize_layout(s, layout, seed);
}

std::vector<SweepCell> aggregate(const std::vector<SweepRun>& runs) {
  // Keyed by (value, mode); seeds are summed in ascending order.
  std::map<std::pair<double, int>, std::vector<const SweepRun*>> groups;
  for (const auto& r : runs) groups[{r.value, static_cast<int>(r.mode)}].push_back(&r);
  std::vector<SweepCell> cells;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const SweepRun* a, const SweepRun* b) { return a->seed < b->seed; });
    SweepCell c;
    c.value = key.first;
    c.mode = static_cast<Mode>(key.second);
    double sum = 0.0;
    for (const auto* r : members) {
      if (r->ok) {
        ++c.n_ok;
        sum += r->sum_rate;
      } else {
        ++c.n_failed;
      }
    }
    if (c.n_ok > 0) c.mean = sum / c.n_ok;
    if (c.n_ok > 1) {
      double ss = 0.0;
      for (const auto* r : members)
        if (r->ok) ss += (r->sum_rate - c.mean) * (r->sum_rate - c.mean);
      c.std_error = std::sqrt(ss / (c.n_ok - 1) / c.n_ok);
    }
    cells.push_back(c);
  }
  return cells;
}

SweepResult run_sweep(const Scenario& base, const SweepSpec& spec, int workers, const BcdOptions& options,
                      const std::function<void(const SweepRun&)>& on_done) {
  validate(spec);
  SweepResult result;
  result.parameter = spec.parameter;
  for (double v : spec.values)
    for (Mode m : spec.modes)
      for (int j = 0; j < spec.seeds_per_point; ++j) {
        SweepRun r;
        r.value = v;
        r.mode = m;
        r.seed = spec.base_seed + static_cast<std::uint64_t>(j);
        result.runs.push_back(r);
      }

  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (std::size_t idx = next++; idx < result.runs.size(); idx = next++) {
      SweepRun& r = result.runs[idx];
      try {
        const Scenario s = sweep_point(base, spec.parameter, r.value, r.seed);
        const SolveReport rep = run(s, r.mode, options);
        r.sum_rate = rep.trace.back().sum_rate;
        r.ok = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      if (on_done) {
        std::lock_guard<std::mutex> lock(report_mutex);
        on_done(r);
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(result.runs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  result.cells = aggregate(result.runs);
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "parameter,value,mode,mean_sum_rate,std_error,n_ok,n_failed\n";
  for (const auto& c : result.cells)
    os << to_string(result.parameter) << ',' << detail::shortest(c.value) << ',' << to_string(c.mode) << ','
       << detail::shortest(c.mean) << ',' << detail::shortest(c.std_error) << ',' << c.n_ok << ',' << c.n_failed
       << '\n';
  return os.str();
}

std::string sweep_runs_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "parameter,value,mode,seed,ok,sum_rate,error\n";
  for (const auto& r : result.runs) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << to_string(result.parameter) << ',' << detail::shortest(r.value) << ',' << to_string(r.mode) << ','
       << r.seed << ',' << r.ok << ',' << detail::shortest(r.sum_rate) << ',' << err << '\n';
  }
  return os.str();
}

}  // namespace stipt
