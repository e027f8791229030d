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

#include "stipt/report_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "format.hpp"

namespace stipt {

namespace {

using Json = nlohmann::ordered_json;

using detail::shortest;

Json vec3(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json complex_matrix(const CMat& M) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      re.push_back(M(r, c).real());
      im.push_back(M(r, c).imag());
    }
  return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"re", re}, {"im", im}};
}

const char* rule_name(AcceptanceRule r) { return r == AcceptanceRule::kBothParts ? "both_parts" : "total"; }

Json kernel_json(const KernelOptions& k) { return Json{{"tol", k.tol}, {"max_iter", k.max_iter}}; }

}  // namespace

std::string report_json(const SolveReport& report, const Scenario& scenario, const BcdOptions& options,
                        bool with_timings) {
  Json j;
  j["schema"] = std::string(kSchemaVersion);
  j["mode"] = to_string(report.mode);
  j["rng_seed"] = scenario.rng_seed;
  j["converged"] = report.converged;
  j["power_split"] = report.power_split;
  j["options"] = Json{{"max_outer", options.max_outer},
                      {"early_stop", options.early_stop},
                      {"precoder_rounds", options.precoder_rounds},
                      {"precoder",
                       {{"inner_iterations", options.precoder.inner_iterations},
                        {"early_exit", options.precoder.early_exit},
                        {"kernel", kernel_json(options.precoder.kernel)}}},
                      {"phi",
                       {{"inner_iterations", options.phi.inner_iterations},
                        {"early_exit", options.phi.early_exit},
                        {"kernel", kernel_json(options.phi.kernel)}}},
                      {"pcca",
                       {{"max_iterations", options.pcca.max_iterations},
                        {"rule", rule_name(options.pcca.rule)},
                        {"part_slack", options.pcca.part_slack},
                        {"penalty_fraction", scenario.penalty_fraction},
                        {"kernel", kernel_json(options.pcca.kernel)}}}};

  Json trace = Json::array();
  for (const auto& r : report.trace) {
    trace.push_back(Json{{"iteration", r.iteration},
                         {"sum_rate", r.sum_rate},
                         {"o_tot", r.o_tot},
                         {"transmit_power", r.transmit_power},
                         {"p_ris", r.p_ris},
                         {"p_eu", r.p_eu},
                         {"L", vec3(r.L)},
                         {"c1", r.c1},
                         {"c2", r.c2},
                         {"c3", r.c3},
                         {"c4", r.c4}});
  }
  j["trace"] = std::move(trace);

  Json fin;
  fin["L"] = vec3(report.final.L);
  Json phi = Json::array();
  for (Eigen::Index n = 0; n < report.final.phi.size(); ++n)
    phi.push_back(Json::array({report.final.phi[n].real(), report.final.phi[n].imag()}));
  fin["phi"] = std::move(phi);
  Json F = Json::array();
  for (const auto& band : report.final.F) {
    Json b = Json::array();
    for (const auto& Fi : band) b.push_back(complex_matrix(Fi));
    F.push_back(std::move(b));
  }
  fin["F"] = std::move(F);
  if (!report.trace.empty()) {
    fin["sum_rate"] = report.trace.back().sum_rate;
    fin["o_tot"] = report.trace.back().o_tot;
    fin["feasible"] = report.trace.back().feasible();
  }
  j["final"] = std::move(fin);

  j["events"] = report.events;
  Json pcca = Json::array();
  for (const auto& outer : report.pcca) {
    Json rows = Json::array();
    for (const auto& r : outer) {
      rows.push_back(Json{{"iteration", r.iteration},
                          {"status", r.status},
                          {"L", vec3(r.L)},
                          {"alpha", r.alpha},
                          {"alpha_m", r.alpha_m},
                          {"working_ris", r.working.ris},
                          {"working_eu", r.working.eu},
                          {"weighted_mse", r.parts.weighted_mse},
                          {"neg_logdet", r.parts.neg_logdet}});
    }
    pcca.push_back(std::move(rows));
  }
  j["pcca"] = std::move(pcca);

  if (with_timings) {
    j["timings_s"] = Json{{"initialize", report.timings.initialize_s},
                          {"precoder", report.timings.precoder_s},
                          {"phi", report.timings.phi_s},
                          {"coordinate", report.timings.coordinate_s}};
  }
  return j.dump(2) + "\n";
}

std::string trace_csv(const SolveReport& report) {
  std::ostringstream os;
  const std::size_t M = report.trace.empty() ? 0 : report.trace.front().p_eu.size();
  os << "iteration,sum_rate,o_tot,transmit_power,p_ris";
  for (std::size_t m = 0; m < M; ++m) os << ",p_eu_" << m;
  os << ",l_x,l_y,l_z,c1,c2,c3,c4,feasible\n";
  for (const auto& r : report.trace) {
    os << r.iteration << ',' << shortest(r.sum_rate) << ',' << shortest(r.o_tot) << ',' << shortest(r.transmit_power) << ','
       << shortest(r.p_ris);
    for (double p : r.p_eu) os << ',' << shortest(p);
    os << ',' << shortest(r.L.x()) << ',' << shortest(r.L.y()) << ',' << shortest(r.L.z()) << ',' << r.c1 << ',' << r.c2 << ','
       << r.c3 << ',' << r.c4 << ',' << r.feasible() << '\n';
  }
  return os.str();
}

std::string channel_csv(const ChannelSet& ch) {
  std::ostringstream os;
  os << "band,kind,user,row,col,re,im\n";
  auto dump = [&](int k, const char* kind, int u, const CMat& M) {
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      for (Eigen::Index c = 0; c < M.cols(); ++c)
        os << k << ',' << kind << ',' << u << ',' << r << ',' << c << ',' << shortest(M(r, c).real()) << ','
           << shortest(M(r, c).imag()) << '\n';
  };
  for (int k = 0; k < ch.subbands(); ++k) {
    dump(k, "HR", -1, ch.bands[k].ris_matrix());
    for (std::size_t u = 0; u < ch.bands[k].links.size(); ++u) {
      const auto& l = ch.bands[k].links[u];
      dump(k, "H", static_cast<int>(u), l.H);
      dump(k, "G", static_cast<int>(u), l.G);
      dump(k, "Z", static_cast<int>(u), l.Z);
    }
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace stipt
