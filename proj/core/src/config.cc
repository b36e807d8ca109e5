//
// Copyright 2026 The ldpkm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "ldpkm/config.h"

#include <set>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "boost/property_tree/ini_parser.hpp"
#include "boost/property_tree/ptree.hpp"
#include "ldpkm/point_io.h"

namespace ldpkm {
namespace {

using boost::property_tree::ptree;

std::string ToText(double v) { return FormatDouble(v); }
std::string ToText(uint64_t v) { return absl::StrCat(v); }
std::string ToText(uint32_t v) { return absl::StrCat(v); }
std::string ToText(bool v) { return v ? "true" : "false"; }
std::string ToText(const std::string& v) { return v; }
std::string ToText(Mode v) { return v == Mode::kTheory ? "theory" : "desk"; }
std::string ToText(Objective v) { return absl::StrCat(Exponent(v)); }
std::string ToText(SolverMethod v) {
  return v == SolverMethod::kLocalSearch ? "local_search" : "kmeanspp_lloyd";
}

bool FromText(const std::string& s, double& v) { return absl::SimpleAtod(s, &v); }
bool FromText(const std::string& s, uint64_t& v) { return absl::SimpleAtoi(s, &v); }
bool FromText(const std::string& s, uint32_t& v) { return absl::SimpleAtoi(s, &v); }
bool FromText(const std::string& s, bool& v) { return absl::SimpleAtob(s, &v); }
bool FromText(const std::string& s, std::string& v) {
  v = s;
  return true;
}
bool FromText(const std::string& s, Mode& v) {
  if (s == "theory") v = Mode::kTheory;
  else if (s == "desk") v = Mode::kDesk;
  else return false;
  return true;
}
bool FromText(const std::string& s, Objective& v) {
  if (s == "1") v = Objective::kMedian;
  else if (s == "2") v = Objective::kMeans;
  else return false;
  return true;
}
bool FromText(const std::string& s, SolverMethod& v) {
  if (s == "local_search") v = SolverMethod::kLocalSearch;
  else if (s == "kmeanspp_lloyd") v = SolverMethod::kKMeansPPLloyd;
  else return false;
  return true;
}

// size_t is unsigned long on the supported platforms, distinct from
// uint64_t only in spelling; route it through uint64_t.
struct SizeRef {
  size_t& v;
};
std::string ToText(SizeRef r) { return absl::StrCat(r.v); }
bool FromText(const std::string& s, SizeRef r) {
  uint64_t x = 0;
  if (!absl::SimpleAtoi(s, &x)) return false;
  r.v = static_cast<size_t>(x);
  return true;
}

// Visits every field once; the same list drives emit, parse and overrides.
template <typename F>
void VisitFields(ExperimentConfig& c, F&& f) {
  PipelineConfig& p = c.pipeline;
  f("data.n", c.n);
  f("data.d", SizeRef{c.d});
  f("data.lambda", c.lambda);
  f("data.seed", c.seed);
  f("generator.components", SizeRef{c.generator.components});
  f("generator.sigma", c.generator.sigma);
  f("generator.separation", c.generator.separation);
  f("generator.means_radius", c.generator.means_radius);
  f("generator.background", c.generator.background);
  f("privacy.epsilon", p.epsilon);
  f("privacy.delta", p.delta);
  f("privacy.beta", p.beta);
  f("pipeline.mode", p.mode);
  f("pipeline.k", SizeRef{p.k});
  f("pipeline.p", p.objective);
  f("pipeline.a", p.a);
  f("pipeline.b", p.b);
  f("pipeline.radius_top", p.radius_top);
  f("pipeline.radius_levels", SizeRef{p.radius_levels});
  f("pipeline.share_sweep", p.share_sweep);
  f("pipeline.share_weights_a", p.share_weights_a);
  f("pipeline.share_weights_b", p.share_weights_b);
  f("pipeline.c_t", p.c_t);
  f("pipeline.t", p.t);
  f("pipeline.c_W", p.c_W);
  f("pipeline.repetitions", SizeRef{p.repetitions});
  f("pipeline.max_list", SizeRef{p.max_list});
  f("pipeline.max_bins", p.max_bins);
  f("pipeline.noise_off", p.simulation.noise_off);
  f("pipeline.per_user_reports", p.simulation.per_user_reports);
  f("pipeline.instrument", p.instrument);
  f("thresholds.heavy_select", p.thresholds.heavy_select);
  f("thresholds.list_cap", p.thresholds.list_cap);
  f("thresholds.validate", p.thresholds.validate);
  f("thresholds.capture", p.thresholds.capture);
  f("thresholds.interval_scale", p.thresholds.interval_scale);
  f("thresholds.sigma_multiplier", p.thresholds.sigma_multiplier);
  f("thresholds.reliability", p.thresholds.reliability);
  f("lsh.relaxed", p.relaxed_lsh);
  f("lsh.p", p.lsh_p);
  f("lsh.q", p.lsh_q);
  f("lsh.p_margin", p.lsh.p_margin);
  f("lsh.max_k", p.lsh.max_k);
  f("lsh.max_c", p.lsh.max_c);
  f("solver.method", p.solver.method);
  f("solver.restarts", p.solver.restarts);
  f("solver.max_iters", p.solver.max_iters);
  f("solver.tol", p.solver.tol);
  f("solver.weiszfeld_iters", p.solver.weiszfeld_iters);
  f("solver.weiszfeld_tol", p.solver.weiszfeld_tol);
  f("eval.ratio_cap", c.ratio_cap);
  f("output.dir", c.output);
}

}  // namespace

absl::Status SetConfigValue(ExperimentConfig& config, const std::string& key,
                            const std::string& value) {
  bool found = false;
  bool ok = true;
  const std::string v(absl::StripAsciiWhitespace(value));
  VisitFields(config, [&](const char* name, auto&& field) {
    if (key != name) return;
    found = true;
    ok = FromText(v, field);
  });
  if (!found) return absl::InvalidArgumentError(absl::StrCat("unknown key ", key));
  if (!ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad value for ", key, ": '", value, "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseConfig(const std::string& text) {
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config: key outside a section: ", section));
    }
    for (const auto& [key, value] : body) {
      auto s = SetConfigValue(config, section + "." + key, value.data());
      if (!s.ok()) return s;
    }
  }
  return config;
}

std::string EmitConfig(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  std::string out;
  std::string section;
  VisitFields(copy, [&](const char* name, auto&& field) {
    const std::string full(name);
    const size_t dot = full.find('.');
    const std::string sec = full.substr(0, dot);
    if (sec != section) {
      absl::StrAppend(&out, out.empty() ? "" : "\n", "[", sec, "]\n");
      section = sec;
    }
    absl::StrAppend(&out, full.substr(dot + 1), " = ", ToText(field), "\n");
  });
  return out;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  auto text = ReadTextFile(path);
  if (!text.ok()) return text.status();
  return ParseConfig(*text);
}

}  // namespace ldpkm
