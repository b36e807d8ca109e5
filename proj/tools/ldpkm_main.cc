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

// ldpkm: data generation, private clustering runs, evaluation, scaling
// studies, the lower-bound experiment and privacy audits.
//
// Exit codes: 0 success, 2 refusal (a precondition or feasibility check
// failed), 1 error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "ldpkm/config.h"
#include "ldpkm/dp_audit.h"
#include "ldpkm/experiment.h"
#include "ldpkm/lower_bound.h"
#include "ldpkm/point_io.h"
#include "ldpkm/selftest.h"

namespace {

using ldpkm::ExperimentConfig;

int Report(const absl::Status& s) {
  if (s.ok()) return 0;
  const bool refusal = absl::IsFailedPrecondition(s) ||
                       absl::IsResourceExhausted(s) ||
                       absl::IsOutOfRange(s);
  std::cerr << (refusal ? "refused" : "error") << " ["
            << absl::StatusCodeToString(s.code()) << "]: " << s.message()
            << "\n";
  return refusal ? 2 : 1;
}

// Config file, generic overrides and flags mirroring the common fields.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> direct;

  void Attach(CLI::App* app) {
    app->add_option("--config", file, "key=value config file with sections");
    app->add_option("--set", sets, "override, e.g. pipeline.k=5 (repeatable)");
    static const std::vector<std::pair<const char*, const char*>> kFlags = {
        {"--n", "data.n"},           {"--d", "data.d"},
        {"--lambda", "data.lambda"}, {"--seed", "data.seed"},
        {"--k", "pipeline.k"},       {"--p", "pipeline.p"},
        {"--a", "pipeline.a"},       {"--b", "pipeline.b"},
        {"--mode", "pipeline.mode"}, {"--epsilon", "privacy.epsilon"},
        {"--delta", "privacy.delta"}, {"--beta", "privacy.beta"},
        {"--noise-off", "pipeline.noise_off"},
        {"--instrument", "pipeline.instrument"},
    };
    for (const auto& [flag, key] : kFlags) {
      auto* opt = app->add_option_function<std::string>(
          flag,
          [this, key = std::string(key)](const std::string& v) {
            direct.emplace_back(key, v);
          },
          key);
      (void)opt;
    }
  }

  absl::StatusOr<ExperimentConfig> Build() const {
    ExperimentConfig config;
    if (!file.empty()) {
      auto loaded = ldpkm::LoadConfig(file);
      if (!loaded.ok()) return loaded.status();
      config = *loaded;
    }
    for (const auto& s : sets) {
      const size_t eq = s.find('=');
      if (eq == std::string::npos) {
        return absl::InvalidArgumentError("--set expects key=value: " + s);
      }
      auto st = ldpkm::SetConfigValue(config, s.substr(0, eq), s.substr(eq + 1));
      if (!st.ok()) return st;
    }
    for (const auto& [key, value] : direct) {
      auto st = ldpkm::SetConfigValue(config, key, value);
      if (!st.ok()) return st;
    }
    return config;
  }
};

absl::StatusOr<std::vector<uint64_t>> ParseGrid(const std::string& text) {
  std::vector<uint64_t> out;
  for (absl::string_view part : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    uint64_t v = 0;
    if (!absl::SimpleAtoi(part, &v)) {
      return absl::InvalidArgumentError(absl::StrCat("bad grid value '", part, "'"));
    }
    out.push_back(v);
  }
  return out;
}

absl::Status WriteOrPrint(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  return ldpkm::WriteTextFile(path, text);
}

absl::Status CmdGen(const ConfigFlags& flags, const std::string& out) {
  auto config = flags.Build();
  if (!config.ok()) return config.status();
  auto data = ldpkm::GenerateMixture(*config);
  if (!data.ok()) return data.status();
  if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
    std::string text;
    for (size_t i = 0; i < data->points.size(); ++i) {
      for (size_t j = 0; j < data->points.dim(); ++j) {
        absl::StrAppend(&text, j ? "," : "",
                        ldpkm::FormatDouble(data->points[i][j]));
      }
      text += "\n";
    }
    return ldpkm::WriteTextFile(out, text);
  }
  return ldpkm::WritePointFile(out, data->points);
}

absl::Status CmdRun(const ConfigFlags& flags, const std::string& points_path,
                    const std::string& out_dir) {
  auto config = flags.Build();
  if (!config.ok()) return config.status();
  auto points = ldpkm::ReadPointFile(points_path);
  if (!points.ok()) return points.status();
  const std::string dir = out_dir.empty() ? config->output : out_dir;
  auto run = ldpkm::RunPipeline(*config, *points);
  if (!run.ok()) return run.status();
  auto s = ldpkm::WriteRunArtifacts(dir, *config, *points, *run);
  if (!s.ok()) return s;
  const auto& res = run->result;
  std::cout << "artifacts: " << dir << "\n"
            << "candidates: " << res.candidates.size() << "  W: " << res.w.size()
            << "  rounds: " << run->transcript.RoundCount() << "\n"
            << "ledger epsilon: " << res.ledger.total_epsilon().convert_to<double>()
            << "  delta: " << res.ledger.total_delta().convert_to<double>() << "\n"
            << "cost_private: " << run->cost_private << "\n";
  return absl::OkStatus();
}

absl::Status CmdEval(const std::string& run_dir, const std::string& points_path,
                     const std::string& out) {
  auto points = ldpkm::ReadPointFile(points_path);
  if (!points.ok()) return points.status();
  auto m = ldpkm::Evaluate(run_dir, *points);
  if (!m.ok()) return m.status();
  return WriteOrPrint(out, ldpkm::EvalCsv(*m));
}

absl::Status CmdScale(const ConfigFlags& flags, const std::string& grid_text,
                      size_t seeds, const std::string& out) {
  auto config = flags.Build();
  if (!config.ok()) return config.status();
  auto grid = ParseGrid(grid_text);
  if (!grid.ok()) return grid.status();
  auto report = ldpkm::Scale(*config, *grid, seeds);
  if (!report.ok()) return report.status();
  auto s = WriteOrPrint(out, ldpkm::ScaleCsv(*report));
  if (!s.ok()) return s;
  std::cerr << "slope: " << report->slope << "  intercept: " << report->intercept
            << "  flag: " << report->flag << "\n";
  return absl::OkStatus();
}

absl::Status CmdLb(const ConfigFlags& flags, const std::string& grid_text,
                   size_t trials, const std::string& protocol,
                   const std::string& out) {
  auto config = flags.Build();
  if (!config.ok()) return config.status();
  auto grid = ParseGrid(grid_text);
  if (!grid.ok()) return grid.status();
  ldpkm::FloorOptions options;
  options.n_grid = *grid;
  options.trials = trials;
  options.p = config->pipeline.objective;
  ldpkm::ClusteringProtocol inner;
  if (protocol == "oblivious") {
    inner = ldpkm::ObliviousProtocol();
  } else if (protocol == "pipeline") {
    inner = ldpkm::PipelineProtocol(config->pipeline);
  } else {
    return absl::InvalidArgumentError("protocol must be oblivious or pipeline");
  }
  ldpkm::Rng rng = ldpkm::Rng(config->seed).Fork("lb");
  auto rows = ldpkm::FloorExperiment(options, inner, rng);
  if (!rows.ok()) return rows.status();
  return WriteOrPrint(out, ldpkm::FloorCsv(*rows));
}

absl::Status CmdAuditDp(const std::string& eps_text, const std::string& dom_text,
                        double delta, uint64_t samples, uint64_t seed,
                        const std::string& out) {
  std::vector<double> eps;
  for (absl::string_view part : absl::StrSplit(eps_text, ',', absl::SkipEmpty())) {
    double v = 0;
    if (!absl::SimpleAtod(part, &v)) return absl::InvalidArgumentError("bad epsilon list");
    eps.push_back(v);
  }
  auto domains = ParseGrid(dom_text);
  if (!domains.ok()) return domains.status();
  ldpkm::Rng rng = ldpkm::Rng(seed).Fork("audit-dp");
  const auto rows = ldpkm::DpAuditSuite(eps, *domains, delta, samples, rng);
  auto s = WriteOrPrint(out, ldpkm::DpAuditCsv(rows));
  if (!s.ok()) return s;
  size_t failed = 0;
  for (const auto& r : rows) failed += !r.passed;
  if (failed > 0) {
    return absl::FailedPreconditionError(
        absl::StrCat(failed, " of ", rows.size(), " audits failed"));
  }
  std::cerr << "all " << rows.size() << " audits passed\n";
  return absl::OkStatus();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ldpkm: locally private k-means / k-median simulator"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, run_flags, scale_flags, lb_flags;
  std::string gen_out = "points.txt";
  auto* gen = app.add_subcommand("gen", "sample a Gaussian mixture point file");
  gen_flags.Attach(gen);
  gen->add_option("-o,--out", gen_out, "point file (.csv for CSV)");

  std::string run_points, run_out;
  auto* run = app.add_subcommand("run", "run the private pipeline");
  run_flags.Attach(run);
  run->add_option("--points", run_points, "point file")->required();
  run->add_option("-o,--out", run_out, "artifact directory (default output.dir)");

  std::string eval_run, eval_points, eval_out;
  auto* eval = app.add_subcommand("eval", "evaluate a run against baselines");
  eval->add_option("--run", eval_run, "artifact directory")->required();
  eval->add_option("--points", eval_points, "point file")->required();
  eval->add_option("-o,--out", eval_out, "metrics CSV (default stdout)");

  std::string scale_grid = "16384,32768,65536,131072", scale_out;
  size_t scale_seeds = 20;
  auto* scale = app.add_subcommand("scale", "additive-error scaling study");
  scale_flags.Attach(scale);
  scale->add_option("--n-grid", scale_grid, "comma-separated n values");
  scale->add_option("--seeds", scale_seeds, "runs per n");
  scale->add_option("-o,--out", scale_out, "scaling CSV (default stdout)");

  std::string lb_grid = "4096", lb_protocol = "pipeline", lb_out;
  size_t lb_trials = 100;
  auto* lb = app.add_subcommand("lb", "lower-bound reduction experiment");
  lb_flags.Attach(lb);
  lb->add_option("--n-grid", lb_grid, "comma-separated n values");
  lb->add_option("--trials", lb_trials, "runs per cell");
  lb->add_option("--protocol", lb_protocol, "oblivious or pipeline");
  lb->add_option("-o,--out", lb_out, "CSV (default stdout)");

  bool selftest_verbose = false;
  auto* selftest = app.add_subcommand("selftest", "fast internal consistency checks");
  selftest->add_flag("-v,--verbose", selftest_verbose, "print details");

  std::string audit_eps = "0.1,0.5,1,2", audit_domains = "2,4,8,16", audit_out;
  double audit_delta = 1e-6;
  uint64_t audit_samples = 1000000, audit_seed = 1;
  auto* audit = app.add_subcommand("audit-dp", "privacy audits of the randomizers");
  audit->add_option("--epsilons", audit_eps, "comma-separated epsilons");
  audit->add_option("--domains", audit_domains, "oracle domain sizes (<= 16)");
  audit->add_option("--delta", audit_delta, "target delta for Gaussian reports");
  audit->add_option("--samples", audit_samples, "Monte-Carlo samples");
  audit->add_option("--seed", audit_seed, "root seed");
  audit->add_option("-o,--out", audit_out, "CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  absl::Status status;
  if (*gen) status = CmdGen(gen_flags, gen_out);
  else if (*run) status = CmdRun(run_flags, run_points, run_out);
  else if (*eval) status = CmdEval(eval_run, eval_points, eval_out);
  else if (*scale) status = CmdScale(scale_flags, scale_grid, scale_seeds, scale_out);
  else if (*lb) status = CmdLb(lb_flags, lb_grid, lb_trials, lb_protocol, lb_out);
  else if (*selftest) status = ldpkm::RunSelfTest(std::cout, selftest_verbose);
  else if (*audit) {
    status = CmdAuditDp(audit_eps, audit_domains, audit_delta, audit_samples,
                        audit_seed, audit_out);
  }
  return Report(status);
}
