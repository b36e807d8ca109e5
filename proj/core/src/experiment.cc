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

#include "ldpkm/experiment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <set>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "ldpkm/point_io.h"

namespace ldpkm {
namespace {

std::vector<double> UniformInBall(size_t d, double radius, Rng& rng) {
  std::vector<double> x(d);
  double norm = 0.0;
  do {
    for (double& v : x) v = rng.Normal();
    norm = Norm(x);
  } while (norm == 0.0);
  const double scale = radius * std::pow(rng.Uniform(), 1.0 / d) / norm;
  for (double& v : x) v *= scale;
  return x;
}

struct MeanCi {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

MeanCi Summarize(const std::vector<double>& v) {
  MeanCi out;
  if (v.empty()) {
    out.mean = out.low = out.high = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double var = 0.0;
  for (double x : v) out.mean += x;
  out.mean /= v.size();
  for (double x : v) var += (x - out.mean) * (x - out.mean);
  var = v.size() > 1 ? var / (v.size() - 1) : 0.0;
  const double half = 1.959963984540054 * std::sqrt(var / v.size());
  out.low = out.mean - half;
  out.high = out.mean + half;
  return out;
}

absl::StatusOr<VectorList> ReadCentersCsv(const std::string& path) {
  auto text = ReadTextFile(path);
  if (!text.ok()) return text.status();
  std::vector<std::string> lines =
      absl::StrSplit(*text, '\n', absl::SkipWhitespace());
  if (lines.size() < 2) return absl::InvalidArgumentError("no centers in " + path);
  const size_t d = std::vector<std::string>(absl::StrSplit(lines[0], ',')).size();
  VectorList out(d);
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> fields = absl::StrSplit(lines[i], ',');
    if (fields.size() != d) {
      return absl::InvalidArgumentError(absl::StrCat("bad centers row ", i));
    }
    std::vector<double> row(d);
    for (size_t j = 0; j < d; ++j) {
      if (!absl::SimpleAtod(fields[j], &row[j])) {
        return absl::InvalidArgumentError(absl::StrCat("bad centers value row ", i));
      }
    }
    out.Append(row);
  }
  return out;
}

}  // namespace

absl::StatusOr<GeneratedData> GenerateMixture(uint64_t n, size_t d,
                                              double lambda,
                                              const GeneratorSpec& spec,
                                              Rng& rng) {
  if (n == 0 || d == 0) return absl::InvalidArgumentError("n and d must be positive");
  if (!(lambda > 0.0)) return absl::InvalidArgumentError("Lambda must be positive");
  if (spec.components == 0) return absl::InvalidArgumentError("no components");
  if (spec.sigma < 0.0 || spec.background < 0.0 || spec.background > 1.0) {
    return absl::InvalidArgumentError("bad sigma or background fraction");
  }
  const double means_radius =
      spec.means_radius < 0.0 ? lambda - 3.0 * spec.sigma : spec.means_radius;
  if (means_radius < 0.0 || means_radius > lambda) {
    return absl::FailedPreconditionError(absl::StrCat(
        "infeasible mixture: means radius ", means_radius, " outside [0, Lambda]"));
  }
  const double min_sep = spec.separation * spec.sigma;
  GeneratedData out;
  out.means = VectorList(d);
  Rng mean_rng = rng.Fork("means");
  for (size_t c = 0; c < spec.components; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      std::vector<double> m = means_radius > 0.0
                                  ? UniformInBall(d, means_radius, mean_rng)
                                  : std::vector<double>(d, 0.0);
      bool ok = true;
      for (size_t j = 0; j < out.means.size() && ok; ++j) {
        ok = Distance(m, out.means[j]) >= min_sep;
      }
      if (ok) {
        out.means.Append(m);
        placed = true;
      }
    }
    if (!placed) {
      return absl::FailedPreconditionError(absl::StrCat(
          "infeasible mixture: cannot place ", spec.components,
          " means at separation ", min_sep, " in radius ", means_radius));
    }
  }
  std::vector<double> coords;
  coords.reserve(n * d);
  out.labels.reserve(n);
  Rng point_rng = rng.Fork("points");
  std::vector<double> x(d);
  for (uint64_t i = 0; i < n; ++i) {
    if (spec.background > 0.0 && point_rng.Bernoulli(spec.background)) {
      x = UniformInBall(d, lambda, point_rng);
      out.labels.push_back(static_cast<uint32_t>(spec.components));
    } else {
      const size_t c = point_rng.UniformInt(spec.components);
      bool inside = false;
      for (int attempt = 0; attempt < 1000 && !inside; ++attempt) {
        for (size_t j = 0; j < d; ++j) {
          x[j] = out.means[c][j] + spec.sigma * point_rng.Normal();
        }
        inside = Norm(x) <= lambda;
      }
      if (!inside) {
        return absl::FailedPreconditionError(
            "infeasible mixture: component mass outside the ball");
      }
      out.labels.push_back(static_cast<uint32_t>(c));
    }
    coords.insert(coords.end(), x.begin(), x.end());
  }
  auto points = PointSet::Create(d, lambda, std::move(coords));
  if (!points.ok()) return points.status();
  out.points = *std::move(points);
  return out;
}

absl::StatusOr<GeneratedData> GenerateMixture(const ExperimentConfig& config) {
  Rng rng = Rng(config.seed).Fork("gen");
  return GenerateMixture(config.n, config.d, config.lambda, config.generator,
                         rng);
}

absl::StatusOr<PlantedCluster> PlantCluster(uint64_t n, size_t d, double lambda,
                                            uint64_t size, double radius,
                                            Rng& rng) {
  if (size > n) return absl::InvalidArgumentError("cluster larger than n");
  if (!(radius > 0.0) || radius > lambda / 2.0) {
    return absl::InvalidArgumentError("cluster radius must lie in (0, Lambda/2]");
  }
  PlantedCluster out;
  out.center = UniformInBall(d, lambda / 2.0, rng);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order);
  std::vector<bool> planted(n, false);
  for (uint64_t j = 0; j < size; ++j) planted[order[j]] = true;
  std::vector<double> coords;
  coords.reserve(n * d);
  for (uint64_t i = 0; i < n; ++i) {
    std::vector<double> x = UniformInBall(d, planted[i] ? radius : lambda, rng);
    if (planted[i]) {
      for (size_t j = 0; j < d; ++j) x[j] += out.center[j];
      out.members.push_back(static_cast<uint32_t>(i));
    }
    coords.insert(coords.end(), x.begin(), x.end());
  }
  auto points = PointSet::Create(d, lambda, std::move(coords));
  if (!points.ok()) return points.status();
  out.points = *std::move(points);
  return out;
}

uint64_t PointsDigest(const PointSet& points) {
  return Fnv1a64(FormatPoints(points));
}

absl::StatusOr<double> BaselineCost(const ExperimentConfig& config,
                                    const PointSet& points) {
  Rng rng = Rng(config.seed).Fork("baseline");
  auto solved = Solve(WeightedPointSet::Unit(points), config.pipeline.k,
                      config.pipeline.objective, config.pipeline.solver, rng);
  if (!solved.ok()) return solved.status();
  auto cost = Cost(points, solved->centers, config.pipeline.objective);
  if (!cost.ok()) return cost.status();
  return *cost;
}

absl::StatusOr<RunOutcome> RunPipeline(const ExperimentConfig& config,
                                       const PointSet& points,
                                       std::optional<double> baseline_cost) {
  RunOutcome out;
  Rng rng = Rng(config.seed).Fork("run");
  auto res = WeightedCenters(points, config.pipeline, rng, &out.transcript);
  if (!res.ok()) return res.status();
  out.result = *std::move(res);
  auto cost = Cost(points, out.result.solve->centers, config.pipeline.objective);
  if (!cost.ok()) return cost.status();
  out.cost_private = *cost;
  if (config.pipeline.instrument) {
    if (!baseline_cost.has_value()) {
      auto base = BaselineCost(config, points);
      if (!base.ok()) return base.status();
      baseline_cost = *base;
    }
    Rng audit_rng = Rng(config.seed).Fork("audit");
    auto claims = AuditClaims(points, config.pipeline, out.result, audit_rng,
                              baseline_cost);
    if (!claims.ok()) return claims.status();
    out.claims = *std::move(claims);
  }
  return out;
}

absl::Status WriteRunArtifacts(const std::string& dir,
                               const ExperimentConfig& config,
                               const PointSet& points, const RunOutcome& run) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::InternalError("cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  auto write = [&](const char* name, const std::string& text) {
    return WriteTextFile((base / name).string(), text);
  };
  const PipelineResult& res = run.result;
  const size_t rounds = run.transcript.RoundCount();
  auto cap = PrivacyBudget::Create(config.pipeline.epsilon, config.pipeline.delta);
  if (!cap.ok()) return cap.status();
  const bool within = res.ledger.FitsWithin(*cap);
  std::string manifest = absl::StrCat(
      "[run]\nn = ", points.size(), "\nd = ", points.dim(),
      "\npoints_digest = ", PointsDigest(points), "\nrounds = ", rounds,
      "\nledger_epsilon = ", FormatDouble(res.ledger.total_epsilon().convert_to<double>()),
      "\nledger_delta = ", FormatDouble(res.ledger.total_delta().convert_to<double>()),
      "\nledger_within_budget = ", within ? "true" : "false",
      "\ncandidates = ", res.candidates.size(), "\nw = ", res.w.size(),
      "\nt = ", FormatDouble(res.t), "\ntheta_w = ", FormatDouble(res.theta_w),
      "\ncost_private = ", FormatDouble(run.cost_private), "\n");
  std::string audit = "claim,quantity,value\n";
  if (run.claims.has_value()) {
    audit = run.claims->ToCsv();
  }
  absl::StrAppend(&audit, "budget,total_epsilon,",
                  FormatDouble(res.ledger.total_epsilon().convert_to<double>()),
                  "\nbudget,total_delta,",
                  FormatDouble(res.ledger.total_delta().convert_to<double>()),
                  "\nbudget,within_cap,", within ? 1 : 0, "\nrounds,count,",
                  rounds, "\n");
  for (auto s : {write("config.ini", EmitConfig(config)),
                 write("manifest.ini", manifest),
                 write("ledger.csv", res.ledger.ToCsv()),
                 write("candidates.csv", res.CandidatesCsv()),
                 write("centers.csv", res.CentersCsv()),
                 write("audit.csv", audit),
                 run.transcript.WriteFile((base / "transcript.ldpt").string())}) {
    if (!s.ok()) return s;
  }
  for (size_t ri = 0; ri < res.sweep.size(); ++ri) {
    auto s = WriteTextFile((base / absl::StrCat("goodcenters_r", ri, ".csv")).string(),
                           res.sweep[ri].ToCsv(points.dim()));
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<EvalMetrics> Evaluate(const std::string& dir,
                                     const PointSet& points) {
  const std::filesystem::path base(dir);
  auto config = LoadConfig((base / "config.ini").string());
  if (!config.ok()) return config.status();
  auto manifest = ReadTextFile((base / "manifest.ini").string());
  if (!manifest.ok()) return manifest.status();
  const std::string want = absl::StrCat("points_digest = ", PointsDigest(points), "\n");
  const std::string want_nd =
      absl::StrCat("n = ", points.size(), "\nd = ", points.dim(), "\n");
  if (manifest->find(want) == std::string::npos ||
      manifest->find(want_nd) == std::string::npos) {
    return absl::FailedPreconditionError(
        "run artifacts do not match the point file (n, d or digest differ)");
  }
  auto centers = ReadCentersCsv((base / "centers.csv").string());
  if (!centers.ok()) return centers.status();
  auto set = CenterSet::FromList(*centers);
  if (!set.ok()) return set.status();
  if (set->dim() != points.dim()) {
    return absl::FailedPreconditionError("centers dimension mismatch");
  }
  const Objective p = config->pipeline.objective;
  EvalMetrics m;
  auto cost = Cost(points, *set, p);
  if (!cost.ok()) return cost.status();
  m.cost_private = *cost;
  auto base_cost = BaselineCost(*config, points);
  if (!base_cost.ok()) return base_cost.status();
  m.cost_baseline = *base_cost;
  m.ratio = m.cost_baseline > 0.0
                ? m.cost_private / m.cost_baseline
                : (m.cost_private > 0.0 ? std::numeric_limits<double>::infinity()
                                        : 1.0);
  m.additive_residual = m.cost_private - config->ratio_cap * m.cost_baseline;
  // Duplicate points add nothing to the candidate pool.
  std::set<std::vector<double>> distinct;
  for (size_t i = 0; i < points.size(); ++i) {
    distinct.emplace(points[i].begin(), points[i].end());
  }
  VectorList pool(points.dim());
  for (const auto& x : distinct) pool.Append(x);
  auto opt = OptOracle(points, config->pipeline.k, p, pool);
  if (opt.ok()) m.opt_discrete = opt->cost;
  return m;
}

std::string EvalCsv(const EvalMetrics& m) {
  return absl::StrCat(
      "cost_private,cost_baseline,ratio,additive_residual,opt_discrete\n",
      FormatDouble(m.cost_private), ",", FormatDouble(m.cost_baseline), ",",
      FormatDouble(m.ratio), ",", FormatDouble(m.additive_residual), ",",
      m.opt_discrete ? FormatDouble(*m.opt_discrete) : "", "\n");
}

std::pair<double, double> LogLogFit(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {slope, (sy - slope * sx) / m};
}

absl::StatusOr<ScaleReport> Scale(const ExperimentConfig& base,
                                  const std::vector<uint64_t>& n_grid,
                                  size_t seeds) {
  if (n_grid.size() < 4) {
    return absl::FailedPreconditionError("scale needs at least 4 grid points");
  }
  if (seeds == 0) return absl::InvalidArgumentError("seeds must be positive");
  ScaleReport report;
  const Rng root = Rng(base.seed).Fork("scale");
  for (uint64_t n : n_grid) {
    ScaleCell cell;
    cell.n = n;
    for (size_t s = 0; s < seeds; ++s) {
      ExperimentConfig cfg = base;
      cfg.n = n;
      // A fixed desk threshold is given for the template size; keep t / n.
      if (base.pipeline.t > 0.0) {
        cfg.pipeline.t = base.pipeline.t * static_cast<double>(n) /
                         static_cast<double>(base.n);
      }
      cfg.pipeline.instrument = false;
      cfg.seed = root.Fork(n).Fork(s).NextU64();
      auto data = GenerateMixture(cfg);
      if (!data.ok()) return data.status();
      auto baseline = BaselineCost(cfg, data->points);
      if (!baseline.ok()) return baseline.status();
      auto run = RunPipeline(cfg, data->points);
      if (!run.ok()) {
        if (absl::IsFailedPrecondition(run.status())) {
          ++cell.refused;
          continue;
        }
        return run.status();
      }
      cell.residuals.push_back(run->cost_private - cfg.ratio_cap * *baseline);
    }
    const MeanCi s = Summarize(cell.residuals);
    cell.mean = s.mean;
    cell.ci_low = s.low;
    cell.ci_high = s.high;
    if (cell.refused > 0) report.flag = "partial";
    report.cells.push_back(std::move(cell));
  }
  std::vector<double> xs, ys;
  bool flat = false;
  for (const auto& c : report.cells) {
    if (!(c.mean > 0.0)) flat = true;
    xs.push_back(static_cast<double>(c.n));
    ys.push_back(c.mean);
  }
  if (flat) {
    report.flag = "flat";
    report.slope = report.intercept = std::numeric_limits<double>::quiet_NaN();
  } else {
    std::tie(report.slope, report.intercept) = LogLogFit(xs, ys);
  }
  return report;
}

std::string ScaleCsv(const ScaleReport& report) {
  std::string out = "n,seeds,mean_residual,ci95_low,ci95_high,refused\n";
  for (const auto& c : report.cells) {
    absl::StrAppend(&out, c.n, ",", c.residuals.size(), ",", FormatDouble(c.mean),
                    ",", FormatDouble(c.ci_low), ",", FormatDouble(c.ci_high), ",",
                    c.refused, "\n");
  }
  return out;
}

}  // namespace ldpkm
