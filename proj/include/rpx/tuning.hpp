#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpx/config.hpp"
#include "rpx/io.hpp"
#include "rpx/metrics.hpp"
#include "rpx/odometry.hpp"

namespace rpx {

struct ParamAxis {
  std::string key;
  std::vector<double> values;
};

/// Coarse-to-fine sweep protocol: evaluate the coarse grid on the training
/// sequences, then refine each tuned parameter around the incumbent with a
/// step of (coarse step / fine_divisions) within one coarse step each way.
struct SweepSpec {
  ExtractorConfig base;
  std::vector<ParamAxis> coarse;
  bool fine_stage = true;
  std::uint32_t fine_divisions = 5;
  std::vector<std::string> train;
  std::vector<std::string> test;

  void validate() const {
    rpx::validate(base);
    if (coarse.empty()) throw std::invalid_argument("SweepSpec: no coarse axes");
    for (const auto& axis : coarse)
      if (axis.values.empty()) throw std::invalid_argument("SweepSpec: empty grid for " + axis.key);
    if (train.empty()) throw std::invalid_argument("SweepSpec: no training sequences");
    for (const auto& t : test)
      if (std::find(train.begin(), train.end(), t) != train.end())
        throw std::invalid_argument("SweepSpec: train and test sets overlap on " + t);
    if (fine_divisions < 2) throw std::invalid_argument("SweepSpec: fine_divisions must be >= 2");
  }
};

struct SequenceEval {
  std::string name;
  bool failed = false;
  double ate_percent = 0.0;
  double are_deg_per_m = 0.0;
  double runtime_ms = 0.0;
  double points = 0.0;
};

struct ComboEval {
  ExtractorConfig config;
  std::vector<double> param_values;  // one per axis, sweep order
  std::string stage;                 // "coarse" or "fine"
  bool failed = false;
  double ate_percent = 0.0;     // mean over sequences
  double are_deg_per_m = 0.0;
  double runtime_ms = 0.0;
  double points = 0.0;
  std::vector<SequenceEval> sequences;
};

struct SweepResult {
  std::vector<ComboEval> rows;
  std::ptrdiff_t incumbent = -1;

  const ComboEval& incumbent_row() const {
    if (incumbent < 0) throw std::runtime_error("sweep produced no successful combo");
    return rows[static_cast<std::size_t>(incumbent)];
  }
};

namespace detail {

inline ComboEval evaluate_combo(const ExtractorConfig& cfg,
                                const std::vector<std::string>& sequences,
                                const std::filesystem::path& dataset_dir,
                                const IcpConfig& icp_cfg) {
  ComboEval eval;
  eval.config = cfg;
  double ate = 0.0, are = 0.0, rt = 0.0, pts = 0.0;
  for (const auto& name : sequences) {
    SequenceEval se;
    se.name = name;
    const auto seq_dir = dataset_dir / name;
    try {
      const auto scans = list_scan_files(seq_dir);
      const Trajectory gt = read_trajectory_csv(seq_dir / "gt.csv");
      const OdometryResult odom = run_odometry(scans, cfg, icp_cfg);
      const OdomErrorReport report = kitti_errors(gt, odom.trajectory);
      if (!report.valid) {
        se.failed = true;
      } else {
        const RuntimeReport rr = runtime_report(odom.frames);
        se.ate_percent = report.ate_percent;
        se.are_deg_per_m = report.are_deg_per_m;
        se.runtime_ms = rr.mean_extract_ms;
        se.points = rr.mean_points;
      }
    } catch (const std::exception&) {
      se.failed = true;
    }
    eval.failed = eval.failed || se.failed;
    eval.sequences.push_back(std::move(se));
  }
  if (!eval.failed && !sequences.empty()) {
    for (const auto& se : eval.sequences) {
      ate += se.ate_percent;
      are += se.are_deg_per_m;
      rt += se.runtime_ms;
      pts += se.points;
    }
    const auto n = static_cast<double>(sequences.size());
    eval.ate_percent = ate / n;
    eval.are_deg_per_m = are / n;
    eval.runtime_ms = rt / n;
    eval.points = pts / n;
  }
  return eval;
}

/// Argmin of training ATE; ties break toward lower ARE, then lower runtime.
inline std::ptrdiff_t pick_incumbent(const std::vector<ComboEval>& rows) {
  std::ptrdiff_t best = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].failed) continue;
    if (best < 0) {
      best = static_cast<std::ptrdiff_t>(i);
      continue;
    }
    const auto& b = rows[best];
    const auto& r = rows[i];
    const bool better = r.ate_percent < b.ate_percent ||
                        (r.ate_percent == b.ate_percent &&
                         (r.are_deg_per_m < b.are_deg_per_m ||
                          (r.are_deg_per_m == b.are_deg_per_m && r.runtime_ms < b.runtime_ms)));
    if (better) best = static_cast<std::ptrdiff_t>(i);
  }
  return best;
}

inline std::vector<std::vector<double>> cartesian_product(
    const std::vector<std::vector<double>>& axes) {
  std::vector<std::vector<double>> combos{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    next.reserve(combos.size() * axis.size());
    for (const auto& prefix : combos)
      for (double v : axis) {
        auto c = prefix;
        c.push_back(v);
        next.push_back(std::move(c));
      }
    combos = std::move(next);
  }
  return combos;
}

}  // namespace detail

/// Runs the full protocol. Every coarse combo is evaluated on the training
/// sequences; one fine stage then refines around the incumbent. Failed
/// combos stay in the table but are excluded from the argmin.
inline SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& dataset_dir,
                             const IcpConfig& icp_cfg) {
  spec.validate();
  icp_cfg.validate();

  // Out-of-domain combos (a fine step can undershoot a positivity bound)
  // surface as failed rows via run_odometry's validation, not as errors.
  auto apply = [&spec](const std::vector<double>& values) {
    ExtractorConfig cfg = spec.base;
    for (std::size_t k = 0; k < values.size(); ++k)
      set_extractor_param(cfg, spec.coarse[k].key, values[k]);
    return cfg;
  };

  SweepResult result;
  // Counts round to integers inside the config; dedupe on the configuration
  // actually applied, not the raw grid values.
  std::set<std::string> seen;

  std::vector<std::vector<double>> coarse_axes;
  for (const auto& axis : spec.coarse) {
    auto values = axis.values;
    std::sort(values.begin(), values.end());
    coarse_axes.push_back(std::move(values));
  }

  for (const auto& combo : detail::cartesian_product(coarse_axes)) {
    const ExtractorConfig cfg = apply(combo);
    if (!seen.insert(format_extractor_config(cfg)).second) continue;
    ComboEval eval = detail::evaluate_combo(cfg, spec.train, dataset_dir, icp_cfg);
    eval.param_values = combo;
    eval.stage = "coarse";
    result.rows.push_back(std::move(eval));
  }
  result.incumbent = detail::pick_incumbent(result.rows);

  if (spec.fine_stage && result.incumbent >= 0) {
    const auto center = result.rows[result.incumbent].param_values;
    std::vector<std::vector<double>> fine_axes;
    for (std::size_t k = 0; k < spec.coarse.size(); ++k) {
      const auto& grid = coarse_axes[k];
      std::vector<double> axis{center[k]};
      if (grid.size() > 1) {
        const auto pos = std::lower_bound(grid.begin(), grid.end(), center[k]) - grid.begin();
        const double step_lo =
            pos > 0 ? grid[pos] - grid[pos - 1] : grid[pos + 1] - grid[pos];
        const double step_hi = static_cast<std::size_t>(pos) + 1 < grid.size()
                                   ? grid[pos + 1] - grid[pos]
                                   : step_lo;
        for (std::uint32_t j = 1; j < spec.fine_divisions; ++j) {
          axis.push_back(center[k] - step_lo * j / spec.fine_divisions);
          axis.push_back(center[k] + step_hi * j / spec.fine_divisions);
        }
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
      }
      fine_axes.push_back(std::move(axis));
    }
    for (const auto& combo : detail::cartesian_product(fine_axes)) {
      const ExtractorConfig cfg = apply(combo);
      if (!seen.insert(format_extractor_config(cfg)).second) continue;
      ComboEval eval = detail::evaluate_combo(cfg, spec.train, dataset_dir, icp_cfg);
      eval.param_values = combo;
      eval.stage = "fine";
      result.rows.push_back(std::move(eval));
    }
    result.incumbent = detail::pick_incumbent(result.rows);
  }
  return result;
}

/// Runs the incumbent configuration on the held-out test sequences.
inline ComboEval evaluate_on_test(const ExtractorConfig& incumbent, const SweepSpec& spec,
                                  const std::filesystem::path& dataset_dir,
                                  const IcpConfig& icp_cfg) {
  if (spec.test.empty()) throw std::invalid_argument("evaluate_on_test: empty test list");
  ComboEval eval = detail::evaluate_combo(incumbent, spec.test, dataset_dir, icp_cfg);
  eval.stage = "test";
  return eval;
}

// ---------------------------------------------------------------------------
// Serialization: the spec file is JSON; results go to CSV + JSON and the
// incumbent to a reusable flat key-value config file.
// ---------------------------------------------------------------------------

inline SweepSpec parse_sweep_spec(const nlohmann::json& j) {
  SweepSpec spec;
  spec.base = ExtractorConfig{default_params(parse_kind(j.at("extractor").get<std::string>())),
                              CfarWindow{}};
  if (j.contains("fixed"))
    for (const auto& [key, value] : j.at("fixed").items())
      set_extractor_param(spec.base, key, value.get<double>());
  for (const auto& [key, values] : j.at("coarse").items())
    spec.coarse.push_back({key, values.get<std::vector<double>>()});
  std::sort(spec.coarse.begin(), spec.coarse.end(),
            [](const ParamAxis& a, const ParamAxis& b) { return a.key < b.key; });
  if (j.contains("fine")) spec.fine_stage = j.at("fine").get<bool>();
  if (j.contains("fine_divisions")) spec.fine_divisions = j.at("fine_divisions").get<std::uint32_t>();
  spec.train = j.at("train").get<std::vector<std::string>>();
  if (j.contains("test")) spec.test = j.at("test").get<std::vector<std::string>>();
  spec.validate();
  return spec;
}

inline SweepSpec read_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep spec " + path.string());
  nlohmann::json j;
  in >> j;
  return parse_sweep_spec(j);
}

inline void write_sweep_csv(const SweepResult& result, const SweepSpec& spec,
                            const std::filesystem::path& path) {
  std::string out = "stage,config";
  for (const auto& axis : spec.coarse) out += "," + axis.key;
  out += ",failed,ate_percent,are_deg_per_m,runtime_ms,points,incumbent\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    out += row.stage;
    out += ",\"" + format_extractor_config(row.config) + "\"";
    for (double v : row.param_values) out += "," + detail::format_param(v);
    out += row.failed ? ",1" : ",0";
    out += "," + detail::format_sig(row.ate_percent, 9);
    out += "," + detail::format_sig(row.are_deg_per_m, 9);
    out += "," + detail::format_sig(row.runtime_ms, 9);
    out += "," + detail::format_sig(row.points, 9);
    out += (static_cast<std::ptrdiff_t>(i) == result.incumbent) ? ",1\n" : ",0\n";
  }
  detail::write_file_bytes(path, out);
}

inline nlohmann::json sweep_result_json(const SweepResult& result, const SweepSpec& spec) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) {
    nlohmann::json r;
    r["stage"] = row.stage;
    r["config"] = format_extractor_config(row.config);
    nlohmann::json params;
    for (std::size_t k = 0; k < row.param_values.size(); ++k)
      params[spec.coarse[k].key] = row.param_values[k];
    r["params"] = params;
    r["failed"] = row.failed;
    r["ate_percent"] = row.ate_percent;
    r["are_deg_per_m"] = row.are_deg_per_m;
    r["runtime_ms"] = row.runtime_ms;
    r["points"] = row.points;
    nlohmann::json seqs = nlohmann::json::array();
    for (const auto& se : row.sequences)
      seqs.push_back({{"name", se.name},
                      {"failed", se.failed},
                      {"ate_percent", se.ate_percent},
                      {"are_deg_per_m", se.are_deg_per_m}});
    r["sequences"] = seqs;
    rows.push_back(std::move(r));
  }
  nlohmann::json j;
  j["rows"] = std::move(rows);
  j["incumbent"] = result.incumbent;
  if (result.incumbent >= 0)
    j["incumbent_config"] = format_extractor_config(result.incumbent_row().config);
  return j;
}

}  // namespace rpx
