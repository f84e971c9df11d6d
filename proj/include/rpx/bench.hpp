#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpx/config.hpp"
#include "rpx/io.hpp"
#include "rpx/metrics.hpp"
#include "rpx/odometry.hpp"

namespace rpx {

struct BenchRow {
  std::string name;
  std::string params;
  OdomErrorReport report;
  RuntimeReport runtime;
  std::uint32_t frames = 0;
  std::uint32_t failed_frames = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
};

/// Runs each configured extractor through the identical odometry + metric
/// path over one sequence directory (scans/ + gt.csv).
inline BenchResult run_bench(const std::filesystem::path& sequence_dir,
                             std::span<const NamedConfig> entries, const IcpConfig& icp_cfg) {
  const auto scans = list_scan_files(sequence_dir);
  const Trajectory gt = read_trajectory_csv(sequence_dir / "gt.csv");

  BenchResult result;
  for (const auto& entry : entries) {
    BenchRow row;
    row.name = entry.name;
    row.params = format_extractor_config(entry.config);
    const OdometryResult odom = run_odometry(scans, entry.config, icp_cfg);
    row.report = kitti_errors(gt, odom.trajectory);
    row.runtime = runtime_report(odom.frames);
    row.frames = static_cast<std::uint32_t>(odom.frames.size());
    for (const auto& f : odom.frames)
      if (f.icp_failed) ++row.failed_frames;
    result.rows.push_back(std::move(row));
  }
  return result;
}

/// Deterministic columns only: byte-identical across reruns with the same
/// seed. Wall-clock timing goes to the separate timing CSV.
inline void write_bench_csv(const BenchResult& result, const std::filesystem::path& path) {
  std::string out =
      "extractor,params,ate_percent,are_deg_per_m,are_milli_deg_per_m,avg_points,frames,"
      "failed_frames\n";
  for (const auto& row : result.rows) {
    out += row.name;
    out += ",\"" + row.params + "\"";
    out += "," + detail::format_sig(row.report.ate_percent, 9);
    out += "," + detail::format_sig(row.report.are_deg_per_m, 9);
    out += "," + detail::format_sig(row.report.are_milli_deg_per_m(), 9);
    out += "," + detail::format_sig(row.runtime.mean_points, 9);
    out += "," + std::to_string(row.frames);
    out += "," + std::to_string(row.failed_frames);
    out += '\n';
  }
  detail::write_file_bytes(path, out);
}

inline void write_bench_timing_csv(const BenchResult& result, const std::filesystem::path& path) {
  std::string out = "extractor,avg_runtime_ms\n";
  for (const auto& row : result.rows)
    out += row.name + "," + detail::format_sig(row.runtime.mean_extract_ms, 6) + '\n';
  detail::write_file_bytes(path, out);
}

/// Aligned text comparison in the reporting shape of the source study:
/// ATE% / ARE (1e-3 deg/m), average runtime, average point count.
inline std::string render_bench_table(const BenchResult& result) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-8s %-40s %12s %14s %12s %10s\n", "name", "params",
                "ATE(%)", "ARE(e-3deg/m)", "runtime(ms)", "points");
  out += line;
  out.append(100, '-');
  out += '\n';
  for (const auto& row : result.rows) {
    std::snprintf(line, sizeof line, "%-8s %-40s %12.3f %14.3f %12.2f %10.1f\n", row.name.c_str(),
                  row.params.c_str(), row.report.ate_percent, row.report.are_milli_deg_per_m(),
                  row.runtime.mean_extract_ms, row.runtime.mean_points);
    out += line;
  }
  return out;
}

inline nlohmann::json odom_report_json(const OdomErrorReport& report) {
  nlohmann::json per_length = nlohmann::json::array();
  for (const auto& le : report.per_length)
    per_length.push_back({{"length_m", le.length},
                          {"ate_percent", le.ate_percent},
                          {"are_deg_per_m", le.are_deg_per_m},
                          {"samples", le.samples}});
  return {{"valid", report.valid},
          {"samples", report.samples},
          {"ate_percent", report.ate_percent},
          {"are_deg_per_m", report.are_deg_per_m},
          {"are_milli_deg_per_m", report.are_milli_deg_per_m()},
          {"per_length", std::move(per_length)}};
}

inline nlohmann::json detection_report_json(const DetectionReport& report) {
  return {{"pd", report.pd},
          {"pfa", report.pfa},
          {"true_positive", report.true_positive},
          {"false_positive", report.false_positive},
          {"false_negative", report.false_negative},
          {"true_negative", report.true_negative}};
}

}  // namespace rpx
