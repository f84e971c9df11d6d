#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rpx/config.hpp"
#include "rpx/icp.hpp"
#include "rpx/io.hpp"

namespace rpx {

struct FrameStats {
  std::uint32_t frame = 0;
  double extract_ms = 0.0;
  std::uint32_t n_points = 0;
  std::uint32_t icp_iterations = 0;
  double icp_rms = 0.0;
  bool icp_failed = false;
};

struct OdometryResult {
  Trajectory trajectory;
  std::vector<FrameStats> frames;
};

/// Core odometry loop over extracted clouds: frame 0 pins the odometry
/// frame, later frames start from a constant-velocity prediction, refine
/// with ICP against the sliding submap, and append their cloud to it. An ICP
/// failure keeps the prediction and flags the frame.
inline OdometryResult run_odometry_clouds(std::vector<PointCloud> clouds,
                                          const IcpConfig& icp_cfg) {
  icp_cfg.validate();
  if (clouds.size() < 2)
    throw std::invalid_argument("run_odometry: need at least 2 scans");

  OdometryResult result;
  result.frames.resize(clouds.size());
  std::vector<Pose2> poses(clouds.size());

  Submap submap(icp_cfg.submap_size, icp_cfg.max_correspondence_dist);
  poses[0] = Pose2{};
  result.trajectory.push_back({clouds[0].source_timestamp, poses[0]});
  result.frames[0].frame = 0;
  result.frames[0].n_points = static_cast<std::uint32_t>(clouds[0].points.size());
  submap.push(std::move(clouds[0]));

  for (std::size_t i = 1; i < clouds.size(); ++i) {
    Pose2 predicted = poses[i - 1];
    if (i >= 2) predicted = compose(poses[i - 1], compose(inverse(poses[i - 2]), poses[i - 1]));

    auto& fs = result.frames[i];
    fs.frame = static_cast<std::uint32_t>(i);
    fs.n_points = static_cast<std::uint32_t>(clouds[i].points.size());

    if (clouds[i].points.empty()) {
      poses[i] = predicted;
      fs.icp_failed = true;
    } else {
      const IcpResult icp = icp_align(clouds[i], submap, predicted, icp_cfg);
      poses[i] = icp.ok ? icp.pose : predicted;
      fs.icp_iterations = icp.stats.iterations;
      fs.icp_rms = icp.stats.rms_residual;
      fs.icp_failed = !icp.ok;
    }
    result.trajectory.push_back({clouds[i].source_timestamp, poses[i]});

    PointCloud in_odom = std::move(clouds[i]);
    for (auto& p : in_odom.points) {
      const Vec2 moved = transform_point(poses[i], {p.x, p.y});
      p.x = moved.x;
      p.y = moved.y;
    }
    submap.push(std::move(in_odom));
  }
  return result;
}

/// Full pipeline over canonical scan files: decode, extract (timed with a
/// wall clock around the extractor call only), then the odometry loop.
inline OdometryResult run_odometry(const std::vector<std::filesystem::path>& scan_paths,
                                   const ExtractorConfig& extractor_cfg,
                                   const IcpConfig& icp_cfg) {
  icp_cfg.validate();
  validate(extractor_cfg);
  if (scan_paths.size() < 2)
    throw std::invalid_argument("run_odometry: need at least 2 scans");

  std::vector<PointCloud> clouds(scan_paths.size());
  std::vector<double> extract_ms(scan_paths.size());
  for (std::size_t i = 0; i < scan_paths.size(); ++i) {
    const PolarScan scan = read_scan(scan_paths[i]);
    const auto t0 = std::chrono::steady_clock::now();
    clouds[i] = extract(scan, extractor_cfg);
    const auto t1 = std::chrono::steady_clock::now();
    extract_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }

  OdometryResult result = run_odometry_clouds(std::move(clouds), icp_cfg);
  for (std::size_t i = 0; i < extract_ms.size(); ++i)
    result.frames[i].extract_ms = extract_ms[i];
  return result;
}

/// Per-frame stats CSV: frame,extract_ms,n_points,icp_iters,icp_rms,flag.
inline void write_frame_stats_csv(const std::vector<FrameStats>& frames,
                                  const std::filesystem::path& path) {
  std::string out = "frame,extract_ms,n_points,icp_iters,icp_rms,flag\n";
  for (const auto& f : frames) {
    out += std::to_string(f.frame);
    out += ',';
    out += detail::format_sig(f.extract_ms, 9);
    out += ',';
    out += std::to_string(f.n_points);
    out += ',';
    out += std::to_string(f.icp_iterations);
    out += ',';
    out += detail::format_sig(f.icp_rms, 9);
    out += ',';
    out += f.icp_failed ? '1' : '0';
    out += '\n';
  }
  detail::write_file_bytes(path, out);
}

}  // namespace rpx
