#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rpx/odometry.hpp"
#include "rpx/scan.hpp"
#include "rpx/se2.hpp"
#include "rpx/synth.hpp"

namespace rpx {

struct LengthErrors {
  double length = 0.0;        // segment length L, meters
  double ate_percent = 0.0;
  double are_deg_per_m = 0.0;
  std::uint32_t samples = 0;
};

/// KITTI-style relative errors. Overall values are means over every
/// (start, L) sample; ARE is deg/m (Table-style reporting multiplies by 1e3).
struct OdomErrorReport {
  bool valid = false;  // false when no segment reached the shortest length
  std::uint32_t samples = 0;
  double ate_percent = 0.0;
  double are_deg_per_m = 0.0;
  std::vector<LengthErrors> per_length;

  double are_milli_deg_per_m() const { return are_deg_per_m * 1e3; }
};

struct KittiOptions {
  std::vector<double> lengths = {100, 200, 300, 400, 500, 600, 700, 800};
  std::uint32_t start_stride = 1;  // every frame is a candidate start
};

/// Relative translational / rotational errors over fixed ground-truth path
/// lengths. For each start i and length L, the first frame j with
/// cumulative gt path >= L closes the segment and the error transform is
/// E = (gt_i^-1 gt_j)^-1 (est_i^-1 est_j).
inline OdomErrorReport kitti_errors(const Trajectory& gt, const Trajectory& est,
                                    const KittiOptions& options = {}) {
  if (gt.size() != est.size())
    throw std::invalid_argument("kitti_errors: trajectory lengths differ");
  if (gt.size() < 2) throw std::invalid_argument("kitti_errors: need at least 2 poses");
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (std::abs(gt[i].timestamp - est[i].timestamp) > 1e-9)
      throw std::invalid_argument("kitti_errors: timestamps do not match");
  if (options.lengths.empty() || options.start_stride < 1)
    throw std::invalid_argument("kitti_errors: invalid options");

  std::vector<double> cum(gt.size(), 0.0);
  for (std::size_t i = 1; i < gt.size(); ++i)
    cum[i] = cum[i - 1] + std::hypot(gt[i].pose.x - gt[i - 1].pose.x,
                                     gt[i].pose.y - gt[i - 1].pose.y);

  OdomErrorReport report;
  report.per_length.reserve(options.lengths.size());
  double t_sum = 0.0, r_sum = 0.0;
  std::uint32_t n_total = 0;

  for (double length : options.lengths) {
    LengthErrors le;
    le.length = length;
    double lt = 0.0, lr = 0.0;
    for (std::size_t i = 0; i < gt.size(); i += options.start_stride) {
      const double target = cum[i] + length;
      const auto it = std::lower_bound(cum.begin() + i, cum.end(), target);
      if (it == cum.end()) break;  // no later start can reach this length either
      const std::size_t j = static_cast<std::size_t>(it - cum.begin());

      const Pose2 rel_gt = compose(inverse(gt[i].pose), gt[j].pose);
      const Pose2 rel_est = compose(inverse(est[i].pose), est[j].pose);
      const Pose2 err = compose(inverse(rel_gt), rel_est);
      lt += std::hypot(err.x, err.y) / length * 100.0;
      lr += std::abs(err.theta) * (180.0 / std::numbers::pi) / length;
      ++le.samples;
    }
    if (le.samples > 0) {
      lt /= le.samples;
      lr /= le.samples;
      le.ate_percent = lt;
      le.are_deg_per_m = lr;
      t_sum += lt * le.samples;
      r_sum += lr * le.samples;
      n_total += le.samples;
    }
    report.per_length.push_back(le);
  }

  report.samples = n_total;
  report.valid = n_total > 0;
  if (report.valid) {
    report.ate_percent = t_sum / n_total;
    report.are_deg_per_m = r_sum / n_total;
  }
  return report;
}

struct DetectionReport {
  double pd = 0.0;
  double pfa = 0.0;
  std::uint64_t true_positive = 0;   // labelled bins detected
  std::uint64_t false_positive = 0;  // point bins away from any true bin
  std::uint64_t false_negative = 0;  // labelled bins missed
  std::uint64_t true_negative = 0;
};

/// Pd/Pfa against per-bin labels. A labelled bin counts detected when a
/// point lies within `dilation` bins on the same azimuth; a point bin
/// farther than `dilation` from every labelled bin is a false alarm. Counts
/// are per bin and sum to the grid size.
inline DetectionReport detection_metrics(const PointCloud& cloud, const DetectionLabels& labels,
                                         std::uint32_t dilation = 1) {
  const std::uint64_t cells =
      static_cast<std::uint64_t>(labels.num_azimuths) * labels.num_bins;
  if (cells == 0) throw std::invalid_argument("detection_metrics: empty labels");

  std::vector<std::vector<std::uint32_t>> point_bins(labels.num_azimuths);
  for (const auto& p : cloud.points) {
    if (p.azimuth_idx >= labels.num_azimuths || p.range_bin >= labels.num_bins)
      throw std::invalid_argument("detection_metrics: point outside label grid");
    point_bins[p.azimuth_idx].push_back(p.range_bin);
  }

  DetectionReport report;
  std::uint64_t total_true = 0;
  const auto d = static_cast<std::ptrdiff_t>(dilation);
  for (std::uint32_t a = 0; a < labels.num_azimuths; ++a) {
    auto& bins = point_bins[a];
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());

    for (std::uint32_t b = 0; b < labels.num_bins; ++b) {
      if (!labels.at(a, b)) continue;
      ++total_true;
      const auto lo = static_cast<std::uint32_t>(std::max<std::ptrdiff_t>(0, b - d));
      const auto it = std::lower_bound(bins.begin(), bins.end(), lo);
      if (it != bins.end() && *it <= b + dilation) ++report.true_positive;
      else ++report.false_negative;
    }

    for (std::uint32_t b : bins) {
      bool near_true = false;
      const auto lo = static_cast<std::ptrdiff_t>(b) - d;
      const auto hi = static_cast<std::ptrdiff_t>(b) + d;
      for (std::ptrdiff_t t = std::max<std::ptrdiff_t>(0, lo);
           t <= std::min<std::ptrdiff_t>(labels.num_bins - 1, hi); ++t)
        if (labels.at(a, static_cast<std::uint32_t>(t))) {
          near_true = true;
          break;
        }
      if (!near_true) ++report.false_positive;
    }
  }

  const std::uint64_t total_false = cells - total_true;
  report.true_negative = total_false - report.false_positive;
  report.pd = total_true > 0 ? static_cast<double>(report.true_positive) / total_true : 0.0;
  report.pfa = total_false > 0 ? static_cast<double>(report.false_positive) / total_false : 0.0;
  return report;
}

/// Merges per-scan confusion counts; pd/pfa recomputed from the sums.
inline DetectionReport merge(const DetectionReport& a, const DetectionReport& b) {
  DetectionReport r;
  r.true_positive = a.true_positive + b.true_positive;
  r.false_positive = a.false_positive + b.false_positive;
  r.false_negative = a.false_negative + b.false_negative;
  r.true_negative = a.true_negative + b.true_negative;
  const std::uint64_t total_true = r.true_positive + r.false_negative;
  const std::uint64_t total_false = r.false_positive + r.true_negative;
  r.pd = total_true > 0 ? static_cast<double>(r.true_positive) / total_true : 0.0;
  r.pfa = total_false > 0 ? static_cast<double>(r.false_positive) / total_false : 0.0;
  return r;
}

struct RuntimeReport {
  double mean_extract_ms = 0.0;
  double mean_points = 0.0;
};

/// Single-thread timing contract: extract_ms fields must have been measured
/// around the extractor call only.
inline RuntimeReport runtime_report(std::span<const FrameStats> frames) {
  if (frames.empty()) throw std::invalid_argument("runtime_report: no frames");
  RuntimeReport r;
  for (const auto& f : frames) {
    r.mean_extract_ms += f.extract_ms;
    r.mean_points += f.n_points;
  }
  r.mean_extract_ms /= static_cast<double>(frames.size());
  r.mean_points /= static_cast<double>(frames.size());
  return r;
}

}  // namespace rpx
