#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rpx/scan.hpp"
#include "rpx/se2.hpp"

namespace rpx {

struct IcpConfig {
  std::uint32_t max_iterations = 50;
  double max_correspondence_dist = 2.0;  // meters
  double trim_fraction = 0.1;            // worst matches dropped per iteration
  double convergence_eps = 1e-4;         // meters / radians of pose change
  std::uint32_t submap_size = 3;         // clouds kept as the ICP target

  void validate() const {
    if (max_iterations < 1 || submap_size < 1 || !(max_correspondence_dist > 0.0) ||
        !(convergence_eps > 0.0) || !(trim_fraction >= 0.0 && trim_fraction < 1.0))
      throw std::invalid_argument("IcpConfig: invalid parameter");
  }
};

/// Uniform-grid bucket index with cell size equal to the query radius, so a
/// nearest-within-radius lookup only touches the 3x3 neighbourhood.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(std::span<const Vec2> points, double cell) : cell_(cell) {
    points_.assign(points.begin(), points.end());
    buckets_.reserve(points_.size());
    for (std::uint32_t i = 0; i < points_.size(); ++i)
      buckets_[key_of(points_[i])].push_back(i);
  }

  std::size_t size() const { return points_.size(); }
  std::span<const Vec2> points() const { return points_; }

  /// Index of the nearest point within max_dist (ties to the lowest index),
  /// or nullopt. max_dist must be <= the cell size used at build time.
  std::optional<std::uint32_t> nearest_within(Vec2 q, double max_dist) const {
    const auto cx = coord(q.x), cy = coord(q.y);
    double best_d2 = max_dist * max_dist;
    std::optional<std::uint32_t> best;
    for (std::int64_t ix = cx - 1; ix <= cx + 1; ++ix)
      for (std::int64_t iy = cy - 1; iy <= cy + 1; ++iy) {
        const auto it = buckets_.find(pack(ix, iy));
        if (it == buckets_.end()) continue;
        for (std::uint32_t i : it->second) {
          const double dx = points_[i].x - q.x, dy = points_[i].y - q.y;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d2 || (d2 == best_d2 && (!best || i < *best))) {
            best_d2 = d2;
            best = i;
          }
        }
      }
    return best;
  }

 private:
  std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  static std::uint64_t pack(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
           static_cast<std::uint32_t>(iy);
  }
  std::uint64_t key_of(Vec2 p) const { return pack(coord(p.x), coord(p.y)); }

  double cell_ = 1.0;
  std::vector<Vec2> points_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

/// Ring of the last m point clouds, held in the odometry frame, with one
/// aggregated index over all their points.
class Submap {
 public:
  explicit Submap(std::uint32_t capacity, double index_cell)
      : capacity_(capacity), index_cell_(index_cell) {}

  void push(PointCloud cloud) {
    clouds_.push_back(std::move(cloud));
    while (clouds_.size() > capacity_) clouds_.pop_front();
    rebuild();
  }

  std::size_t cloud_count() const { return clouds_.size(); }
  bool empty() const { return points_.empty(); }
  const GridIndex& index() const { return index_; }

 private:
  void rebuild() {
    points_.clear();
    for (const auto& c : clouds_)
      for (const auto& p : c.points) points_.push_back({p.x, p.y});
    index_ = GridIndex(points_, index_cell_);
  }

  std::uint32_t capacity_;
  double index_cell_;
  std::deque<PointCloud> clouds_;
  std::vector<Vec2> points_;
  GridIndex index_;
};

struct IcpStats {
  std::uint32_t iterations = 0;
  std::uint32_t inlier_count = 0;
  double rms_residual = 0.0;
};

struct IcpResult {
  Pose2 pose;       // refined estimate, or the last pose on failure
  IcpStats stats;
  bool ok = false;  // false when an iteration found zero correspondences
};

namespace detail {

/// Closed-form least-squares SE(2) fit of src onto dst: centroid alignment
/// plus the atan2 of the 2x2 cross-covariance.
inline Pose2 solve_rigid_se2(std::span<const Vec2> src, std::span<const Vec2> dst) {
  const auto n = static_cast<double>(src.size());
  Vec2 cs{}, cd{};
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs.x += src[i].x;
    cs.y += src[i].y;
    cd.x += dst[i].x;
    cd.y += dst[i].y;
  }
  cs.x /= n;
  cs.y /= n;
  cd.x /= n;
  cd.y /= n;
  double dot = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double sx = src[i].x - cs.x, sy = src[i].y - cs.y;
    const double dx = dst[i].x - cd.x, dy = dst[i].y - cd.y;
    dot += sx * dx + sy * dy;
    cross += sx * dy - sy * dx;
  }
  const double theta = (dot == 0.0 && cross == 0.0) ? 0.0 : std::atan2(cross, dot);
  const double c = std::cos(theta), s = std::sin(theta);
  return {cd.x - (c * cs.x - s * cs.y), cd.y - (s * cs.x + c * cs.y), theta};
}

}  // namespace detail

/// Point-to-point ICP of source against an indexed target point set:
/// transform, match nearest within max_correspondence_dist, drop the worst
/// trim_fraction by distance, closed-form SE(2) solve, repeat until the pose
/// change falls below convergence_eps.
inline IcpResult icp_align(const PointCloud& source, const GridIndex& target, Pose2 init,
                           const IcpConfig& cfg) {
  cfg.validate();
  if (source.points.empty()) throw std::invalid_argument("icp_align: empty source cloud");
  if (target.size() == 0) throw std::invalid_argument("icp_align: empty target");

  struct Match {
    Vec2 src, dst;
    double d2;
  };
  std::vector<Match> matches;
  std::vector<Vec2> src_pts, dst_pts;
  IcpResult result;
  result.pose = init;

  const auto tpoints = target.points();
  for (std::uint32_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    matches.clear();
    for (const auto& p : source.points) {
      const Vec2 moved = transform_point(result.pose, {p.x, p.y});
      if (const auto nn = target.nearest_within(moved, cfg.max_correspondence_dist)) {
        const Vec2 t = tpoints[*nn];
        const double dx = moved.x - t.x, dy = moved.y - t.y;
        matches.push_back({{p.x, p.y}, t, dx * dx + dy * dy});
      }
    }
    if (matches.empty()) {
      result.stats.iterations = iter;
      result.ok = false;
      return result;
    }

    std::size_t keep = matches.size() -
                       static_cast<std::size_t>(cfg.trim_fraction * matches.size());
    keep = std::max<std::size_t>(keep, 1);
    if (keep < matches.size())
      std::nth_element(matches.begin(), matches.begin() + keep, matches.end(),
                       [](const Match& a, const Match& b) { return a.d2 < b.d2; });
    matches.resize(keep);

    src_pts.clear();
    dst_pts.clear();
    for (const auto& m : matches) {
      src_pts.push_back(m.src);
      dst_pts.push_back(m.dst);
    }
    const Pose2 next = detail::solve_rigid_se2(src_pts, dst_pts);
    const Pose2 delta = compose(inverse(result.pose), next);
    const bool converged =
        std::hypot(delta.x, delta.y) < cfg.convergence_eps &&
        std::abs(delta.theta) < cfg.convergence_eps;

    double sq_sum = 0.0;
    for (const auto& m : matches) {
      const Vec2 moved = transform_point(next, m.src);
      const double dx = moved.x - m.dst.x, dy = moved.y - m.dst.y;
      sq_sum += dx * dx + dy * dy;
    }
    result.pose = next;
    result.stats.iterations = iter;
    result.stats.inlier_count = static_cast<std::uint32_t>(matches.size());
    result.stats.rms_residual = std::sqrt(sq_sum / static_cast<double>(matches.size()));
    if (converged) break;
  }
  result.ok = true;
  return result;
}

inline IcpResult icp_align(const PointCloud& source, const Submap& target, Pose2 init,
                           const IcpConfig& cfg) {
  if (target.empty()) throw std::invalid_argument("icp_align: empty submap");
  return icp_align(source, target.index(), init, cfg);
}

}  // namespace rpx
