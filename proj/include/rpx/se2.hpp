#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace rpx {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double theta) {
  double r = std::remainder(theta, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

/// Planar rigid pose: translation (x, y) and heading theta in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

inline Vec2 transform_point(const Pose2& p, Vec2 v) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  return {p.x + c * v.x - s * v.y, p.y + s * v.x + c * v.y};
}

inline Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, wrap_angle(a.theta + b.theta)};
}

inline Pose2 inverse(const Pose2& p) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  return {-(c * p.x + s * p.y), -(-s * p.x + c * p.y), wrap_angle(-p.theta)};
}

struct TimedPose {
  double timestamp = 0.0;
  Pose2 pose;
};

/// Timestamped poses, strictly increasing in time.
using Trajectory = std::vector<TimedPose>;

}  // namespace rpx
