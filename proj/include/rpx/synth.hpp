#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rpx/scan.hpp"
#include "rpx/se2.hpp"
#include "rpx/threading.hpp"

namespace rpx {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seeded generator with explicit sampling formulas, so output bytes do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

struct Landmark {
  double x = 0.0;
  double y = 0.0;
  double reflectivity_db = 20.0;  // dB above the noise floor
  double extent = 0.5;            // Gaussian range profile sigma, meters
};

struct ClutterRegion {
  std::vector<Vec2> polygon;
  double gain_db = 0.0;
};

struct World {
  std::vector<Landmark> landmarks;
  std::vector<ClutterRegion> clutter_regions;
};

struct ClutterSpec {
  std::uint32_t regions = 0;
  double gain_db = 6.0;
  double size_m = 40.0;
};

/// Sensor model. F1/F2 mirror the two firmware regimes: F2 trades a finer
/// range resolution for a higher noise floor. noise_scale multiplies the
/// exponential clutter mean (1 = the nominal floor).
struct SensorPreset {
  std::string name = "F1";
  double range_resolution = 0.0596;  // m per bin
  std::uint32_t num_azimuths = 400;
  double rotation_rate = 4.0;  // Hz
  double noise_floor_db = 20.0;
  double noise_scale = 1.0;
  double max_range = 100.0;          // m; sets num_bins
  double beam_width_azimuths = 0.0;  // Gaussian sigma across azimuths; 0 = nearest only

  static SensorPreset f1() { return {}; }
  static SensorPreset f2() {
    SensorPreset p;
    p.name = "F2";
    p.range_resolution = 0.0438;
    p.noise_floor_db = 35.0;
    return p;
  }

  void validate() const {
    if (!(range_resolution > 0.0) || !(rotation_rate > 0.0) || !(max_range > 0.0))
      throw std::invalid_argument("SensorPreset: resolutions and rates must be positive");
    if (num_azimuths < 3) throw std::invalid_argument("SensorPreset: num_azimuths must be >= 3");
  }

  std::uint32_t num_bins() const {
    return static_cast<std::uint32_t>(std::ceil(max_range / range_resolution));
  }

  ScanGeometry geometry() const {
    return {num_azimuths, num_bins(), range_resolution, 0.0, rotation_rate};
  }
};

inline SensorPreset preset_by_name(const std::string& name) {
  if (name == "F1" || name == "f1") return SensorPreset::f1();
  if (name == "F2" || name == "f2") return SensorPreset::f2();
  throw std::invalid_argument("unknown preset '" + name + "' (expected F1 or F2)");
}

/// Per-bin ground truth: true where the landmark return dominates clutter.
struct DetectionLabels {
  std::uint32_t num_azimuths = 0;
  std::uint32_t num_bins = 0;
  std::vector<std::uint8_t> cells;  // row-major, 0/1

  bool at(std::uint32_t a, std::uint32_t b) const {
    return cells[static_cast<std::size_t>(a) * num_bins + b] != 0;
  }
  std::uint64_t true_count() const {
    std::uint64_t n = 0;
    for (auto c : cells) n += c;
    return n;
  }
};

inline bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const bool crosses = (poly[i].y > p.y) != (poly[j].y > p.y);
    if (crosses) {
      const double xi =
          poly[j].x + (poly[i].x - poly[j].x) * (p.y - poly[j].y) / (poly[i].y - poly[j].y);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

/// Deterministic world: landmarks uniform over a centered square of the
/// given extent, plus optional rectangular clutter patches.
inline World make_world(std::uint64_t seed, double extent_m, std::uint32_t n_landmarks,
                        const ClutterSpec& clutter = {}) {
  if (!(extent_m > 0.0)) throw std::invalid_argument("make_world: extent must be > 0");
  detail::Rng rng(seed);
  World world;
  world.landmarks.reserve(n_landmarks);
  const double half = extent_m / 2.0;
  for (std::uint32_t i = 0; i < n_landmarks; ++i) {
    Landmark lm;
    lm.x = rng.uniform(-half, half);
    lm.y = rng.uniform(-half, half);
    lm.reflectivity_db = rng.uniform(18.0, 30.0);
    lm.extent = rng.uniform(0.3, 1.2);
    world.landmarks.push_back(lm);
  }
  for (std::uint32_t i = 0; i < clutter.regions; ++i) {
    const double cx = rng.uniform(-half, half);
    const double cy = rng.uniform(-half, half);
    const double s = clutter.size_m / 2.0;
    ClutterRegion region;
    region.polygon = {{cx - s, cy - s}, {cx + s, cy - s}, {cx + s, cy + s}, {cx - s, cy + s}};
    region.gain_db = clutter.gain_db;
    world.clutter_regions.push_back(std::move(region));
  }
  return world;
}

/// Renders one scan from a pose. Per bin, power in Watts is exponential
/// clutter (mean set by the noise floor plus any clutter-region gain) plus
/// Swerling-I landmark returns with Gaussian range profiles. A bin is
/// labelled true when the landmark part exceeds the clutter part. The dB
/// image is clamped to [0, 127.5] and quantized to half-dB steps, exactly
/// the raw 8-bit encoding.
inline std::pair<PolarScan, DetectionLabels> render_scan(const World& world, const Pose2& pose,
                                                         const SensorPreset& preset,
                                                         std::uint64_t seed,
                                                         double timestamp = 0.0) {
  preset.validate();
  const ScanGeometry geometry = preset.geometry();
  const std::uint32_t rows = geometry.num_azimuths;
  const std::uint32_t cols = geometry.num_bins;
  const std::size_t cells = geometry.cell_count();

  detail::Rng rng(seed);

  // Clutter field first (row-major), then per-landmark draws: one fixed
  // sampling order, so a scan is a pure function of (inputs, seed).
  std::vector<double> clutter(cells);
  const double base_mean = preset.noise_scale * std::pow(10.0, preset.noise_floor_db / 10.0);
  if (world.clutter_regions.empty()) {
    for (std::size_t i = 0; i < cells; ++i) clutter[i] = rng.exponential(base_mean);
  } else {
    for (std::uint32_t a = 0; a < rows; ++a) {
      const double angle = geometry.azimuth_angle(a) + pose.theta;
      const double ca = std::cos(angle), sa = std::sin(angle);
      for (std::uint32_t b = 0; b < cols; ++b) {
        const double r = geometry.bin_range(b);
        const Vec2 p{pose.x + r * ca, pose.y + r * sa};
        double gain = 0.0;
        for (const auto& region : world.clutter_regions)
          if (point_in_polygon(region.polygon, p)) gain += region.gain_db;
        const double mean = preset.noise_scale * std::pow(10.0, (preset.noise_floor_db + gain) / 10.0);
        clutter[static_cast<std::size_t>(a) * cols + b] = rng.exponential(mean);
      }
    }
  }

  std::vector<double> target(cells, 0.0);
  const double res = geometry.range_resolution;
  for (const auto& lm : world.landmarks) {
    const double dx = lm.x - pose.x, dy = lm.y - pose.y;
    const double range = std::hypot(dx, dy);
    const double amplitude =
        rng.exponential(std::pow(10.0, (preset.noise_floor_db + lm.reflectivity_db) / 10.0));
    if (range > preset.max_range + 4.0 * lm.extent) continue;

    const double bearing = wrap_angle(std::atan2(dy, dx) - pose.theta);
    const double azimuth_coord = (bearing - geometry.azimuth_0_angle) / (kTwoPi / rows);
    const auto nearest = static_cast<std::ptrdiff_t>(std::llround(azimuth_coord));

    const double sigma_az = preset.beam_width_azimuths;
    const auto spread = sigma_az > 0.0 ? static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma_az)) : 0;
    const auto bin_lo = std::max<std::ptrdiff_t>(
        0, static_cast<std::ptrdiff_t>(std::floor((range - 4.0 * lm.extent) / res - 0.5)));
    const auto bin_hi = std::min<std::ptrdiff_t>(
        cols - 1, static_cast<std::ptrdiff_t>(std::ceil((range + 4.0 * lm.extent) / res - 0.5)));

    for (std::ptrdiff_t da = -spread; da <= spread; ++da) {
      const auto a = static_cast<std::uint32_t>(((nearest + da) % rows + rows) % rows);
      double w_az = 1.0;
      if (sigma_az > 0.0) {
        const double off = (static_cast<double>(nearest) + static_cast<double>(da)) - azimuth_coord;
        w_az = std::exp(-off * off / (2.0 * sigma_az * sigma_az));
      }
      double* trow = target.data() + static_cast<std::size_t>(a) * cols;
      for (std::ptrdiff_t b = bin_lo; b <= bin_hi; ++b) {
        const double dr = geometry.bin_range(static_cast<std::uint32_t>(b)) - range;
        trow[b] += amplitude * w_az * std::exp(-dr * dr / (2.0 * lm.extent * lm.extent));
      }
    }
  }

  PolarScan scan;
  scan.geometry = geometry;
  scan.unit = PowerUnit::Decibel;
  scan.timestamp = timestamp;
  scan.values.resize(cells);
  DetectionLabels labels{rows, cols, std::vector<std::uint8_t>(cells, 0)};
  for (std::size_t i = 0; i < cells; ++i) {
    const double watts = clutter[i] + target[i];
    double db = 10.0 * std::log10(watts);
    db = std::clamp(db, 0.0, 127.5);
    const auto level = static_cast<std::uint8_t>(std::llround(db * 2.0));
    scan.values[i] = 0.5f * level;
    labels.cells[i] = target[i] > clutter[i] ? 1 : 0;
  }
  return {std::move(scan), std::move(labels)};
}

enum class PathShape { Line, Arc, FigureEight };

inline PathShape parse_shape(const std::string& name) {
  if (name == "line") return PathShape::Line;
  if (name == "arc") return PathShape::Arc;
  if (name == "figure8") return PathShape::FigureEight;
  throw std::invalid_argument("unknown shape '" + name + "' (expected line|arc|figure8)");
}

/// One pose per scan period at constant speed; total path length >= length_m.
/// figure8 sizes a Gerono lemniscate so a single closed loop covers the
/// requested length, which brings the final pose back to the start.
inline Trajectory make_trajectory(PathShape shape, double length_m, double rotation_rate,
                                  double speed = 10.0, double curvature = 0.0) {
  if (!(length_m > 0.0)) throw std::invalid_argument("make_trajectory: length must be > 0");
  if (!(rotation_rate > 0.0) || !(speed > 0.0))
    throw std::invalid_argument("make_trajectory: rate and speed must be > 0");
  const double step = speed / rotation_rate;  // meters between poses
  const double dt = 1.0 / rotation_rate;
  Trajectory traj;

  if (shape == PathShape::Line || (shape == PathShape::Arc && curvature == 0.0)) {
    const auto n = static_cast<std::size_t>(std::ceil(length_m / step - 1e-9));
    for (std::size_t i = 0; i <= n; ++i) traj.push_back({i * dt, {i * step, 0.0, 0.0}});
    return traj;
  }
  if (shape == PathShape::Arc) {
    const auto n = static_cast<std::size_t>(std::ceil(length_m / step - 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
      const double s = i * step;
      traj.push_back({i * dt,
                      {std::sin(curvature * s) / curvature,
                       (1.0 - std::cos(curvature * s)) / curvature, wrap_angle(curvature * s)}});
    }
    return traj;
  }

  // Gerono lemniscate x = A sin t, y = A sin t cos t; |velocity| never
  // vanishes, so the tangent heading is well defined everywhere.
  const int quad_steps = 200000;
  double unit_length = 0.0;
  {
    const double dtq = kTwoPi / quad_steps;
    for (int i = 0; i < quad_steps; ++i) {
      const double t = (i + 0.5) * dtq;
      unit_length += std::hypot(std::cos(t), std::cos(2.0 * t)) * dtq;
    }
  }
  const double scale = (length_m / unit_length) * (1.0 + 1e-9);

  double t = 0.0, travelled = 0.0, next_emit = 0.0;
  std::size_t i = 0;
  const double dtq = kTwoPi / 2000000;
  auto emit = [&](double tt) {
    traj.push_back({i * dt,
                    {scale * std::sin(tt), scale * std::sin(tt) * std::cos(tt),
                     wrap_angle(std::atan2(std::cos(2.0 * tt), std::cos(tt)))}});
    ++i;
  };
  emit(0.0);
  next_emit = step;
  while (t < kTwoPi) {
    const double speed_t = scale * std::hypot(std::cos(t), std::cos(2.0 * t));
    t += dtq;
    travelled += speed_t * dtq;
    if (travelled >= next_emit && t < kTwoPi) {
      emit(t);
      next_emit += step;
    }
  }
  return traj;
}

}  // namespace rpx
