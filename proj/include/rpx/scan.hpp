#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpx/se2.hpp"

namespace rpx {

/// Power unit carried by a scan. Conversions form the chain
/// RawHalfDb -> Decibel -> Watt -> WattSquared; every step is strictly
/// monotone, so bin ordering survives the whole chain.
enum class PowerUnit : std::uint8_t { RawHalfDb, Decibel, Watt, WattSquared };

inline const char* to_string(PowerUnit u) {
  switch (u) {
    case PowerUnit::RawHalfDb: return "raw_half_db";
    case PowerUnit::Decibel: return "decibel";
    case PowerUnit::Watt: return "watt";
    case PowerUnit::WattSquared: return "watt_squared";
  }
  return "?";
}

struct ScanGeometry {
  std::uint32_t num_azimuths = 400;
  std::uint32_t num_bins = 0;
  double range_resolution = 0.0596;  // meters per bin
  double azimuth_0_angle = 0.0;      // radians
  double rotation_rate = 4.0;        // Hz

  void validate() const {
    if (num_azimuths < 3) throw std::invalid_argument("ScanGeometry: num_azimuths must be >= 3");
    if (num_bins < 1) throw std::invalid_argument("ScanGeometry: num_bins must be >= 1");
    if (!(range_resolution > 0.0))
      throw std::invalid_argument("ScanGeometry: range_resolution must be > 0");
  }

  double azimuth_angle(std::uint32_t azimuth_idx) const {
    return azimuth_0_angle + kTwoPi * azimuth_idx / num_azimuths;
  }

  /// Bin-center range of a bin: r = (i + 0.5) * resolution.
  double bin_range(std::uint32_t range_bin) const {
    return (range_bin + 0.5) * range_resolution;
  }

  std::size_t cell_count() const {
    return static_cast<std::size_t>(num_azimuths) * num_bins;
  }

  bool operator==(const ScanGeometry&) const = default;
};

/// One radar rotation as a dense azimuth x range-bin grid of power values.
/// Row-major by azimuth. The unit tag travels with the data; consumers
/// assert the unit they need on entry.
template <typename Scalar>
struct BasicPolarScan {
  ScanGeometry geometry;
  PowerUnit unit = PowerUnit::Decibel;
  double timestamp = 0.0;
  std::vector<Scalar> values;

  Scalar at(std::uint32_t azimuth_idx, std::uint32_t range_bin) const {
    return values[static_cast<std::size_t>(azimuth_idx) * geometry.num_bins + range_bin];
  }
  Scalar& at(std::uint32_t azimuth_idx, std::uint32_t range_bin) {
    return values[static_cast<std::size_t>(azimuth_idx) * geometry.num_bins + range_bin];
  }
  std::span<const Scalar> row(std::uint32_t azimuth_idx) const {
    return {values.data() + static_cast<std::size_t>(azimuth_idx) * geometry.num_bins,
            geometry.num_bins};
  }
  std::span<Scalar> row(std::uint32_t azimuth_idx) {
    return {values.data() + static_cast<std::size_t>(azimuth_idx) * geometry.num_bins,
            geometry.num_bins};
  }

  void validate() const {
    geometry.validate();
    if (values.size() != geometry.cell_count())
      throw std::invalid_argument("PolarScan: grid size does not match geometry");
  }
};

/// Decibel / Watt grids keep 32-bit storage; WattSquared grids use 64-bit
/// so CFAR window sums keep their ordering at the top of the dB range.
using PolarScan = BasicPolarScan<float>;
using PolarScanW2 = BasicPolarScan<double>;

inline void require_unit(PowerUnit have, PowerUnit want, const char* who) {
  if (have != want)
    throw std::invalid_argument(std::string(who) + ": expected " + to_string(want) +
                                " input, got " + to_string(have));
}

/// Decodes raw 8-bit half-dB levels into a Decibel scan (value = level / 2).
inline PolarScan decode_raw(std::span<const std::uint8_t> levels, const ScanGeometry& geometry,
                            double timestamp) {
  geometry.validate();
  if (levels.size() != geometry.cell_count())
    throw std::invalid_argument("decode_raw: level grid does not match geometry");
  PolarScan scan;
  scan.geometry = geometry;
  scan.unit = PowerUnit::Decibel;
  scan.timestamp = timestamp;
  scan.values.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) scan.values[i] = 0.5f * levels[i];
  return scan;
}

/// Inverse of decode_raw. Throws if a value is off the half-dB lattice or
/// outside [0, 127.5] dB.
inline std::vector<std::uint8_t> encode_levels(const PolarScan& scan) {
  require_unit(scan.unit, PowerUnit::Decibel, "encode_levels");
  std::vector<std::uint8_t> levels(scan.values.size());
  for (std::size_t i = 0; i < scan.values.size(); ++i) {
    const double doubled = 2.0 * scan.values[i];
    const double rounded = std::nearbyint(doubled);
    if (!(std::abs(doubled - rounded) < 1e-6) || rounded < 0.0 || rounded > 255.0)
      throw std::invalid_argument("encode_levels: value not representable as 8-bit half-dB");
    levels[i] = static_cast<std::uint8_t>(rounded);
  }
  return levels;
}

/// p_dB -> 10^(p_dB / 10) W.
inline PolarScan to_watts(const PolarScan& scan) {
  require_unit(scan.unit, PowerUnit::Decibel, "to_watts");
  PolarScan out = scan;
  out.unit = PowerUnit::Watt;
  for (auto& v : out.values) v = std::pow(10.0f, v / 10.0f);
  return out;
}

/// Square-law detector statistic: elementwise square, widened to doubles.
inline PolarScanW2 square_law(const PolarScan& scan) {
  require_unit(scan.unit, PowerUnit::Watt, "square_law");
  PolarScanW2 out;
  out.geometry = scan.geometry;
  out.unit = PowerUnit::WattSquared;
  out.timestamp = scan.timestamp;
  out.values.resize(scan.values.size());
  for (std::size_t i = 0; i < scan.values.size(); ++i) {
    const double w = scan.values[i];
    out.values[i] = w * w;
  }
  return out;
}

inline Vec2 polar_to_cartesian(std::uint32_t azimuth_idx, std::uint32_t range_bin,
                               const ScanGeometry& geometry) {
  if (azimuth_idx >= geometry.num_azimuths || range_bin >= geometry.num_bins)
    throw std::out_of_range("polar_to_cartesian: index out of range");
  const double r = geometry.bin_range(range_bin);
  const double theta = geometry.azimuth_angle(azimuth_idx);
  return {r * std::cos(theta), r * std::sin(theta)};
}

/// One extracted point. For bin-level extractors (x, y) is the Cartesian
/// image of (azimuth_idx, range_bin); cluster-averaging extractors emit the
/// cluster mean and carry the strongest member's indices as provenance.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
  double intensity = 0.0;  // dB for every extractor
  std::uint32_t azimuth_idx = 0;
  std::uint32_t range_bin = 0;
};

struct PointCloud {
  std::vector<Point2> points;
  double source_timestamp = 0.0;
};

}  // namespace rpx
