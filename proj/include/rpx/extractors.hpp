#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rpx/cfar.hpp"
#include "rpx/scan.hpp"
#include "rpx/threading.hpp"

namespace rpx {

struct KStrongestCfg {
  std::uint32_t count = 5;   // K
  double min_value = 31.875;  // z_min, dB
};

struct C18Cfg {
  double smooth_width = 10.0;  // w_binom, bins; Gaussian sigma = w_binom / 2
  double noise_scale = 2.75;   // z_q
};

inline void validate(const KStrongestCfg& c) {
  if (c.count < 1) throw std::invalid_argument("kstr: K must be >= 1");
}

inline void validate(const C18Cfg& c) {
  if (!(c.smooth_width >= 1.0)) throw std::invalid_argument("c18: w_binom must be >= 1");
  if (!(c.noise_scale > 0.0)) throw std::invalid_argument("c18: z_q must be > 0");
}

namespace detail {

/// Bins with value strictly above min_value, the K largest per row, ties
/// broken toward the smaller range bin. Selection depends only on value
/// ordering, so it commutes with any strictly monotone unit conversion.
template <typename Scalar>
void kstrongest_row(std::span<const Scalar> row, Scalar min_value, std::uint32_t k,
                    std::vector<std::uint32_t>& out_bins) {
  out_bins.clear();
  for (std::uint32_t b = 0; b < row.size(); ++b)
    if (row[b] > min_value) out_bins.push_back(b);
  const auto stronger = [&](std::uint32_t lhs, std::uint32_t rhs) {
    if (row[lhs] != row[rhs]) return row[lhs] > row[rhs];
    return lhs < rhs;
  };
  if (out_bins.size() > k) {
    std::nth_element(out_bins.begin(), out_bins.begin() + k, out_bins.end(), stronger);
    out_bins.resize(k);
  }
  std::sort(out_bins.begin(), out_bins.end());
}

}  // namespace detail

/// Per azimuth, the K most intense bins above the static threshold z_min.
inline PointCloud extract_kstrongest(const PolarScan& scan, const KStrongestCfg& cfg) {
  require_unit(scan.unit, PowerUnit::Decibel, "extract_kstrongest");
  scan.validate();
  validate(cfg);

  std::vector<std::vector<Point2>> per_azimuth(scan.geometry.num_azimuths);
  parallel_for(scan.geometry.num_azimuths, [&](std::size_t a_begin, std::size_t a_end) {
    std::vector<std::uint32_t> bins;
    for (std::size_t a = a_begin; a < a_end; ++a) {
      const auto azimuth = static_cast<std::uint32_t>(a);
      const auto row = scan.row(azimuth);
      detail::kstrongest_row<float>(row, static_cast<float>(cfg.min_value), cfg.count, bins);
      auto& out = per_azimuth[a];
      out.reserve(bins.size());
      for (std::uint32_t b : bins) {
        const Vec2 xy = polar_to_cartesian(azimuth, b, scan.geometry);
        out.push_back({xy.x, xy.y, row[b], azimuth, b});
      }
    }
  });

  PointCloud cloud;
  cloud.source_timestamp = scan.timestamp;
  for (auto& pts : per_azimuth) cloud.points.insert(cloud.points.end(), pts.begin(), pts.end());
  return cloud;
}

namespace detail {

/// Gaussian taps truncated at 4 sigma, normalized to unit sum.
inline std::vector<double> gaussian_kernel(double sigma) {
  const auto radius = std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
    const double w = std::exp(-static_cast<double>(j * j) / (2.0 * sigma * sigma));
    k[j + radius] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

/// Reflective index: ...cba|abc...|cba...
inline std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace detail

/// Simplified Cen-2018 peak extractor: unbias each azimuth by its mean,
/// Gaussian-smooth, estimate the noise level from the negative excursions,
/// then keep local maxima above z_q times that level.
inline PointCloud extract_c18(const PolarScan& scan, const C18Cfg& cfg) {
  require_unit(scan.unit, PowerUnit::Decibel, "extract_c18");
  scan.validate();
  validate(cfg);

  const auto kernel = detail::gaussian_kernel(cfg.smooth_width / 2.0);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(scan.geometry.num_bins);

  std::vector<std::vector<Point2>> per_azimuth(scan.geometry.num_azimuths);
  parallel_for(scan.geometry.num_azimuths, [&](std::size_t a_begin, std::size_t a_end) {
    std::vector<double> unbiased(n), smoothed(n);
    for (std::size_t a = a_begin; a < a_end; ++a) {
      const auto azimuth = static_cast<std::uint32_t>(a);
      const auto row = scan.row(azimuth);

      double mean = 0.0;
      for (float v : row) mean += v;
      mean /= static_cast<double>(n);
      for (std::ptrdiff_t i = 0; i < n; ++i) unbiased[i] = row[i] - mean;

      for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t j = -radius; j <= radius; ++j)
          acc += kernel[j + radius] * unbiased[detail::reflect_index(i + j, n)];
        smoothed[i] = acc;
      }

      double neg_sq = 0.0;
      std::size_t neg_count = 0;
      for (std::ptrdiff_t i = 0; i < n; ++i)
        if (smoothed[i] < 0.0) {
          neg_sq += smoothed[i] * smoothed[i];
          ++neg_count;
        }
      if (neg_count == 0) continue;  // constant azimuth, nothing to detect
      const double noise = std::sqrt(neg_sq / static_cast<double>(neg_count));
      if (noise == 0.0) continue;
      const double threshold = cfg.noise_scale * noise;

      auto& out = per_azimuth[a];
      for (std::ptrdiff_t i = 1; i + 1 < n; ++i) {
        if (smoothed[i] > threshold && smoothed[i] > smoothed[i - 1] &&
            smoothed[i] > smoothed[i + 1]) {
          const auto b = static_cast<std::uint32_t>(i);
          const Vec2 xy = polar_to_cartesian(azimuth, b, scan.geometry);
          out.push_back({xy.x, xy.y, row[b], azimuth, b});
        }
      }
    }
  });

  PointCloud cloud;
  cloud.source_timestamp = scan.timestamp;
  for (auto& pts : per_azimuth) cloud.points.insert(cloud.points.end(), pts.begin(), pts.end());
  return cloud;
}

}  // namespace rpx
