#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rpx/extractors.hpp"
#include "rpx/scan.hpp"
#include "rpx/threading.hpp"

namespace rpx {

struct C19Cfg {
  std::uint32_t max_regions = 400;  // l_max
  double region_drop = 0.5;         // cells join while intensity >= drop * seed
};

struct CfearCfg {
  std::uint32_t count = 20;      // K-strongest seed count
  double min_value = 31.875;     // z_min, dB
  double radius = 0.5;           // r, meters
  double grid_side = 0.5;        // r/f, meters
  std::uint32_t min_cluster = 5; // p_min
};

inline void validate(const C19Cfg& c) {
  if (c.max_regions < 1) throw std::invalid_argument("c19: l_max must be >= 1");
  if (!(c.region_drop > 0.0 && c.region_drop < 1.0))
    throw std::invalid_argument("c19: region_drop must be in (0, 1)");
}

inline void validate(const CfearCfg& c) {
  if (c.count < 1) throw std::invalid_argument("cfear: k must be >= 1");
  if (!(c.radius > 0.0)) throw std::invalid_argument("cfear: r must be > 0");
  if (!(c.grid_side > 0.0)) throw std::invalid_argument("cfear: grid side must be > 0");
  if (c.min_cluster < 2) throw std::invalid_argument("cfear: p_min must be >= 2");
}

/// Unnormalized 3x3 Prewitt gradient magnitude of a Decibel scan. The
/// azimuth dimension wraps (360 degree continuity); the range dimension
/// reflects at its ends.
inline std::vector<float> prewitt_gradient(const PolarScan& scan) {
  require_unit(scan.unit, PowerUnit::Decibel, "prewitt_gradient");
  scan.validate();
  const auto rows = static_cast<std::ptrdiff_t>(scan.geometry.num_azimuths);
  const auto cols = static_cast<std::ptrdiff_t>(scan.geometry.num_bins);
  std::vector<float> magnitude(scan.geometry.cell_count());

  auto col_reflect = [cols](std::ptrdiff_t b) {
    if (b < 0) return -b - 1;
    if (b >= cols) return 2 * cols - 1 - b;
    return b;
  };

  parallel_for(rows, [&](std::size_t a_begin, std::size_t a_end) {
    for (std::size_t a = a_begin; a < a_end; ++a) {
      const auto up = scan.row(static_cast<std::uint32_t>((a + rows - 1) % rows));
      const auto mid = scan.row(static_cast<std::uint32_t>(a));
      const auto down = scan.row(static_cast<std::uint32_t>((a + 1) % rows));
      float* out = magnitude.data() + a * cols;
      for (std::ptrdiff_t b = 0; b < cols; ++b) {
        const auto bl = col_reflect(b - 1), br = col_reflect(b + 1);
        const double gx = (up[br] + mid[br] + down[br]) - (up[bl] + mid[bl] + down[bl]);
        const double gy = (down[bl] + down[b] + down[br]) - (up[bl] + up[b] + up[br]);
        out[b] = static_cast<float>(std::sqrt(gx * gx + gy * gy));
      }
    }
  });
  return magnitude;
}

/// Region along one azimuth: bins [bin_lo, bin_hi] with the region's
/// strongest cell at peak_bin.
struct AzimuthRegion {
  std::uint32_t azimuth_idx = 0;
  std::uint32_t bin_lo = 0;
  std::uint32_t bin_hi = 0;
  std::uint32_t peak_bin = 0;
  double peak_score = 0.0;
};

/// Cen-2019-style extractor: score cells by intensity times the complement
/// of the normalized Prewitt gradient, greedily grow up to l_max azimuth
/// regions from the best unmasked cells, then keep each region's peak only
/// if an adjacent azimuth (wrapping) holds a region overlapping in bins.
inline PointCloud extract_c19(const PolarScan& scan, const C19Cfg& cfg) {
  require_unit(scan.unit, PowerUnit::Decibel, "extract_c19");
  scan.validate();
  validate(cfg);

  const auto rows = scan.geometry.num_azimuths;
  const auto cols = scan.geometry.num_bins;
  const std::size_t cells = scan.geometry.cell_count();

  const std::vector<float> gradient = prewitt_gradient(scan);
  const auto [gmin_it, gmax_it] = std::minmax_element(gradient.begin(), gradient.end());
  const float gmin = *gmin_it, gmax = *gmax_it;
  const float gspan = gmax > gmin ? gmax - gmin : 1.0f;

  std::vector<float> score(cells);
  for (std::size_t i = 0; i < cells; ++i)
    score[i] = scan.values[i] * (1.0f - (gradient[i] - gmin) / gspan);

  std::vector<std::uint32_t> order(cells);
  for (std::size_t i = 0; i < cells; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::sort(order.begin(), order.end(), [&](std::uint32_t lhs, std::uint32_t rhs) {
    if (score[lhs] != score[rhs]) return score[lhs] > score[rhs];
    return lhs < rhs;
  });

  std::vector<std::uint8_t> masked(cells, 0);
  std::vector<AzimuthRegion> regions;
  std::vector<std::vector<std::uint32_t>> by_azimuth(rows);
  regions.reserve(cfg.max_regions);

  for (std::uint32_t idx : order) {
    if (regions.size() >= cfg.max_regions) break;
    if (score[idx] <= 0.0f) break;  // zero-score cells carry no feature information
    if (masked[idx]) continue;
    const std::uint32_t a = idx / cols;
    const std::uint32_t seed_bin = idx % cols;
    const auto row = scan.row(a);
    const float floor_value = static_cast<float>(cfg.region_drop) * row[seed_bin];

    std::uint32_t lo = seed_bin, hi = seed_bin;
    const std::size_t base = static_cast<std::size_t>(a) * cols;
    while (lo > 0 && !masked[base + lo - 1] && row[lo - 1] >= floor_value) --lo;
    while (hi + 1 < cols && !masked[base + hi + 1] && row[hi + 1] >= floor_value) ++hi;

    std::uint32_t peak = lo;
    for (std::uint32_t b = lo; b <= hi; ++b) {
      masked[base + b] = 1;
      if (row[b] > row[peak]) peak = b;
    }
    by_azimuth[a].push_back(static_cast<std::uint32_t>(regions.size()));
    regions.push_back({a, lo, hi, peak, score[idx]});
  }

  auto overlaps_neighbour = [&](const AzimuthRegion& r) {
    for (const std::uint32_t na :
         {(r.azimuth_idx + 1) % rows, (r.azimuth_idx + rows - 1) % rows}) {
      for (std::uint32_t ri : by_azimuth[na]) {
        const auto& other = regions[ri];
        if (r.bin_lo <= other.bin_hi && other.bin_lo <= r.bin_hi) return true;
      }
    }
    return false;
  };

  PointCloud cloud;
  cloud.source_timestamp = scan.timestamp;
  for (const auto& r : regions) {
    if (!overlaps_neighbour(r)) continue;
    const Vec2 xy = polar_to_cartesian(r.azimuth_idx, r.peak_bin, scan.geometry);
    cloud.points.push_back({xy.x, xy.y, scan.at(r.azimuth_idx, r.peak_bin), r.azimuth_idx,
                            r.peak_bin});
  }
  std::sort(cloud.points.begin(), cloud.points.end(), [](const Point2& lhs, const Point2& rhs) {
    if (lhs.azimuth_idx != rhs.azimuth_idx) return lhs.azimuth_idx < rhs.azimuth_idx;
    return lhs.range_bin < rhs.range_bin;
  });
  return cloud;
}

/// CFEAR-style cluster filter, reduced to cluster means: seed with
/// K-strongest, overlay a square grid, gather the seeds within radius r of
/// each occupied cell's center, drop clusters that are too small or lie on a
/// single azimuth, and emit one mean point per surviving cluster. Provenance
/// indices come from the cluster's strongest member.
inline PointCloud extract_cfear(const PolarScan& scan, const CfearCfg& cfg) {
  require_unit(scan.unit, PowerUnit::Decibel, "extract_cfear");
  scan.validate();
  validate(cfg);

  const PointCloud seeds = extract_kstrongest(scan, {cfg.count, cfg.min_value});

  struct CellKey {
    std::int32_t ix, iy;
    bool operator==(const CellKey&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const CellKey& k) const {
      return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.ix))
                                         << 32) |
                                        static_cast<std::uint32_t>(k.iy));
    }
  };

  const double side = cfg.grid_side;
  auto cell_of = [side](double v) {
    return static_cast<std::int32_t>(std::floor(v / side));
  };

  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> buckets;
  for (std::uint32_t i = 0; i < seeds.points.size(); ++i) {
    const auto& p = seeds.points[i];
    buckets[{cell_of(p.x), cell_of(p.y)}].push_back(i);
  }

  std::vector<CellKey> occupied;
  occupied.reserve(buckets.size());
  for (const auto& [key, _] : buckets) occupied.push_back(key);
  std::sort(occupied.begin(), occupied.end(), [](const CellKey& lhs, const CellKey& rhs) {
    if (lhs.ix != rhs.ix) return lhs.ix < rhs.ix;
    return lhs.iy < rhs.iy;
  });

  PointCloud cloud;
  cloud.source_timestamp = scan.timestamp;
  std::vector<std::uint32_t> cluster;
  for (const CellKey& key : occupied) {
    const double cx = (key.ix + 0.5) * side;
    const double cy = (key.iy + 0.5) * side;

    cluster.clear();
    const std::int32_t x_lo = cell_of(cx - cfg.radius), x_hi = cell_of(cx + cfg.radius);
    const std::int32_t y_lo = cell_of(cy - cfg.radius), y_hi = cell_of(cy + cfg.radius);
    for (std::int32_t ix = x_lo; ix <= x_hi; ++ix)
      for (std::int32_t iy = y_lo; iy <= y_hi; ++iy) {
        const auto it = buckets.find({ix, iy});
        if (it == buckets.end()) continue;
        for (std::uint32_t i : it->second) {
          const auto& p = seeds.points[i];
          const double dx = p.x - cx, dy = p.y - cy;
          if (dx * dx + dy * dy <= cfg.radius * cfg.radius) cluster.push_back(i);
        }
      }

    if (cluster.size() < cfg.min_cluster) continue;
    std::uint32_t first_azimuth = seeds.points[cluster.front()].azimuth_idx;
    bool multi_azimuth = false;
    for (std::uint32_t i : cluster)
      if (seeds.points[i].azimuth_idx != first_azimuth) {
        multi_azimuth = true;
        break;
      }
    if (!multi_azimuth) continue;  // lined up along one azimuth

    double sx = 0.0, sy = 0.0, si = 0.0;
    std::uint32_t strongest = cluster.front();
    for (std::uint32_t i : cluster) {
      const auto& p = seeds.points[i];
      sx += p.x;
      sy += p.y;
      si += p.intensity;
      const auto& s = seeds.points[strongest];
      if (p.intensity > s.intensity ||
          (p.intensity == s.intensity &&
           (p.azimuth_idx < s.azimuth_idx ||
            (p.azimuth_idx == s.azimuth_idx && p.range_bin < s.range_bin))))
        strongest = i;
    }
    const double inv = 1.0 / static_cast<double>(cluster.size());
    cloud.points.push_back({sx * inv, sy * inv, si * inv, seeds.points[strongest].azimuth_idx,
                            seeds.points[strongest].range_bin});
  }
  return cloud;
}

}  // namespace rpx
