#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rpx/scan.hpp"
#include "rpx/threading.hpp"

namespace rpx {

/// Shared sliding-window geometry: N reference cells split into leading and
/// lagging halves of N/2, plus g guard cells on each side of the CUT.
struct CfarWindow {
  std::uint32_t size = 100;  // N
  std::uint32_t guard = 5;   // g per side

  void validate() const {
    if (size < 2 || size % 2 != 0)
      throw std::invalid_argument("CfarWindow: size must be even and >= 2");
  }
};

/// Reference cells around one CUT. Both halves are contiguous slices of the
/// azimuth row, clipped at the array ends; guard cells and the CUT itself
/// are never included.
struct HalfWindows {
  std::span<const double> lead;
  std::span<const double> lag;

  std::size_t total() const { return lead.size() + lag.size(); }
  double cell(std::size_t i) const { return i < lead.size() ? lead[i] : lag[i - lead.size()]; }
};

/// lead = [cut-g-N/2, cut-g), lag = (cut+g, cut+g+N/2], clipped to the row.
inline HalfWindows gather_half_windows(std::span<const double> row, std::size_t cut_idx,
                                       const CfarWindow& window) {
  if (cut_idx >= row.size()) throw std::out_of_range("gather_half_windows: cut_idx out of range");
  const auto n = static_cast<std::ptrdiff_t>(row.size());
  const auto cut = static_cast<std::ptrdiff_t>(cut_idx);
  const auto g = static_cast<std::ptrdiff_t>(window.guard);
  const auto half = static_cast<std::ptrdiff_t>(window.size / 2);
  const std::ptrdiff_t lead_lo = std::clamp<std::ptrdiff_t>(cut - g - half, 0, n);
  const std::ptrdiff_t lead_hi = std::clamp<std::ptrdiff_t>(cut - g, 0, n);
  const std::ptrdiff_t lag_lo = std::clamp<std::ptrdiff_t>(cut + g + 1, 0, n);
  const std::ptrdiff_t lag_hi = std::clamp<std::ptrdiff_t>(cut + g + 1 + half, 0, n);
  return {row.subspan(lead_lo, lead_hi - lead_lo), row.subspan(lag_lo, lag_hi - lag_lo)};
}

/// T = N * (P_fa^(-1/N) - 1). Exact for i.i.d. exponential clutter under a
/// cell-averaging detector with N reference cells.
inline double threshold_scale_from_pfa(double p_fa, std::uint32_t n) {
  if (!(p_fa > 0.0) || p_fa > 1.0)
    throw std::invalid_argument("threshold_scale_from_pfa: P_fa must be in (0, 1]");
  if (n < 1) throw std::invalid_argument("threshold_scale_from_pfa: N must be >= 1");
  return n * (std::pow(p_fa, -1.0 / n) - 1.0);
}

namespace detail {
inline double span_sum(std::span<const double> s) {
  return std::accumulate(s.begin(), s.end(), 0.0);
}
}  // namespace detail

/// Arithmetic mean over both halves, using the actual cell count.
inline double clutter_ca(const HalfWindows& hw) {
  const std::size_t n = hw.total();
  if (n == 0) throw std::invalid_argument("clutter_ca: empty reference window");
  return (detail::span_sum(hw.lead) + detail::span_sum(hw.lag)) / static_cast<double>(n);
}

inline double clutter_cago(const HalfWindows& hw) {
  if (hw.lead.empty() || hw.lag.empty())
    throw std::invalid_argument("clutter_cago: both half-windows must be non-empty");
  return std::max(detail::span_sum(hw.lead) / hw.lead.size(),
                  detail::span_sum(hw.lag) / hw.lag.size());
}

inline double clutter_caso(const HalfWindows& hw) {
  if (hw.lead.empty() || hw.lag.empty())
    throw std::invalid_argument("clutter_caso: both half-windows must be non-empty");
  return std::min(detail::span_sum(hw.lead) / hw.lead.size(),
                  detail::span_sum(hw.lag) / hw.lag.size());
}

/// Improved-switching estimate. Cells above alpha * cut_value count as
/// interferers per half; while both halves stay within max_interferers the
/// mean excludes them, a single violating half is averaged whole, and two
/// violating halves fall back to the plain CA mean.
inline double clutter_is(const HalfWindows& hw, double cut_value, double alpha,
                         std::uint32_t max_interferers) {
  if (!(alpha > 0.0)) throw std::invalid_argument("clutter_is: alpha must be > 0");
  const std::size_t n = hw.total();
  if (n == 0) throw std::invalid_argument("clutter_is: empty reference window");
  const double gate = alpha * cut_value;

  std::size_t interf_lead = 0, interf_lag = 0;
  double clean_sum_lead = 0.0, clean_sum_lag = 0.0;
  for (double v : hw.lead) {
    if (v > gate) ++interf_lead;
    else clean_sum_lead += v;
  }
  for (double v : hw.lag) {
    if (v > gate) ++interf_lag;
    else clean_sum_lag += v;
  }

  const bool lead_ok = interf_lead <= max_interferers;
  const bool lag_ok = interf_lag <= max_interferers;
  if (lead_ok && lag_ok) {
    const std::size_t clean = n - interf_lead - interf_lag;
    if (clean == 0)  // every cell interferes: fall back to CA over all cells
      return (detail::span_sum(hw.lead) + detail::span_sum(hw.lag)) / static_cast<double>(n);
    return (clean_sum_lead + clean_sum_lag) / static_cast<double>(clean);
  }
  if (lead_ok != lag_ok) {
    const auto& side = lead_ok ? hw.lag : hw.lead;
    return detail::span_sum(side) / side.size();
  }
  return (detail::span_sum(hw.lead) + detail::span_sum(hw.lag)) / static_cast<double>(n);
}

/// V_i = n * sum(x^2) / (sum(x))^2 over the given cells.
inline double variability_index(std::span<const double> cells) {
  if (cells.empty()) throw std::invalid_argument("variability_index: no cells");
  double sum = 0.0, sum_sq = 0.0;
  for (double v : cells) {
    sum += v;
    sum_sq += v * v;
  }
  if (sum == 0.0) throw std::invalid_argument("variability_index: all cells zero");
  return cells.size() * sum_sq / (sum * sum);
}

namespace detail {
/// VI dispatch on precomputed half statistics. An all-zero half is constant,
/// hence homogeneous; a zero mean on one side only makes the ratio infinite,
/// hence dissimilar.
inline double vi_dispatch(double sum_lead, double sumsq_lead, std::size_t n_lead, double sum_lag,
                          double sumsq_lag, std::size_t n_lag, double vi_threshold,
                          double mean_ratio_bound) {
  const double mean_lead = sum_lead / n_lead;
  const double mean_lag = sum_lag / n_lag;
  const bool lead_homog =
      sum_lead == 0.0 || n_lead * sumsq_lead / (sum_lead * sum_lead) <= vi_threshold;
  const bool lag_homog = sum_lag == 0.0 || n_lag * sumsq_lag / (sum_lag * sum_lag) <= vi_threshold;

  bool similar;
  if (mean_lead == 0.0 && mean_lag == 0.0) similar = true;
  else if (mean_lead == 0.0 || mean_lag == 0.0) similar = false;
  else {
    const double ratio = mean_lead / mean_lag;
    similar = ratio > 1.0 / mean_ratio_bound && ratio < mean_ratio_bound;
  }

  if (lead_homog && lag_homog)
    return similar ? (sum_lead + sum_lag) / static_cast<double>(n_lead + n_lag)
                   : std::max(mean_lead, mean_lag);
  if (lead_homog) return mean_lead;
  if (lag_homog) return mean_lag;
  return std::min(mean_lead, mean_lag);
}
}  // namespace detail

/// Variability-index estimate: CA on homogeneous-and-similar halves, CA on a
/// single homogeneous half, CAGO across a clutter edge, CASO when both
/// halves are non-homogeneous.
inline double clutter_vi(const HalfWindows& hw, double vi_threshold, double mean_ratio_bound) {
  if (hw.lead.empty() || hw.lag.empty())
    throw std::invalid_argument("clutter_vi: both half-windows must be non-empty");
  double sum_lead = 0.0, sumsq_lead = 0.0, sum_lag = 0.0, sumsq_lag = 0.0;
  for (double v : hw.lead) {
    sum_lead += v;
    sumsq_lead += v * v;
  }
  for (double v : hw.lag) {
    sum_lag += v;
    sumsq_lag += v * v;
  }
  return detail::vi_dispatch(sum_lead, sumsq_lead, hw.lead.size(), sum_lag, sumsq_lag,
                             hw.lag.size(), vi_threshold, mean_ratio_bound);
}

/// Order statistic over the sorted union, index floor(q * (n - 1)); the
/// default q = 0.5 picks the lower median for even counts.
inline double clutter_os(const HalfWindows& hw, double quantile, std::vector<double>& scratch) {
  if (!(quantile > 0.0 && quantile < 1.0))
    throw std::invalid_argument("clutter_os: quantile must be in (0, 1)");
  const std::size_t n = hw.total();
  if (n == 0) throw std::invalid_argument("clutter_os: empty reference window");
  scratch.assign(hw.lead.begin(), hw.lead.end());
  scratch.insert(scratch.end(), hw.lag.begin(), hw.lag.end());
  const auto k = static_cast<std::size_t>(std::floor(quantile * (n - 1)));
  std::nth_element(scratch.begin(), scratch.begin() + k, scratch.end());
  return scratch[k];
}

inline double clutter_os(const HalfWindows& hw, double quantile) {
  std::vector<double> scratch;
  return clutter_os(hw, quantile, scratch);
}

/// Trimmed mean: sort the union, drop `trim` cells from each extreme,
/// average the rest. Requires 2 * trim < n.
inline double clutter_tm(const HalfWindows& hw, std::uint32_t trim, std::vector<double>& scratch) {
  const std::size_t n = hw.total();
  if (2 * static_cast<std::size_t>(trim) >= n)
    throw std::invalid_argument("clutter_tm: trim depth leaves no cells");
  scratch.assign(hw.lead.begin(), hw.lead.end());
  scratch.insert(scratch.end(), hw.lag.begin(), hw.lag.end());
  std::sort(scratch.begin(), scratch.end());
  double sum = 0.0;
  for (std::size_t i = trim; i < n - trim; ++i) sum += scratch[i];
  return sum / static_cast<double>(n - 2 * trim);
}

inline double clutter_tm(const HalfWindows& hw, std::uint32_t trim) {
  std::vector<double> scratch;
  return clutter_tm(hw, trim, scratch);
}

/// Minimum-selected CA: slide a sub-window of size M over the concatenated
/// lead+lag sequence, keep min(first, last) of each placement, average the
/// kept values.
inline double clutter_msca(const HalfWindows& hw, std::uint32_t subwindow) {
  const std::size_t n = hw.total();
  if (subwindow < 2) throw std::invalid_argument("clutter_msca: sub-window must be >= 2");
  if (n < subwindow) throw std::invalid_argument("clutter_msca: window shorter than sub-window");
  const std::size_t placements = n - subwindow + 1;
  double sum = 0.0;
  for (std::size_t j = 0; j < placements; ++j)
    sum += std::min(hw.cell(j), hw.cell(j + subwindow - 1));
  return sum / static_cast<double>(placements);
}

// ---------------------------------------------------------------------------
// Variant configurations. `scale` is the unitless threshold factor T applied
// to the WattSquared clutter estimate. Struct defaults carry the F1-tuned
// values so a bare `extractor=ca` is runnable.
// ---------------------------------------------------------------------------

struct CaCfg {
  double scale = 35.0;
};
struct CagoCfg {
  double scale = 25.0;
};
struct CasoCfg {
  double scale = 400.0;
};
struct IsCfg {
  double scale = 15.0;
  double cut_scale = 0.075;            // alpha
  std::uint32_t max_interferers = 6;   // I
};
struct ViCfg {
  double scale = 400.0;
  double variability = 5.0;    // V
  double mean_ratio = 1.5;     // R
};
struct OsCfg {
  double scale = 120.0;
  double quantile = 0.5;
};
struct TmCfg {
  double scale = 100.0;
  std::uint32_t trim = 30;  // N_T per extreme
};
struct MscaCfg {
  double scale = 100.0;
  std::uint32_t subwindow = 8;  // M
};
struct BfarCfg {
  double scale = 15.0;
  double offset_db = 19.13;  // b, displayed in dB; squared Watts in calculation
};

using CfarVariant =
    std::variant<CaCfg, CagoCfg, CasoCfg, IsCfg, ViCfg, OsCfg, TmCfg, MscaCfg, BfarCfg>;

inline void validate(const CfarVariant& cfg, const CfarWindow& window) {
  window.validate();
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if (!(c.scale > 0.0)) throw std::invalid_argument("cfar: T must be > 0");
        if constexpr (std::is_same_v<T, IsCfg>) {
          if (!(c.cut_scale > 0.0)) throw std::invalid_argument("is: alpha must be > 0");
        } else if constexpr (std::is_same_v<T, ViCfg>) {
          if (!(c.variability > 0.0)) throw std::invalid_argument("vi: V must be > 0");
          if (!(c.mean_ratio > 1.0)) throw std::invalid_argument("vi: R must be > 1");
        } else if constexpr (std::is_same_v<T, OsCfg>) {
          if (!(c.quantile > 0.0 && c.quantile < 1.0))
            throw std::invalid_argument("os: quantile must be in (0, 1)");
        } else if constexpr (std::is_same_v<T, TmCfg>) {
          if (c.trim >= window.size / 2)
            throw std::invalid_argument("tm: N_T must be < N/2");
        } else if constexpr (std::is_same_v<T, MscaCfg>) {
          if (c.subwindow < 2 || c.subwindow > window.size / 2)
            throw std::invalid_argument("msca: M must be in [2, N/2]");
        }
      },
      cfg);
}

namespace detail {

/// Half-window index bounds for one CUT; mirrors gather_half_windows.
struct WindowBounds {
  std::ptrdiff_t lead_lo, lead_hi, lag_lo, lag_hi;

  static WindowBounds at(std::ptrdiff_t cut, std::ptrdiff_t n, const CfarWindow& w) {
    const auto g = static_cast<std::ptrdiff_t>(w.guard);
    const auto half = static_cast<std::ptrdiff_t>(w.size / 2);
    return {std::clamp<std::ptrdiff_t>(cut - g - half, 0, n),
            std::clamp<std::ptrdiff_t>(cut - g, 0, n), std::clamp<std::ptrdiff_t>(cut + g + 1, 0, n),
            std::clamp<std::ptrdiff_t>(cut + g + 1 + half, 0, n)};
  }
  std::ptrdiff_t lead_count() const { return lead_hi - lead_lo; }
  std::ptrdiff_t lag_count() const { return lag_hi - lag_lo; }
};

inline void sorted_insert(std::vector<double>& v, double x) {
  v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}
inline void sorted_erase(std::vector<double>& v, double x) {
  v.erase(std::lower_bound(v.begin(), v.end(), x));
}

/// Sliding sorted view of the clipped reference window. Boundaries advance
/// by at most one cell per CUT step, so updates are O(window) memmoves.
struct SortedWindow {
  std::vector<double> cells;
  WindowBounds bounds{0, 0, 0, 0};

  void reset(std::span<const double> row, std::ptrdiff_t cut, const CfarWindow& w) {
    bounds = WindowBounds::at(cut, static_cast<std::ptrdiff_t>(row.size()), w);
    cells.clear();
    for (std::ptrdiff_t i = bounds.lead_lo; i < bounds.lead_hi; ++i) cells.push_back(row[i]);
    for (std::ptrdiff_t i = bounds.lag_lo; i < bounds.lag_hi; ++i) cells.push_back(row[i]);
    std::sort(cells.begin(), cells.end());
  }

  void advance(std::span<const double> row, std::ptrdiff_t cut, const CfarWindow& w) {
    const auto next = WindowBounds::at(cut, static_cast<std::ptrdiff_t>(row.size()), w);
    for (std::ptrdiff_t i = bounds.lead_lo; i < next.lead_lo; ++i) sorted_erase(cells, row[i]);
    for (std::ptrdiff_t i = bounds.lead_hi; i < next.lead_hi; ++i) sorted_insert(cells, row[i]);
    for (std::ptrdiff_t i = bounds.lag_lo; i < next.lag_lo; ++i) sorted_erase(cells, row[i]);
    for (std::ptrdiff_t i = bounds.lag_hi; i < next.lag_hi; ++i) sorted_insert(cells, row[i]);
    bounds = next;
  }
};

/// Per-row state shared by the variant estimators: prefix sums give O(1)
/// half-window sums; the squared prefix feeds the VI dispatch.
struct RowState {
  std::span<const double> row;
  std::vector<double> prefix;
  std::vector<double> prefix_sq;

  void build(std::span<const double> r, bool need_squares) {
    row = r;
    prefix.resize(r.size() + 1);
    prefix[0] = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) prefix[i + 1] = prefix[i] + r[i];
    if (need_squares) {
      prefix_sq.resize(r.size() + 1);
      prefix_sq[0] = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) prefix_sq[i + 1] = prefix_sq[i] + r[i] * r[i];
    }
  }
  double sum(std::ptrdiff_t lo, std::ptrdiff_t hi) const { return prefix[hi] - prefix[lo]; }
  double sum_sq(std::ptrdiff_t lo, std::ptrdiff_t hi) const {
    return prefix_sq[hi] - prefix_sq[lo];
  }
  HalfWindows halves(const WindowBounds& b) const {
    return {row.subspan(b.lead_lo, b.lead_count()), row.subspan(b.lag_lo, b.lag_count())};
  }
};

}  // namespace detail

/// Runs one CFAR variant over a WattSquared scan. Every CUT whose clipped
/// window has both halves non-empty is tested against S = T*Z + b_eff, with
/// b_eff = (10^(b_db/10))^2 for BFAR and 0 otherwise. Detections carry the
/// CUT power converted back to dB.
///
/// Edge contract: half-windows clip at row ends and means use actual counts;
/// TM trim depth is clamped to (n-1)/2 on clipped windows; MSCA skips CUTs
/// whose clipped window holds fewer than M cells.
inline PointCloud run_cfar(const PolarScanW2& scan, const CfarVariant& cfg,
                           const CfarWindow& window) {
  require_unit(scan.unit, PowerUnit::WattSquared, "run_cfar");
  scan.validate();
  validate(cfg, window);

  const auto n = static_cast<std::ptrdiff_t>(scan.geometry.num_bins);
  const auto g = static_cast<std::ptrdiff_t>(window.guard);
  const std::ptrdiff_t cut_lo = g + 1;        // smallest cut with a non-empty lead
  const std::ptrdiff_t cut_hi = n - g - 2;    // largest cut with a non-empty lag

  const double scale = std::visit([](const auto& c) { return c.scale; }, cfg);
  double b_eff = 0.0;
  if (const auto* bfar = std::get_if<BfarCfg>(&cfg)) {
    const double b_watt = std::pow(10.0, bfar->offset_db / 10.0);
    b_eff = b_watt * b_watt;
  }
  const bool needs_sorted = std::holds_alternative<OsCfg>(cfg) || std::holds_alternative<TmCfg>(cfg);
  const bool needs_squares = std::holds_alternative<ViCfg>(cfg);

  std::vector<std::vector<Point2>> per_azimuth(scan.geometry.num_azimuths);

  parallel_for(scan.geometry.num_azimuths, [&](std::size_t a_begin, std::size_t a_end) {
    detail::RowState rs;
    detail::SortedWindow sorted;
    for (std::size_t a = a_begin; a < a_end; ++a) {
      const auto azimuth = static_cast<std::uint32_t>(a);
      const auto row = scan.row(azimuth);
      if (cut_lo > cut_hi) continue;
      rs.build(row, needs_squares);
      if (needs_sorted) sorted.reset(row, cut_lo, window);

      auto& out = per_azimuth[a];
      for (std::ptrdiff_t cut = cut_lo; cut <= cut_hi; ++cut) {
        if (needs_sorted && cut > cut_lo) sorted.advance(row, cut, window);
        const auto b = detail::WindowBounds::at(cut, n, window);
        const auto n_lead = b.lead_count();
        const auto n_lag = b.lag_count();
        const double cut_value = row[cut];

        double z = 0.0;
        bool skip = false;
        switch (cfg.index()) {
          case 0:  // CA
          case 8:  // BFAR shares the CA estimate
            z = (rs.sum(b.lead_lo, b.lead_hi) + rs.sum(b.lag_lo, b.lag_hi)) /
                static_cast<double>(n_lead + n_lag);
            break;
          case 1:  // CAGO
            z = std::max(rs.sum(b.lead_lo, b.lead_hi) / n_lead,
                         rs.sum(b.lag_lo, b.lag_hi) / n_lag);
            break;
          case 2:  // CASO
            z = std::min(rs.sum(b.lead_lo, b.lead_hi) / n_lead,
                         rs.sum(b.lag_lo, b.lag_hi) / n_lag);
            break;
          case 3: {  // IS
            const auto& c = std::get<IsCfg>(cfg);
            z = clutter_is(rs.halves(b), cut_value, c.cut_scale, c.max_interferers);
            break;
          }
          case 4: {  // VI
            const auto& c = std::get<ViCfg>(cfg);
            z = detail::vi_dispatch(rs.sum(b.lead_lo, b.lead_hi), rs.sum_sq(b.lead_lo, b.lead_hi),
                                    n_lead, rs.sum(b.lag_lo, b.lag_hi),
                                    rs.sum_sq(b.lag_lo, b.lag_hi), n_lag, c.variability,
                                    c.mean_ratio);
            break;
          }
          case 5: {  // OS
            const auto& c = std::get<OsCfg>(cfg);
            const auto count = sorted.cells.size();
            const auto k = static_cast<std::size_t>(std::floor(c.quantile * (count - 1)));
            z = sorted.cells[k];
            break;
          }
          case 6: {  // TM
            const auto& c = std::get<TmCfg>(cfg);
            const std::size_t count = sorted.cells.size();
            const std::size_t trim =
                std::min<std::size_t>(c.trim, (count - 1) / 2);  // clamp on clipped windows
            double sum = 0.0;
            for (std::size_t i = trim; i < count - trim; ++i) sum += sorted.cells[i];
            z = sum / static_cast<double>(count - 2 * trim);
            break;
          }
          case 7: {  // MSCA
            const auto& c = std::get<MscaCfg>(cfg);
            if (static_cast<std::size_t>(n_lead + n_lag) < c.subwindow) {
              skip = true;
              break;
            }
            z = clutter_msca(rs.halves(b), c.subwindow);
            break;
          }
        }
        if (skip) continue;

        if (cut_value > scale * z + b_eff) {
          const Vec2 xy = polar_to_cartesian(azimuth, static_cast<std::uint32_t>(cut),
                                             scan.geometry);
          out.push_back({xy.x, xy.y, 5.0 * std::log10(cut_value), azimuth,
                         static_cast<std::uint32_t>(cut)});
        }
      }
    }
  });

  PointCloud cloud;
  cloud.source_timestamp = scan.timestamp;
  for (auto& pts : per_azimuth)
    cloud.points.insert(cloud.points.end(), pts.begin(), pts.end());
  return cloud;
}

}  // namespace rpx
