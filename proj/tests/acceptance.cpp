// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// nonzero exit when anything fails. Thresholds and tolerances are fixed in
// code; run single-threaded so the timing criteria mean what they say.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cfar_oracle.hpp"
#include "rpx/bench.hpp"
#include "rpx/config.hpp"
#include "rpx/dataset.hpp"
#include "rpx/icp.hpp"
#include "rpx/metrics.hpp"
#include "rpx/odometry.hpp"
#include "rpx/threading.hpp"
#include "rpx/tuning.hpp"

using namespace rpx;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

PolarScanW2 exponential_scan(std::uint32_t azimuths, std::uint32_t bins, std::uint64_t seed,
                             double target_rate = 0.0, double target_power = 0.0) {
  PolarScanW2 s;
  s.geometry = {azimuths, bins, 0.0596, 0.0, 4.0};
  s.unit = PowerUnit::WattSquared;
  s.values.resize(s.geometry.cell_count());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : s.values) {
    v = -std::log1p(-u(rng));
    if (target_rate > 0.0 && u(rng) < target_rate) v += target_power * u(rng);
  }
  return s;
}

oracle::DetectionSet detections(const PolarScanW2& s, const CfarVariant& v,
                                const CfarWindow& w = {}) {
  return oracle::to_set(run_cfar(s, v, w));
}

// --- 1. CFAR statistical soundness --------------------------------------

Outcome criterion_statistical_pfa() {
  const double t0 = now_seconds();
  const double p_fa = 1e-2;
  const CfarWindow window{100, 5};
  const double t_scale = threshold_scale_from_pfa(p_fa, window.size);

  const std::uint32_t bins = 1200;
  const std::uint32_t full_lo = window.guard + window.size / 2;        // 55
  const std::uint32_t full_hi = bins - 1 - window.guard - window.size / 2;  // 1144

  std::uint64_t cuts = 0, alarms = 0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto scan = exponential_scan(64, bins, 9000 + seed);
    cuts += static_cast<std::uint64_t>(scan.geometry.num_azimuths) * (full_hi - full_lo + 1);
    for (const auto& p : run_cfar(scan, CaCfg{t_scale}, window).points)
      if (p.range_bin >= full_lo && p.range_bin <= full_hi) ++alarms;
  }
  const double empirical = static_cast<double>(alarms) / static_cast<double>(cuts);
  const double elapsed = now_seconds() - t0;
  const bool in_band = empirical > 0.85 * p_fa && empirical < 1.15 * p_fa;
  return {in_band && cuts >= 1000000 && elapsed < 30.0,
          fmt("T=%.4f, %llu full-window CUTs, empirical Pfa %.5f (target 0.01 +/-15%%), %.1f s",
              t_scale, static_cast<unsigned long long>(cuts), empirical, elapsed)};
}

// --- 2. Oracle equivalence ------------------------------------------------

Outcome criterion_oracle_equivalence() {
  const double t0 = now_seconds();
  const CfarWindow window{100, 5};
  const struct {
    CfarVariant impl;
    oracle::Params ref;
  } cases[] = {
      {CaCfg{5.0}, {oracle::Kind::Ca, 5.0}},
      {CagoCfg{5.0}, {oracle::Kind::Cago, 5.0}},
      {CasoCfg{8.0}, {oracle::Kind::Caso, 8.0}},
      {IsCfg{5.0, 0.25, 6}, {oracle::Kind::Is, 5.0, 0.25, 6}},
      {ViCfg{5.0, 1.8, 1.5}, {oracle::Kind::Vi, 5.0, 0.25, 6, 1.8, 1.5}},
      {OsCfg{7.0, 0.5}, {oracle::Kind::Os, 7.0, 0.25, 6, 5.0, 1.5, 0.5}},
      {TmCfg{6.0, 10}, {oracle::Kind::Tm, 6.0, 0.25, 6, 5.0, 1.5, 0.5, 10}},
      {MscaCfg{8.0, 8}, {oracle::Kind::Msca, 8.0, 0.25, 6, 5.0, 1.5, 0.5, 10, 8}},
      {BfarCfg{5.0, 1.5}, {oracle::Kind::Bfar, 5.0, 0.25, 6, 5.0, 1.5, 0.5, 10, 8, 1.5}},
  };

  std::uint64_t compared = 0;
  for (std::uint32_t scan_idx = 0; scan_idx < 100; ++scan_idx) {
    const auto scan = exponential_scan(64, 512, 100000 + scan_idx, 0.01, 400.0);
    for (const auto& c : cases) {
      const auto got = detections(scan, c.impl, window);
      const auto want = oracle::run(scan, c.ref, window.size, window.guard);
      if (got != want)
        return {false, fmt("mismatch on scan %u variant %zu (got %zu, want %zu detections)",
                           scan_idx, static_cast<std::size_t>(&c - cases), got.size(),
                           want.size())};
      compared += want.size();
    }
  }
  const double elapsed = now_seconds() - t0;
  return {elapsed < 60.0,
          fmt("9 variants x 100 scans identical (%llu detections compared), %.1f s",
              static_cast<unsigned long long>(compared), elapsed)};
}

// --- 3. Degeneracy identities ----------------------------------------------

Outcome criterion_degeneracies() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // TM with the maximal odd trim picks exactly the median cell
  for (int trial = 0; trial < 100000; ++trial) {
    const std::size_t n = 51 + 2 * (rng() % 25);  // odd sizes 51..99
    std::vector<double> cells(n);
    for (auto& c : cells) c = -std::log1p(-u(rng));
    const std::size_t lead_n = 1 + rng() % (n - 1);
    const HalfWindows hw{{cells.data(), lead_n}, {cells.data() + lead_n, n - lead_n}};
    if (clutter_tm(hw, static_cast<std::uint32_t>((n - 1) / 2)) != clutter_os(hw, 0.5))
      return {false, "TM(maximal odd trim) != OS(median)"};
  }

  // VI on constant equal halves equals CA exactly
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> cells(100, 1e-3 + 40.0 * u(rng));
    const HalfWindows hw{{cells.data(), 50}, {cells.data() + 50, 50}};
    if (clutter_vi(hw, 1.5, 1.5) != clutter_ca(hw))
      return {false, "VI(constant equal halves) != CA"};
  }

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto scan = exponential_scan(16, 400, 200000 + seed, 0.01, 300.0);
    const auto ca = detections(scan, CaCfg{4.5});
    if (detections(scan, TmCfg{4.5, 0}) != ca) return {false, "TM(N_T=0) != CA"};
    if (detections(scan, BfarCfg{4.5, -std::numeric_limits<double>::infinity()}) != ca)
      return {false, "BFAR(b_eff=0) != CA"};
    if (detections(scan, ViCfg{4.5, 1e15, 1e15}) != ca)
      return {false, "VI(all homogeneous-similar) != CA"};
    if (detections(scan, IsCfg{4.5, 1e12, 6}) != ca)
      return {false, "IS(non-interfering alpha) != CA"};
  }
  return {true, "TM/OS, VI, BFAR, IS identities exact over randomized inputs"};
}

// --- 4. Containment chain ---------------------------------------------------

Outcome criterion_containment() {
  std::uint64_t total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto scan = exponential_scan(16, 400, 300000 + seed, 0.02, 200.0);
    const double t = 4.0;
    const auto cago = detections(scan, CagoCfg{t});
    const auto ca = detections(scan, CaCfg{t});
    const auto caso = detections(scan, CasoCfg{t});
    if (!std::includes(ca.begin(), ca.end(), cago.begin(), cago.end()))
      return {false, fmt("CAGO not within CA on scan %llu", (unsigned long long)seed)};
    if (!std::includes(caso.begin(), caso.end(), ca.begin(), ca.end()))
      return {false, fmt("CA not within CASO on scan %llu", (unsigned long long)seed)};
    total += caso.size();
  }
  return {true, fmt("CAGO within CA within CASO on 50 scans (largest sets %llu detections)",
                    static_cast<unsigned long long>(total))};
}

// --- 5. Scale and unit-chain equivariance -----------------------------------

Outcome criterion_scale_equivariance() {
  const std::vector<CfarVariant> variants = {
      CaCfg{4.0},      CagoCfg{4.0},    CasoCfg{4.0},
      IsCfg{4.0, 0.25, 6}, ViCfg{4.0, 5.0, 1.5}, OsCfg{6.0, 0.5},
      TmCfg{4.0, 10},  MscaCfg{6.0, 8},
      BfarCfg{4.0, -std::numeric_limits<double>::infinity()}};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto base = exponential_scan(16, 400, 400000 + seed, 0.02, 200.0);
    for (const double gamma : {1e-3, 1.0, 1e3}) {
      PolarScanW2 scaled = base;
      for (auto& v : scaled.values) v *= gamma;
      for (const auto& variant : variants)
        if (detections(base, variant) != detections(scaled, variant))
          return {false, fmt("CFAR detection set changed under gamma=%g", gamma)};
    }
  }

  // unit-chain invariance: K-strongest / CFEAR index selection
  World world = make_world(5, 120.0, 120);
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 30.0;
  preset.beam_width_azimuths = 1.0;
  const auto [db_scan, labels] = render_scan(world, {}, preset, 71);

  const double z_min_db = 31.875;
  const auto z_w = std::pow(10.0, z_min_db / 10.0);
  std::vector<std::uint32_t> db_bins, w_bins, w2_bins;
  std::vector<float> w_row(db_scan.geometry.num_bins);
  std::vector<double> w2_row(db_scan.geometry.num_bins);
  for (std::uint32_t a = 0; a < db_scan.geometry.num_azimuths; ++a) {
    const auto row = db_scan.row(a);
    for (std::size_t i = 0; i < row.size(); ++i) {
      w_row[i] = std::pow(10.0f, row[i] / 10.0f);
      w2_row[i] = static_cast<double>(w_row[i]) * w_row[i];
    }
    detail::kstrongest_row<float>(row, static_cast<float>(z_min_db), 12, db_bins);
    detail::kstrongest_row<float>(w_row, static_cast<float>(z_w), 12, w_bins);
    detail::kstrongest_row<double>(w2_row, z_w * z_w, 12, w2_bins);
    if (db_bins != w_bins || db_bins != w2_bins)
      return {false, fmt("K-strongest selection changed along the unit chain (azimuth %u)", a)};
  }

  CfearCfg cfear;
  cfear.count = 12;
  cfear.min_value = z_min_db;
  cfear.radius = 1.5;
  const PointCloud cloud_db = extract_cfear(db_scan, cfear);

  PolarScan watt_tagged = db_scan;  // same grid expressed in Watts
  for (auto& v : watt_tagged.values) v = std::pow(10.0f, v / 10.0f);
  CfearCfg cfear_w = cfear;
  cfear_w.min_value = z_w;
  const PointCloud cloud_w = extract_cfear(watt_tagged, cfear_w);

  if (cloud_db.points.size() != cloud_w.points.size())
    return {false, "CFEAR cluster count changed along the unit chain"};
  for (std::size_t i = 0; i < cloud_db.points.size(); ++i) {
    const auto& a = cloud_db.points[i];
    const auto& b = cloud_w.points[i];
    if (a.azimuth_idx != b.azimuth_idx || a.range_bin != b.range_bin || a.x != b.x || a.y != b.y)
      return {false, "CFEAR selected indices changed along the unit chain"};
  }
  return {true, fmt("9 CFAR variants invariant under gamma {1e-3,1,1e3}; K-strongest and CFEAR "
                    "(%zu clusters) invariant along dB/W/W^2",
                    cloud_db.points.size())};
}

// --- 6. ICP exactness --------------------------------------------------------

Outcome criterion_icp_exactness() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double deg = std::numbers::pi / 180.0;

  IcpConfig cfg;
  cfg.max_correspondence_dist = 10.0;
  cfg.trim_fraction = 0.0;
  cfg.convergence_eps = 1e-11;
  cfg.max_iterations = 200;

  double worst_t = 0.0, worst_r = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    PointCloud source;
    for (int i = 0; i < 500; ++i)
      source.points.push_back({u(rng) * 10.0, u(rng) * 10.0, 0.0, 0, 0});
    const Pose2 truth{u(rng), u(rng), 10.0 * deg * u(rng)};

    std::vector<Vec2> target;
    for (const auto& p : source.points) target.push_back(transform_point(truth, {p.x, p.y}));
    const GridIndex index(target, cfg.max_correspondence_dist);

    const IcpResult r = icp_align(source, index, Pose2{}, cfg);
    if (!r.ok) return {false, fmt("ICP failed on trial %d", trial)};
    const double dt = std::hypot(r.pose.x - truth.x, r.pose.y - truth.y);
    const double dr = std::abs(wrap_angle(r.pose.theta - truth.theta));
    worst_t = std::max(worst_t, dt);
    worst_r = std::max(worst_r, dr);
    if (dt > 1e-6 || dr > 1e-8)
      return {false, fmt("trial %d: translation error %.3e m, rotation error %.3e rad", trial,
                         dt, dr)};
  }
  return {true, fmt("100/100 recovered; worst errors %.2e m / %.2e rad", worst_t, worst_r)};
}

// --- 7. Metric oracle ----------------------------------------------------------

Outcome criterion_metric_oracle() {
  Trajectory gt;
  for (std::size_t i = 0; i < 401; ++i) gt.push_back({i * 0.25, {i * 2.5, 0.0, 0.0}});

  const OdomErrorReport self = kitti_errors(gt, gt);
  if (!self.valid || self.ate_percent != 0.0 || self.are_deg_per_m != 0.0)
    return {false, "kitti_errors(gt, gt) is not exactly zero"};

  Trajectory scaled = gt;
  for (auto& tp : scaled) tp.pose.x *= 1.01;
  const OdomErrorReport s = kitti_errors(gt, scaled);
  if (std::abs(s.ate_percent - 1.0) > 1e-9 || s.are_deg_per_m != 0.0)
    return {false, fmt("scaled line ATE %.12f%% (want 1.0 +/- 1e-9)", s.ate_percent)};

  const Pose2 g{31.0, -12.0, 2.1};
  Trajectory moved;
  for (const auto& tp : gt) moved.push_back({tp.timestamp, compose(g, tp.pose)});
  const OdomErrorReport m = kitti_errors(gt, moved);
  if (std::abs(m.ate_percent) > 1e-9 || std::abs(m.are_deg_per_m) > 1e-9)
    return {false, "global rigid transform did not cancel"};

  return {true, fmt("identity (0,0); scaled line ATE %.10f%%; gauge shift (%.1e, %.1e)",
                    s.ate_percent, m.ate_percent, m.are_deg_per_m)};
}

// --- 8/9. End-to-end synthetic comparison + runtime ordering ------------------

const fs::path& acceptance_dataset() {
  static const fs::path root = [] {
    const fs::path dir = fs::temp_directory_path() / "rpx_acceptance_data";
    fs::remove_all(dir);
    SensorPreset preset = SensorPreset::f1();
    preset.max_range = 50.0;
    preset.beam_width_azimuths = 1.0;
    const Trajectory traj =
        make_trajectory(PathShape::FigureEight, 1000.0, preset.rotation_rate);
    double reach = 0.0;
    for (const auto& tp : traj)
      reach = std::max({reach, std::abs(tp.pose.x), std::abs(tp.pose.y)});
    const World world = make_world(2026, 2.0 * (reach + preset.max_range), 300);
    generate_sequence(world, traj, preset, 2026, dir / "seq0");
    return dir;
  }();
  return root;
}

struct SweepPlan {
  std::string base;
  std::vector<ParamAxis> axes;
};

std::vector<SweepPlan> acceptance_sweeps() {
  return {
      {"ca T=35", {{"T", {18, 40, 90}}}},
      {"cago T=25", {{"T", {18, 40, 90}}}},
      {"caso T=400", {{"T", {30, 70, 160}}}},
      {"is T=15 alpha=0.075 I=6", {{"T", {18, 40, 90}}}},
      {"vi T=400 V=5 R=1.5", {{"T", {30, 70, 160}}}},
      {"os T=120 q=0.5", {{"T", {100, 250, 600}}}},
      {"tm T=100 N_T=30", {{"T", {40, 100, 250}}}},
      {"msca T=100 M=8", {{"T", {70, 160, 360}}}},
      {"bfar T=15 b=19.13", {{"T", {18, 36}}, {"b", {17, 21}}}},
      {"kstr K=5 z_min=31.875", {{"K", {5, 12, 25}}}},
      {"c18 w_binom=10 z_q=2.75", {{"w_binom", {6, 12}}, {"z_q", {2.5, 4}}}},
      {"c19 l_max=400", {{"l_max", {300, 600}}}},
      {"cfear k=20 z_min=31.875 r=0.5", {{"r", {0.5, 1.5}}}},
  };
}

IcpConfig acceptance_icp() {
  IcpConfig cfg;
  cfg.max_correspondence_dist = 4.0;
  cfg.trim_fraction = 0.15;
  return cfg;
}

Outcome criterion_end_to_end() {
  const double t0 = now_seconds();
  const fs::path& dataset = acceptance_dataset();

  std::map<std::string, double> tuned_ate;
  std::string rows;
  for (const auto& plan : acceptance_sweeps()) {
    SweepSpec spec;
    spec.base = parse_extractor_config(plan.base);
    spec.coarse = plan.axes;
    spec.fine_stage = false;
    spec.train = {"seq0"};
    const SweepResult result = run_sweep(spec, dataset, acceptance_icp());
    const std::string name = kind_name(kind_of(spec.base));
    if (result.incumbent < 0) return {false, fmt("every %s combo failed", name.c_str())};
    tuned_ate[name] = result.incumbent_row().ate_percent;
    rows += fmt("%s=%.2f%% ", name.c_str(), result.incumbent_row().ate_percent);
  }

  const auto [min_it, max_it] =
      std::minmax_element(tuned_ate.begin(), tuned_ate.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; });
  const double best = min_it->second, worst = max_it->second;
  const double spread = (worst - best) / worst;
  const double elapsed = now_seconds() - t0;

  const bool kstr_ok = tuned_ate.at("kstr") < 3.0;
  const bool spread_ok = spread >= 0.20;
  const bool time_ok = elapsed < 1800.0;
  return {kstr_ok && spread_ok && time_ok,
          fmt("tuned ATE: %s| best %s %.2f%%, worst %s %.2f%%, spread %.1f%%, %.0f s",
              rows.c_str(), min_it->first.c_str(), best, max_it->first.c_str(), worst,
              spread * 100.0, elapsed)};
}

Outcome criterion_runtime_ordering() {
  const fs::path& dataset = acceptance_dataset();
  auto scans = list_scan_files(dataset / "seq0");
  scans.resize(std::min<std::size_t>(scans.size(), 20));

  std::vector<PolarScan> loaded;
  for (const auto& path : scans) loaded.push_back(read_scan(path));

  const auto time_extractor = [&](const ExtractorConfig& cfg) {
    double total_ms = 0.0;
    for (const auto& scan : loaded) {
      const auto t0 = std::chrono::steady_clock::now();
      const PointCloud cloud = extract(scan, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
      (void)cloud;
    }
    return total_ms / static_cast<double>(loaded.size());
  };

  const double kstr_ms = time_extractor(parse_extractor_config("kstr K=12 z_min=31.875"));
  const double os_ms = time_extractor(parse_extractor_config("os T=250 q=0.5"));
  return {kstr_ms < os_ms,
          fmt("mean per-frame extraction: kstr %.2f ms < os %.2f ms over %zu scans", kstr_ms,
              os_ms, loaded.size())};
}

// --- 10. Bench determinism ------------------------------------------------------

Outcome criterion_bench_determinism() {
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 15.0;
  preset.beam_width_azimuths = 0.8;
  const Trajectory traj = make_trajectory(PathShape::Line, 110.0, preset.rotation_rate);

  const fs::path dir_a = fs::temp_directory_path() / "rpx_acc_det_a";
  const fs::path dir_b = fs::temp_directory_path() / "rpx_acc_det_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  const World world = make_world(55, 300.0, 2500);
  generate_sequence(world, traj, preset, 55, dir_a / "seq0");
  generate_sequence(world, traj, preset, 55, dir_b / "seq0");

  const auto entries = f1_default_configs();
  const BenchResult first = run_bench(dir_a / "seq0", entries, acceptance_icp());
  const BenchResult second = run_bench(dir_b / "seq0", entries, acceptance_icp());
  write_bench_csv(first, dir_a / "bench.csv");
  write_bench_csv(second, dir_b / "bench.csv");

  const std::string bytes_a = detail::read_file_bytes(dir_a / "bench.csv");
  const std::string bytes_b = detail::read_file_bytes(dir_b / "bench.csv");
  return {bytes_a == bytes_b && first.rows.size() == 13,
          fmt("13 default configs, bench.csv %zu bytes, reruns identical: %s", bytes_a.size(),
              bytes_a == bytes_b ? "yes" : "NO")};
}

// --- 11. Detection quality monotonicity -------------------------------------------

Outcome criterion_detection_monotonicity() {
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 20.0;
  preset.beam_width_azimuths = 0.8;
  const World world = make_world(77, 120.0, 250);

  std::vector<PolarScan> scans;
  std::vector<DetectionLabels> labels;
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto [scan, label] = render_scan(world, {}, preset, 7700 ^ i);
    scans.push_back(std::move(scan));
    labels.push_back(std::move(label));
  }

  const std::vector<double> ladder = {10, 20, 40, 80, 160};
  std::vector<double> pd, pfa;
  std::string detail_str;
  for (double t : ladder) {
    DetectionReport total;
    for (std::size_t i = 0; i < scans.size(); ++i) {
      const PointCloud cloud = run_cfar(square_law(to_watts(scans[i])), CaCfg{t}, {});
      total = merge(total, detection_metrics(cloud, labels[i], 1));
    }
    pd.push_back(total.pd);
    pfa.push_back(total.pfa);
    detail_str += fmt("T=%g:(%.3f,%.2e) ", t, total.pd, total.pfa);
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (pd[i] > pd[i - 1] + 1e-15) return {false, "Pd increased with T: " + detail_str};
    if (pfa[i] > pfa[i - 1] + 1e-15) return {false, "Pfa increased with T: " + detail_str};
  }
  return {pd.front() > 0.0, "Pd/Pfa non-increasing over the T ladder: " + detail_str};
}

}  // namespace

int main() {
  set_worker_threads(1);  // timing criteria are single-thread contracts

  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "cfar statistical soundness", criterion_statistical_pfa},
      {2, "oracle equivalence (9 variants)", criterion_oracle_equivalence},
      {3, "degeneracy identities", criterion_degeneracies},
      {4, "containment chain CAGO/CA/CASO", criterion_containment},
      {5, "scale and unit-chain equivariance", criterion_scale_equivariance},
      {6, "icp exactness", criterion_icp_exactness},
      {7, "metric oracle", criterion_metric_oracle},
      {8, "end-to-end synthetic comparison", criterion_end_to_end},
      {9, "runtime ordering kstr < os", criterion_runtime_ordering},
      {10, "bench determinism", criterion_bench_determinism},
      {11, "detection quality monotonicity", criterion_detection_monotonicity},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    const double t0 = now_seconds();
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = now_seconds() - t0;
    std::printf("[%s] %2d %-36s (%7.1f s)  %s\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                entry.name, elapsed, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures == 0) std::printf("all 11 acceptance criteria passed\n");
  else std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
