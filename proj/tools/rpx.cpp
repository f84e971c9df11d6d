// Command-line front end wiring the library together: dataset synthesis,
// extraction, odometry, evaluation, parameter sweeps, and benchmark tables.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rpx/bench.hpp"
#include "rpx/config.hpp"
#include "rpx/dataset.hpp"
#include "rpx/io.hpp"
#include "rpx/metrics.hpp"
#include "rpx/odometry.hpp"
#include "rpx/threading.hpp"
#include "rpx/tuning.hpp"

namespace fs = std::filesystem;

namespace {

// "@path" loads the config text from a file (as written by `sweep`).
rpx::ExtractorConfig load_extractor_config(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw std::runtime_error("cannot open extractor config file " + arg.substr(1));
    std::string line;
    std::getline(in, line);
    return rpx::parse_extractor_config(line);
  }
  return rpx::parse_extractor_config(arg);
}

std::vector<rpx::NamedConfig> load_bench_configs(const std::string& arg) {
  if (arg == "f1-defaults") return rpx::f1_default_configs();
  if (arg == "f2-defaults") return rpx::f2_default_configs();
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open config list " + arg);
  std::vector<rpx::NamedConfig> configs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto cfg = rpx::parse_extractor_config(line);
    configs.push_back({rpx::kind_name(rpx::kind_of(cfg)), std::move(cfg)});
  }
  if (configs.empty()) throw std::runtime_error("config list " + arg + " is empty");
  return configs;
}

struct IcpFlags {
  rpx::IcpConfig cfg;
  void attach(CLI::App* cmd) {
    cmd->add_option("--icp-max-iter", cfg.max_iterations, "ICP iteration cap");
    cmd->add_option("--icp-max-dist", cfg.max_correspondence_dist,
                    "correspondence gate, meters");
    cmd->add_option("--icp-trim", cfg.trim_fraction, "worst-match fraction dropped");
    cmd->add_option("--icp-eps", cfg.convergence_eps, "pose-change convergence threshold");
    cmd->add_option("--submap", cfg.submap_size, "submap size in clouds");
  }
};

int cmd_synth(const std::string& preset_name, const std::string& shape_name, double length,
              std::uint64_t seed, const fs::path& out, std::uint32_t landmarks,
              double world_extent, double max_range, double beam_width, double speed,
              double curvature, std::uint32_t clutter_regions, double clutter_gain,
              double clutter_size) {
  rpx::SensorPreset preset = rpx::preset_by_name(preset_name);
  preset.max_range = max_range;
  preset.beam_width_azimuths = beam_width;

  const rpx::Trajectory traj =
      rpx::make_trajectory(rpx::parse_shape(shape_name), length, preset.rotation_rate, speed,
                           curvature);

  double extent = world_extent;
  if (extent <= 0.0) {  // auto: cover the trajectory plus the sensing radius
    double reach = 0.0;
    for (const auto& tp : traj)
      reach = std::max({reach, std::abs(tp.pose.x), std::abs(tp.pose.y)});
    extent = 2.0 * (reach + max_range);
  }

  const rpx::World world = rpx::make_world(
      seed, extent, landmarks, {clutter_regions, clutter_gain, clutter_size});
  rpx::generate_sequence(world, traj, preset, seed, out);
  std::printf("wrote %zu scans to %s (preset %s, %u landmarks, extent %.0f m)\n", traj.size(),
              out.string().c_str(), preset.name.c_str(), landmarks, extent);
  return 0;
}

int cmd_extract(const std::string& scan_file, const std::string& dataset,
                const std::string& extractor, const fs::path& out, bool timing) {
  const rpx::ExtractorConfig cfg = load_extractor_config(extractor);
  std::vector<fs::path> scans;
  if (!scan_file.empty()) scans.push_back(scan_file);
  else scans = rpx::list_scan_files(dataset);

  const bool to_dir = scan_file.empty();  // dataset mode writes a directory
  if (to_dir) fs::create_directories(out);
  for (const auto& path : scans) {
    const rpx::PolarScan scan = rpx::read_scan(path);
    const auto t0 = std::chrono::steady_clock::now();
    const rpx::PointCloud cloud = rpx::extract(scan, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    fs::path target = out;
    if (to_dir) target = out / path.filename().replace_extension(".csv");
    rpx::write_point_cloud_csv(cloud, target);
    if (timing)
      std::printf("%s: %zu points, %.3f ms\n", path.filename().string().c_str(),
                  cloud.points.size(),
                  std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return 0;
}

int cmd_odom(const std::string& dataset, const std::string& extractor, const fs::path& out,
             const std::string& stats_path, const rpx::IcpConfig& icp) {
  const auto scans = rpx::list_scan_files(dataset);
  const rpx::OdometryResult result =
      rpx::run_odometry(scans, load_extractor_config(extractor), icp);
  rpx::write_trajectory_csv(result.trajectory, out);
  if (!stats_path.empty()) rpx::write_frame_stats_csv(result.frames, stats_path);
  const rpx::RuntimeReport rt = rpx::runtime_report(result.frames);
  std::printf("%zu frames, mean extract %.2f ms, mean points %.1f\n", result.frames.size(),
              rt.mean_extract_ms, rt.mean_points);
  return 0;
}

int cmd_eval_odom(const fs::path& gt_path, const fs::path& est_path, const std::string& json_path,
                  std::uint32_t stride) {
  const rpx::Trajectory gt = rpx::read_trajectory_csv(gt_path);
  const rpx::Trajectory est = rpx::read_trajectory_csv(est_path);
  rpx::KittiOptions options;
  options.start_stride = stride;
  const rpx::OdomErrorReport report = rpx::kitti_errors(gt, est, options);
  if (!report.valid) {
    std::printf("no segment reached the shortest evaluation length; empty report\n");
  } else {
    std::printf("ATE %.4f %%  ARE %.6f deg/m (%.3f x1e-3 deg/m) over %u samples\n",
                report.ate_percent, report.are_deg_per_m, report.are_milli_deg_per_m(),
                report.samples);
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::trunc);
    out << rpx::odom_report_json(report).dump(2) << '\n';
  }
  return 0;
}

int cmd_eval_detect(const std::string& dataset, const std::string& extractor,
                    std::uint32_t dilation, const std::string& json_path) {
  const rpx::ExtractorConfig cfg = load_extractor_config(extractor);
  rpx::DetectionReport total;
  for (const auto& scan_path : rpx::list_scan_files(dataset)) {
    const rpx::PolarScan scan = rpx::read_scan(scan_path);
    rpx::DetectionLabels labels{scan.geometry.num_azimuths, scan.geometry.num_bins,
                                rpx::read_label_mask(rpx::label_path_for(scan_path),
                                                     scan.geometry.cell_count())};
    total = rpx::merge(total, rpx::detection_metrics(rpx::extract(scan, cfg), labels, dilation));
  }
  std::printf("Pd %.4f  Pfa %.3e  (tp %llu fp %llu fn %llu tn %llu)\n", total.pd, total.pfa,
              static_cast<unsigned long long>(total.true_positive),
              static_cast<unsigned long long>(total.false_positive),
              static_cast<unsigned long long>(total.false_negative),
              static_cast<unsigned long long>(total.true_negative));
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::trunc);
    out << rpx::detection_report_json(total).dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const fs::path& spec_path, const fs::path& dataset, const fs::path& out_dir,
              bool run_test, const rpx::IcpConfig& icp) {
  const rpx::SweepSpec spec = rpx::read_sweep_spec(spec_path);
  const rpx::SweepResult result = rpx::run_sweep(spec, dataset, icp);
  fs::create_directories(out_dir);
  rpx::write_sweep_csv(result, spec, out_dir / "sweep.csv");
  {
    std::ofstream out(out_dir / "sweep.json", std::ios::trunc);
    out << rpx::sweep_result_json(result, spec).dump(2) << '\n';
  }
  if (result.incumbent < 0) {
    std::printf("every combo failed; no incumbent\n");
    return 1;
  }
  const std::string incumbent = rpx::format_extractor_config(result.incumbent_row().config);
  rpx::detail::write_file_bytes(out_dir / "incumbent.cfg", incumbent + "\n");
  std::printf("incumbent: %s (train ATE %.4f %%)\n", incumbent.c_str(),
              result.incumbent_row().ate_percent);
  if (run_test) {
    const rpx::ComboEval test =
        rpx::evaluate_on_test(result.incumbent_row().config, spec, dataset, icp);
    std::printf("test: ATE %.4f %%  ARE %.6f deg/m%s\n", test.ate_percent, test.are_deg_per_m,
                test.failed ? " (some sequences failed)" : "");
  }
  return 0;
}

int cmd_bench(const fs::path& dataset, const std::string& configs_arg, const fs::path& out_dir,
              const rpx::IcpConfig& icp) {
  const auto configs = load_bench_configs(configs_arg);
  const rpx::BenchResult result = rpx::run_bench(dataset, configs, icp);
  fs::create_directories(out_dir);
  rpx::write_bench_csv(result, out_dir / "bench.csv");
  rpx::write_bench_timing_csv(result, out_dir / "bench_timing.csv");
  std::fputs(rpx::render_bench_table(result).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radar point-cloud extraction and odometry benchmarking toolkit"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "worker thread cap (0 = machine parallelism; use 1 for runtime columns)");

  // synth
  std::string preset = "F1", shape = "figure8";
  double length = 1000.0, world_extent = 0.0, max_range = 100.0, beam_width = 0.0, speed = 10.0,
         curvature = 0.02, clutter_gain = 6.0, clutter_size = 40.0;
  std::uint64_t seed = 1;
  std::uint32_t landmarks = 300, clutter_regions = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset directory");
  synth->add_option("--preset", preset, "sensor preset: F1 or F2")->capture_default_str();
  synth->add_option("--shape", shape, "trajectory shape: line|arc|figure8")->capture_default_str();
  synth->add_option("--length", length, "minimum path length, meters")->capture_default_str();
  synth->add_option("--seed", seed, "generator seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--landmarks", landmarks, "landmark count")->capture_default_str();
  synth->add_option("--world-extent", world_extent, "world square side, meters (0 = auto)");
  synth->add_option("--max-range", max_range, "sensor max range, meters")->capture_default_str();
  synth->add_option("--beam-width", beam_width, "beam sigma across azimuths (0 = nearest only)");
  synth->add_option("--speed", speed, "platform speed, m/s")->capture_default_str();
  synth->add_option("--curvature", curvature, "arc curvature, 1/m")->capture_default_str();
  synth->add_option("--clutter-regions", clutter_regions, "number of clutter patches");
  synth->add_option("--clutter-gain-db", clutter_gain, "clutter patch gain, dB");
  synth->add_option("--clutter-size", clutter_size, "clutter patch side, meters");

  // extract
  std::string ex_scan, ex_dataset, ex_extractor, ex_out;
  bool ex_timing = false;
  auto* extract_cmd = app.add_subcommand("extract", "run one extractor over scans");
  auto* scan_opt = extract_cmd->add_option("--scan", ex_scan, "single canonical scan file");
  extract_cmd->add_option("--dataset", ex_dataset, "dataset directory")->excludes(scan_opt);
  extract_cmd->add_option("--extractor", ex_extractor, "config, e.g. \"ca T=35\" or @file")
      ->required();
  extract_cmd->add_option("--out", ex_out, "output CSV file (or directory for datasets)")
      ->required();
  extract_cmd->add_flag("--timing", ex_timing, "print per-scan extraction time");

  // odom
  std::string od_dataset, od_extractor, od_out, od_stats;
  IcpFlags od_icp;
  auto* odom = app.add_subcommand("odom", "run the ICP odometry pipeline");
  odom->add_option("--dataset", od_dataset, "sequence directory")->required();
  odom->add_option("--extractor", od_extractor, "extractor config or @file")->required();
  odom->add_option("--out", od_out, "estimated trajectory CSV")->required();
  odom->add_option("--stats", od_stats, "per-frame stats CSV");
  od_icp.attach(odom);

  // eval-odom
  std::string eo_gt, eo_est, eo_json;
  std::uint32_t eo_stride = 1;
  auto* eval_odom = app.add_subcommand("eval-odom", "KITTI-style trajectory errors");
  eval_odom->add_option("--gt", eo_gt, "ground-truth trajectory CSV")->required();
  eval_odom->add_option("--est", eo_est, "estimated trajectory CSV")->required();
  eval_odom->add_option("--json", eo_json, "write the full report as JSON");
  eval_odom->add_option("--stride", eo_stride, "start-frame stride")->capture_default_str();

  // eval-detect
  std::string ed_dataset, ed_extractor, ed_json;
  std::uint32_t ed_dilation = 1;
  auto* eval_detect = app.add_subcommand("eval-detect", "Pd/Pfa against synthetic labels");
  eval_detect->add_option("--dataset", ed_dataset, "labelled dataset directory")->required();
  eval_detect->add_option("--extractor", ed_extractor, "extractor config or @file")->required();
  eval_detect->add_option("--dilation", ed_dilation, "match tolerance, bins")
      ->capture_default_str();
  eval_detect->add_option("--json", ed_json, "write the report as JSON");

  // sweep
  std::string sw_spec, sw_dataset, sw_out;
  bool sw_test = false;
  IcpFlags sw_icp;
  auto* sweep = app.add_subcommand("sweep", "coarse-to-fine parameter sweep");
  sweep->add_option("--spec", sw_spec, "sweep spec JSON")->required();
  sweep->add_option("--dataset", sw_dataset, "dataset directory with sequence subdirs")
      ->required();
  sweep->add_option("--out", sw_out, "output directory")->required();
  sweep->add_flag("--test", sw_test, "evaluate the incumbent on the test sequences");
  sw_icp.attach(sweep);

  // bench
  std::string be_dataset, be_configs = "f1-defaults", be_out;
  IcpFlags be_icp;
  auto* bench = app.add_subcommand("bench", "compare extractor configs on one sequence");
  bench->add_option("--dataset", be_dataset, "sequence directory")->required();
  bench->add_option("--configs", be_configs,
                    "f1-defaults, f2-defaults, or a file of config lines")
      ->capture_default_str();
  bench->add_option("--out", be_out, "output directory")->required();
  be_icp.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  rpx::set_worker_threads(threads);
  try {
    if (synth->parsed())
      return cmd_synth(preset, shape, length, seed, synth_out, landmarks, world_extent, max_range,
                       beam_width, speed, curvature, clutter_regions, clutter_gain, clutter_size);
    if (extract_cmd->parsed()) {
      if (ex_scan.empty() && ex_dataset.empty())
        throw std::invalid_argument("extract: need --scan or --dataset");
      return cmd_extract(ex_scan, ex_dataset, ex_extractor, ex_out, ex_timing);
    }
    if (odom->parsed()) return cmd_odom(od_dataset, od_extractor, od_out, od_stats, od_icp.cfg);
    if (eval_odom->parsed()) return cmd_eval_odom(eo_gt, eo_est, eo_json, eo_stride);
    if (eval_detect->parsed())
      return cmd_eval_detect(ed_dataset, ed_extractor, ed_dilation, ed_json);
    if (sweep->parsed()) return cmd_sweep(sw_spec, sw_dataset, sw_out, sw_test, sw_icp.cfg);
    if (bench->parsed()) return cmd_bench(be_dataset, be_configs, be_out, be_icp.cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
