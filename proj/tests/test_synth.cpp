#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "rpx/dataset.hpp"
#include "rpx/synth.hpp"

using namespace rpx;
namespace fs = std::filesystem;

TEST_CASE("make_world is deterministic and bounded") {
  const World a = make_world(42, 200.0, 200);
  const World b = make_world(42, 200.0, 200);
  REQUIRE(a.landmarks.size() == 200);
  for (std::size_t i = 0; i < a.landmarks.size(); ++i) {
    CHECK(a.landmarks[i].x == b.landmarks[i].x);
    CHECK(a.landmarks[i].y == b.landmarks[i].y);
    CHECK(std::abs(a.landmarks[i].x) <= 100.0);
    CHECK(std::abs(a.landmarks[i].y) <= 100.0);
    CHECK(a.landmarks[i].reflectivity_db > 0.0);
    CHECK(a.landmarks[i].extent > 0.0);
  }
  CHECK(make_world(42, 200.0, 0).landmarks.empty());
  CHECK(make_world(43, 200.0, 1).landmarks[0].x != a.landmarks[0].x);

  const World c = make_world(7, 100.0, 0, {3, 6.0, 20.0});
  CHECK(c.clutter_regions.size() == 3);
  CHECK(point_in_polygon(c.clutter_regions[0].polygon,
                         {(c.clutter_regions[0].polygon[0].x + c.clutter_regions[0].polygon[2].x) / 2,
                          (c.clutter_regions[0].polygon[0].y + c.clutter_regions[0].polygon[2].y) / 2}));
}

TEST_CASE("render_scan is deterministic and half-dB quantized") {
  const World world = make_world(3, 120.0, 40);
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 30.0;
  const Pose2 pose{5.0, -2.0, 0.3};

  const auto [scan_a, labels_a] = render_scan(world, pose, preset, 99, 1.25);
  const auto [scan_b, labels_b] = render_scan(world, pose, preset, 99, 1.25);
  CHECK(scan_a.values == scan_b.values);
  CHECK(labels_a.cells == labels_b.cells);
  CHECK(scan_a.timestamp == 1.25);
  CHECK(scan_a.unit == PowerUnit::Decibel);

  for (float v : scan_a.values) {
    CHECK(v >= 0.0f);
    CHECK(v <= 127.5f);
    CHECK(std::nearbyint(v * 2.0f) == v * 2.0f);
  }
  // different seed, different speckle
  const auto [scan_c, labels_c] = render_scan(world, pose, preset, 100, 1.25);
  CHECK(scan_a.values != scan_c.values);
}

TEST_CASE("empty world renders pure clutter at the noise floor") {
  const World empty;
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 25.0;  // 400 x 420 bins > 1e5
  const auto [scan, labels] = render_scan(empty, {}, preset, 7);

  CHECK(labels.true_count() == 0);

  double mean_watts = 0.0;
  for (float v : scan.values) mean_watts += std::pow(10.0, v / 10.0);
  mean_watts /= static_cast<double>(scan.values.size());
  const double mean_db = 10.0 * std::log10(mean_watts);
  CHECK_THAT(mean_db, Catch::Matchers::WithinAbs(preset.noise_floor_db, 1.0));
}

TEST_CASE("clutter statistics match the configured exponential mean") {
  const World empty;
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 155.0;  // 400 x 2601 bins > 1e6 samples
  const auto [scan, labels] = render_scan(empty, {}, preset, 11);

  double mean_watts = 0.0;
  for (float v : scan.values) mean_watts += std::pow(10.0, v / 10.0);
  mean_watts /= static_cast<double>(scan.values.size());
  const double configured = std::pow(10.0, preset.noise_floor_db / 10.0);
  CHECK(std::abs(mean_watts - configured) / configured < 0.02);
}

TEST_CASE("a lone landmark labels a contiguous run at its range") {
  World world;
  world.landmarks.push_back({30.0, 0.0, 25.0, 0.5});
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 50.0;
  const auto [scan, labels] = render_scan(world, {}, preset, 19);

  const auto expected_center =
      static_cast<std::uint32_t>(std::lround(30.0 / preset.range_resolution - 0.5));
  std::vector<std::uint32_t> lit;
  for (std::uint32_t b = 0; b < labels.num_bins; ++b)
    if (labels.at(0, b)) lit.push_back(b);
  REQUIRE(!lit.empty());
  for (std::size_t i = 1; i < lit.size(); ++i) CHECK(lit[i] == lit[i - 1] + 1);  // contiguous
  const double center = 0.5 * (lit.front() + lit.back());
  CHECK(std::abs(center - static_cast<double>(expected_center)) <= 1.0);

  // beam width zero: only the facing azimuth carries the landmark
  for (std::uint32_t a = 1; a < labels.num_azimuths; ++a)
    for (std::uint32_t b = 0; b < labels.num_bins; ++b) CHECK(!labels.at(a, b));
}

TEST_CASE("beam spreading lights adjacent azimuths") {
  World world;
  world.landmarks.push_back({20.0, 0.0, 35.0, 0.6});
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 30.0;
  preset.beam_width_azimuths = 1.0;
  const auto [scan, labels] = render_scan(world, {}, preset, 5);
  std::set<std::uint32_t> lit_azimuths;
  for (std::uint32_t a = 0; a < labels.num_azimuths; ++a)
    for (std::uint32_t b = 0; b < labels.num_bins; ++b)
      if (labels.at(a, b)) lit_azimuths.insert(a);
  CHECK(lit_azimuths.size() >= 2);
}

TEST_CASE("trajectory shapes") {
  const Trajectory line = make_trajectory(PathShape::Line, 100.0, 4.0);
  REQUIRE(line.size() == 41);  // 100 / (10 * 0.25) + 1
  CHECK_THAT(line[1].pose.x - line[0].pose.x, Catch::Matchers::WithinAbs(2.5, 1e-12));
  CHECK(line.back().pose.x >= 100.0 - 1e-9);
  for (std::size_t i = 1; i < line.size(); ++i) {
    CHECK(line[i].timestamp > line[i - 1].timestamp);
    CHECK_THAT(line[i].timestamp - line[i - 1].timestamp, Catch::Matchers::WithinAbs(0.25, 1e-12));
  }

  const Trajectory arc0 = make_trajectory(PathShape::Arc, 100.0, 4.0, 10.0, 0.0);
  REQUIRE(arc0.size() == line.size());
  for (std::size_t i = 0; i < arc0.size(); ++i) {
    CHECK(arc0[i].pose.x == line[i].pose.x);
    CHECK(arc0[i].pose.y == line[i].pose.y);
  }

  const Trajectory arc = make_trajectory(PathShape::Arc, 100.0, 4.0, 10.0, 0.05);
  double arc_len = 0.0;
  for (std::size_t i = 1; i < arc.size(); ++i)
    arc_len += std::hypot(arc[i].pose.x - arc[i - 1].pose.x, arc[i].pose.y - arc[i - 1].pose.y);
  CHECK(arc_len > 95.0);  // chords of a 2.5 m arc step are just under 2.5 m

  const Trajectory fig8 = make_trajectory(PathShape::FigureEight, 500.0, 4.0);
  double len = 0.0;
  for (std::size_t i = 1; i < fig8.size(); ++i)
    len += std::hypot(fig8[i].pose.x - fig8[i - 1].pose.x, fig8[i].pose.y - fig8[i - 1].pose.y);
  CHECK(len >= 490.0);  // chord total of a >= 500 m loop
  const double closure = std::hypot(fig8.back().pose.x - fig8.front().pose.x,
                                    fig8.back().pose.y - fig8.front().pose.y);
  CHECK(closure <= 2.5 + 1e-6);  // start and end coincide within one step
  for (const auto& tp : fig8) {
    CHECK(tp.pose.theta > -std::numbers::pi);
    CHECK(tp.pose.theta <= std::numbers::pi);
  }

  CHECK_THROWS_AS(make_trajectory(PathShape::Line, -5.0, 4.0), std::invalid_argument);
}

TEST_CASE("generate_sequence writes a complete, reproducible dataset") {
  const World world = make_world(21, 80.0, 25);
  SensorPreset preset = SensorPreset::f1();
  preset.max_range = 15.0;
  const Trajectory traj = make_trajectory(PathShape::Line, 22.0, 4.0);  // 10 poses
  REQUIRE(traj.size() == 10);

  const auto dir_a = fs::temp_directory_path() / "rpx_synth_a";
  const auto dir_b = fs::temp_directory_path() / "rpx_synth_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  generate_sequence(world, traj, preset, 77, dir_a);
  generate_sequence(world, traj, preset, 77, dir_b);

  const auto scans = list_scan_files(dir_a);
  REQUIRE(scans.size() == 10);
  CHECK(fs::exists(dir_a / "labels" / "000000.mask"));
  CHECK(fs::exists(dir_a / "labels" / "000009.mask"));
  CHECK(read_trajectory_csv(dir_a / "gt.csv").size() == 10);

  // reproducibility: identical bytes in every file
  for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir_a);
    CHECK(detail::read_file_bytes(entry.path()) == detail::read_file_bytes(dir_b / rel));
  }

  // per-scan derived seeds decorrelate frames
  const PolarScan s0 = read_scan(scans[0]);
  const PolarScan s1 = read_scan(scans[1]);
  CHECK(s0.values != s1.values);
  CHECK(s0.timestamp == traj[0].timestamp);

  // F1 vs F2: same max range, different bin count and noise floor
  CHECK(SensorPreset::f1().num_bins() != SensorPreset::f2().num_bins());
  CHECK(SensorPreset::f1().noise_floor_db < SensorPreset::f2().noise_floor_db);
}
