#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "rpx/io.hpp"

using namespace rpx;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir() {
  static int counter = 0;
  const auto dir = fs::temp_directory_path() / ("rpx_io_test_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

PolarScan random_raw_scan(std::uint32_t azimuths, std::uint32_t bins, std::uint32_t seed) {
  ScanGeometry g{azimuths, bins, 0.0596, 0.25, 4.0};
  std::mt19937 rng(seed);
  std::vector<std::uint8_t> levels(g.cell_count());
  for (auto& l : levels) l = static_cast<std::uint8_t>(rng() & 0xff);
  return decode_raw(levels, g, 12.25);
}
}  // namespace

TEST_CASE("scan file round-trips bit-exactly") {
  const auto dir = temp_dir();
  const PolarScan scan = random_raw_scan(16, 64, 99);
  write_scan(scan, dir / "a.rscn");
  const PolarScan back = read_scan(dir / "a.rscn");
  CHECK(back.geometry == scan.geometry);
  CHECK(back.unit == scan.unit);
  CHECK(back.timestamp == scan.timestamp);
  CHECK(back.values == scan.values);

  // writing the same scan twice produces identical bytes
  write_scan(scan, dir / "b.rscn");
  CHECK(detail::read_file_bytes(dir / "a.rscn") == detail::read_file_bytes(dir / "b.rscn"));
}

TEST_CASE("scan reader rejects malformed files") {
  const auto dir = temp_dir();
  const PolarScan scan = random_raw_scan(8, 32, 5);
  write_scan(scan, dir / "ok.rscn");
  const std::string good = detail::read_file_bytes(dir / "ok.rscn");

  SECTION("truncated payload") {
    detail::write_file_bytes(dir / "trunc.rscn", good.substr(0, good.size() - 7));
    CHECK_THROWS_AS(read_scan(dir / "trunc.rscn"), std::runtime_error);
  }
  SECTION("header/payload dimension mismatch") {
    // header declares 8x32 but one row of bins is missing
    detail::write_file_bytes(dir / "dim.rscn", good.substr(0, good.size() - 32));
    CHECK_THROWS_AS(read_scan(dir / "dim.rscn"), std::runtime_error);
  }
  SECTION("bad magic") {
    std::string bad = good;
    bad[0] = 'X';
    detail::write_file_bytes(dir / "magic.rscn", bad);
    CHECK_THROWS_AS(read_scan(dir / "magic.rscn"), std::runtime_error);
  }
  SECTION("unknown version") {
    std::string bad = good;
    bad[4] = 9;
    detail::write_file_bytes(dir / "ver.rscn", bad);
    CHECK_THROWS_AS(read_scan(dir / "ver.rscn"), std::runtime_error);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(read_scan(dir / "absent.rscn"), std::runtime_error);
  }
}

TEST_CASE("point cloud CSV round-trip") {
  const auto dir = temp_dir();
  PointCloud cloud;
  cloud.points = {{0.0298, 0.0, 63.5, 0, 0}, {-1.25, 3.75e-3, 12.0, 399, 3359}};
  write_point_cloud_csv(cloud, dir / "c.csv");

  std::ifstream in(dir / "c.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y,intensity,azimuth_idx,range_bin");

  const PointCloud back = read_point_cloud_csv(dir / "c.csv");
  REQUIRE(back.points.size() == 2);
  CHECK_THAT(back.points[0].x, Catch::Matchers::WithinRel(0.0298, 1e-8));
  CHECK(back.points[1].azimuth_idx == 399);
  CHECK(back.points[1].range_bin == 3359);
}

TEST_CASE("trajectory CSV round-trip is exact") {
  const auto dir = temp_dir();
  Trajectory traj = {{0.0, {0.0, 0.0, 0.0}}, {0.25, {2.5, -0.125, 0.7853981633974483}}};
  write_trajectory_csv(traj, dir / "t.csv");
  const Trajectory back = read_trajectory_csv(dir / "t.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].timestamp == traj[1].timestamp);
  CHECK(back[1].pose.x == traj[1].pose.x);
  CHECK(back[1].pose.y == traj[1].pose.y);
  CHECK(back[1].pose.theta == traj[1].pose.theta);
}

TEST_CASE("label mask round-trip") {
  const auto dir = temp_dir();
  std::mt19937 rng(17);
  std::vector<std::uint8_t> cells(16 * 37);
  for (auto& c : cells) c = rng() % 2;
  write_label_mask(cells, dir / "m.mask");
  CHECK(read_label_mask(dir / "m.mask", cells.size()) == cells);
  CHECK_THROWS_AS(read_label_mask(dir / "m.mask", cells.size() + 8), std::runtime_error);
}
