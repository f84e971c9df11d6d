#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rpx/scan.hpp"
#include "rpx/se2.hpp"

namespace rpx {

namespace detail {

inline void put_bytes(std::string& out, std::uint64_t v, int n) {
  for (int i = 0; i < n; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_bytes(const unsigned char* p, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_bytes(out, bits, 8);
}

inline double get_f64(const unsigned char* p) {
  const std::uint64_t bits = get_bytes(p, 8);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

inline std::string format_sig(double v, int sig) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", sig, v);
  return buf;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Canonical scan file (.rscn), little-endian:
//   magic "RSCN", u16 version=1, u16 num_azimuths, u32 num_bins,
//   f64 range_resolution_m, f64 azimuth_0_angle_rad, f64 rotation_rate_hz,
//   f64 timestamp_s, then num_azimuths*num_bins bytes of raw 8-bit half-dB
//   levels, row-major by azimuth.
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kScanFileVersion = 1;
inline constexpr std::size_t kScanHeaderSize = 4 + 2 + 2 + 4 + 4 * 8;

inline void write_scan(const PolarScan& scan, const std::filesystem::path& path) {
  scan.validate();
  if (scan.geometry.num_azimuths > 0xffff)
    throw std::invalid_argument("write_scan: num_azimuths exceeds u16");
  const std::vector<std::uint8_t> levels = encode_levels(scan);
  std::string bytes;
  bytes.reserve(kScanHeaderSize + levels.size());
  bytes.append("RSCN");
  detail::put_bytes(bytes, kScanFileVersion, 2);
  detail::put_bytes(bytes, scan.geometry.num_azimuths, 2);
  detail::put_bytes(bytes, scan.geometry.num_bins, 4);
  detail::put_f64(bytes, scan.geometry.range_resolution);
  detail::put_f64(bytes, scan.geometry.azimuth_0_angle);
  detail::put_f64(bytes, scan.geometry.rotation_rate);
  detail::put_f64(bytes, scan.timestamp);
  bytes.append(reinterpret_cast<const char*>(levels.data()), levels.size());
  detail::write_file_bytes(path, bytes);
}

inline PolarScan read_scan(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file_bytes(path);
  if (bytes.size() < kScanHeaderSize || bytes.compare(0, 4, "RSCN") != 0)
    throw std::runtime_error("read_scan: malformed header in " + path.string());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto version = static_cast<std::uint16_t>(detail::get_bytes(p + 4, 2));
  if (version != kScanFileVersion)
    throw std::runtime_error("read_scan: unknown version in " + path.string());
  ScanGeometry geometry;
  geometry.num_azimuths = static_cast<std::uint32_t>(detail::get_bytes(p + 6, 2));
  geometry.num_bins = static_cast<std::uint32_t>(detail::get_bytes(p + 8, 4));
  geometry.range_resolution = detail::get_f64(p + 12);
  geometry.azimuth_0_angle = detail::get_f64(p + 20);
  geometry.rotation_rate = detail::get_f64(p + 28);
  const double timestamp = detail::get_f64(p + 36);
  geometry.validate();
  if (bytes.size() != kScanHeaderSize + geometry.cell_count())
    throw std::runtime_error("read_scan: payload does not match declared dimensions in " +
                             path.string());
  return decode_raw({reinterpret_cast<const std::uint8_t*>(bytes.data()) + kScanHeaderSize,
                     geometry.cell_count()},
                    geometry, timestamp);
}

// ---------------------------------------------------------------------------
// Point clouds: CSV `x,y,intensity,azimuth_idx,range_bin`, 9 significant
// digits. Trajectories: CSV `timestamp,x,y,theta`.
// ---------------------------------------------------------------------------

inline void write_point_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  std::string out = "x,y,intensity,azimuth_idx,range_bin\n";
  for (const auto& pt : cloud.points) {
    out += detail::format_sig(pt.x, 9);
    out += ',';
    out += detail::format_sig(pt.y, 9);
    out += ',';
    out += detail::format_sig(pt.intensity, 9);
    out += ',';
    out += std::to_string(pt.azimuth_idx);
    out += ',';
    out += std::to_string(pt.range_bin);
    out += '\n';
  }
  detail::write_file_bytes(path, out);
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("malformed ") + what + " field: '" + s + "'");
  }
}
}  // namespace detail

inline PointCloud read_point_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  PointCloud cloud;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty point cloud file " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 5) throw std::runtime_error("malformed point cloud row in " + path.string());
    Point2 pt;
    pt.x = detail::parse_double(f[0], "x");
    pt.y = detail::parse_double(f[1], "y");
    pt.intensity = detail::parse_double(f[2], "intensity");
    pt.azimuth_idx = static_cast<std::uint32_t>(detail::parse_double(f[3], "azimuth_idx"));
    pt.range_bin = static_cast<std::uint32_t>(detail::parse_double(f[4], "range_bin"));
    cloud.points.push_back(pt);
  }
  return cloud;
}

inline void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::string out = "timestamp,x,y,theta\n";
  for (const auto& tp : traj) {
    out += detail::format_sig(tp.timestamp, 17);
    out += ',';
    out += detail::format_sig(tp.pose.x, 17);
    out += ',';
    out += detail::format_sig(tp.pose.y, 17);
    out += ',';
    out += detail::format_sig(tp.pose.theta, 17);
    out += '\n';
  }
  detail::write_file_bytes(path, out);
}

inline Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Trajectory traj;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 4) throw std::runtime_error("malformed trajectory row in " + path.string());
    TimedPose tp;
    tp.timestamp = detail::parse_double(f[0], "timestamp");
    tp.pose.x = detail::parse_double(f[1], "x");
    tp.pose.y = detail::parse_double(f[2], "y");
    tp.pose.theta = detail::parse_double(f[3], "theta");
    traj.push_back(tp);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Label masks: packed bits, row-major by azimuth, LSB-first within a byte.
// Dimensions come from the paired scan.
// ---------------------------------------------------------------------------

inline void write_label_mask(std::span<const std::uint8_t> cells,
                             const std::filesystem::path& path) {
  std::string bytes((cells.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i]) bytes[i / 8] |= static_cast<char>(1u << (i % 8));
  detail::write_file_bytes(path, bytes);
}

inline std::vector<std::uint8_t> read_label_mask(const std::filesystem::path& path,
                                                 std::size_t cell_count) {
  const std::string bytes = detail::read_file_bytes(path);
  if (bytes.size() != (cell_count + 7) / 8)
    throw std::runtime_error("label mask size does not match scan dimensions: " + path.string());
  std::vector<std::uint8_t> cells(cell_count, 0);
  for (std::size_t i = 0; i < cell_count; ++i)
    cells[i] = (static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1u;
  return cells;
}

// ---------------------------------------------------------------------------
// Dataset directory layout: scans/NNNNNN.rscn, labels/NNNNNN.mask, gt.csv,
// manifest.json.
// ---------------------------------------------------------------------------

inline std::vector<std::filesystem::path> list_scan_files(const std::filesystem::path& dir) {
  const auto scans_dir = dir / "scans";
  if (!std::filesystem::is_directory(scans_dir))
    throw std::runtime_error("no scans/ directory under " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(scans_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".rscn")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

inline std::filesystem::path label_path_for(const std::filesystem::path& scan_path) {
  auto p = scan_path.parent_path().parent_path() / "labels" / scan_path.filename();
  p.replace_extension(".mask");
  return p;
}

}  // namespace rpx
