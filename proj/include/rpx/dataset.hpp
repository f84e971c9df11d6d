#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rpx/io.hpp"
#include "rpx/synth.hpp"
#include "rpx/threading.hpp"

namespace rpx {

/// Renders one scan + label file per trajectory pose into out_dir, plus
/// gt.csv and manifest.json. Per-scan seeds are derived as seed XOR scan
/// index, so parallel rendering cannot change the output bytes.
inline void generate_sequence(const World& world, const Trajectory& trajectory,
                              const SensorPreset& preset, std::uint64_t seed,
                              const std::filesystem::path& out_dir) {
  preset.validate();
  if (trajectory.empty()) throw std::invalid_argument("generate_sequence: empty trajectory");
  std::filesystem::create_directories(out_dir / "scans");
  std::filesystem::create_directories(out_dir / "labels");

  parallel_for(trajectory.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto [scan, labels] = render_scan(world, trajectory[i].pose, preset,
                                        seed ^ static_cast<std::uint64_t>(i),
                                        trajectory[i].timestamp);
      char name[32];
      std::snprintf(name, sizeof name, "%06zu", i);
      write_scan(scan, out_dir / "scans" / (std::string(name) + ".rscn"));
      write_label_mask(labels.cells, out_dir / "labels" / (std::string(name) + ".mask"));
    }
  });

  write_trajectory_csv(trajectory, out_dir / "gt.csv");

  nlohmann::json manifest;
  manifest["seed"] = seed;
  manifest["num_scans"] = trajectory.size();
  manifest["num_landmarks"] = world.landmarks.size();
  manifest["num_clutter_regions"] = world.clutter_regions.size();
  manifest["preset"] = {{"name", preset.name},
                        {"range_resolution", preset.range_resolution},
                        {"num_azimuths", preset.num_azimuths},
                        {"num_bins", preset.num_bins()},
                        {"rotation_rate", preset.rotation_rate},
                        {"noise_floor_db", preset.noise_floor_db},
                        {"noise_scale", preset.noise_scale},
                        {"max_range", preset.max_range},
                        {"beam_width_azimuths", preset.beam_width_azimuths}};
  std::ofstream out(out_dir / "manifest.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest.json under " + out_dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace rpx
