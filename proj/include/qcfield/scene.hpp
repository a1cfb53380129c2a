#pragma once

// Scene files: YAML documents describing a configuration, its controls and
// what to render. Diagnostics name the file, line and field.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcfield/wavefield.hpp"

namespace qcfield {

struct SceneError : std::invalid_argument {
  SceneError(const std::string& file, int line, const std::string& field, const std::string& msg);
  std::string field;
  int line = 0;
};

enum class OutputFormat { Pgm, Csv, Both };

struct Scene {
  struct Tiling {
    double seed_density = 2.0;
    bool underlay = true;
    int underlay_resolution = 257;
  };
  struct Transition {
    std::string kind = "geodesic";  // direct | geodesic
    int frames = 6;
    std::optional<RVec> eps;        // physical units
    std::optional<Controls> u1;
    std::vector<Controls> waypoints;
    int cost_samples = 257;
    int cost_resolution = 129;
  };
  struct LevelSet {
    double fraction = 0.075;
  };

  std::string path;
  WaveConfig cfg;
  Controls u;
  PotentialSpec spec;
  Box region;  // physical units
  std::vector<int> resolution;
  std::string output;  // path prefix for written files
  OutputFormat format = OutputFormat::Pgm;
  std::optional<Tiling> tiling;
  std::optional<Transition> transition;
  std::optional<LevelSet> level_set;
};

/// Reads and validates a scene file. Throws IoError if unreadable, SceneError otherwise.
Scene parse_scene(const std::string& file);
/// Same, from text; relative output paths resolve against base_dir.
Scene parse_scene_text(const std::string& text, const std::string& name,
                       const std::string& base_dir = ".");

}  // namespace qcfield
