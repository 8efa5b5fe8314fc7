#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmv/cameras.hpp"
#include "lmv/multiview.hpp"

namespace lmv::cli {

/// Scene file contents. Schema:
///   {"cameras": [[12 numbers row-major] x m],
///    "lines":   [[6 Plücker numbers] ...]   (optional),
///    "tuples":  [[[3 numbers] x m] ...]     (optional)}
struct Scene {
  std::optional<CameraRig> rig;
  std::vector<PlueckerLine> lines;
  std::vector<LineTuple> tuples;
};

/// Parses a scene file. Throws std::runtime_error subclasses tagged with the
/// offending field; JSON syntax errors surface as nlohmann parse_error.
Scene load_scene(const std::string& path);

}  // namespace lmv::cli
