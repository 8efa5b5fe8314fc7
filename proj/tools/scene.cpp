#include "scene.hpp"

#include <fstream>

#include "json.hpp"

namespace lmv::cli {

using nlohmann::json;

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  json doc = json::parse(in);

  Scene scene;
  if (doc.contains("cameras")) {
    const auto& cams = doc.at("cameras");
    if (!cams.is_array() || cams.empty())
      throw Error("field 'cameras' must be a non-empty array");
    std::vector<Camera> cameras;
    for (const auto& entry : cams) {
      if (!entry.is_array() || entry.size() != 12)
        throw Error("field 'cameras' entries need 12 row-major numbers");
      Matrix34d m;
      for (int k = 0; k < 12; ++k) m(k / 4, k % 4) = entry[k].get<double>();
      cameras.emplace_back(m);
    }
    scene.rig = CameraRig(std::move(cameras));
  }

  if (doc.contains("lines")) {
    for (const auto& entry : doc.at("lines")) {
      if (!entry.is_array() || entry.size() != 6)
        throw Error("field 'lines' entries need 6 Plücker numbers");
      Eigen::Matrix<double, 6, 1> p;
      for (int k = 0; k < 6; ++k) p[k] = entry[k].get<double>();
      scene.lines.push_back(PlueckerLine::from_pluecker(p));
    }
  }

  if (doc.contains("tuples")) {
    for (const auto& entry : doc.at("tuples")) {
      if (!entry.is_array())
        throw Error("field 'tuples' entries must be arrays of image lines");
      std::vector<ProjectivePoint> components;
      for (const auto& comp : entry) {
        if (!comp.is_array() || comp.size() != 3)
          throw Error("field 'tuples' image lines need 3 numbers");
        Eigen::Vector3d v;
        for (int k = 0; k < 3; ++k) v[k] = comp[k].get<double>();
        components.emplace_back(Eigen::VectorXd(v));
      }
      scene.tuples.emplace_back(std::move(components));
    }
  }
  return scene;
}

}  // namespace lmv::cli
