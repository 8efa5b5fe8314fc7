#include "lmv/reference_rigs.hpp"

namespace lmv {

namespace {

Camera make_camera(std::initializer_list<double> rows) {
  Matrix34d m;
  int k = 0;
  for (double v : rows) m(k / 4, k % 4) = v, ++k;
  return Camera(m);
}

}  // namespace

// Note: the second matrix of this fixed family is sometimes printed with a
// zero first column, which would place its center on top of the first
// camera's and make the pair ill-posed. We use the variant with the (1,0)
// entry set, giving pairwise distinct centers [1:0:0:0], [1:0:-1:0],
// [0:1:-1:0] with no three collinear.
CameraRig fixed_pair_rig() {
  return CameraRig({make_camera({0, 1, 0, 0,
                                 0, 0, 1, 0,
                                 0, 0, 0, 1}),
                    make_camera({0, 1, 0, 0,
                                 1, 1, 1, 0,
                                 0, 0, 0, 1})});
}

CameraRig fixed_triplet_rig() {
  return CameraRig({make_camera({0, 1, 0, 0,
                                 0, 0, 1, 0,
                                 0, 0, 0, 1}),
                    make_camera({0, 1, 0, 0,
                                 1, 1, 1, 0,
                                 0, 0, 0, 1}),
                    make_camera({1, 0, 0, 0,
                                 0, 1, 1, 0,
                                 0, 0, 0, 1})});
}

CameraRig collinear_quad_rig() {
  return CameraRig({make_camera({1, 0, 0, 0,
                                 0, 1, 0, 0,
                                 0, 0, 1, 0}),
                    make_camera({0, 1, 0, 0,
                                 0, 0, 1, 0,
                                 0, 0, 0, 1}),
                    make_camera({1, 0, 0, -1,
                                 0, 1, 0, 0,
                                 0, 0, 1, 0}),
                    make_camera({1, 0, 0, 1,
                                 0, 1, 0, 0,
                                 0, 0, 1, 0})});
}

Complex collinear_quad_constraint(const std::vector<ProjectivePoint>& tuple) {
  if (tuple.size() != 4)
    throw LengthMismatch("the collinear-quad constraint takes 4 image lines");
  const auto& x = tuple[0].coords();
  const auto& y = tuple[1].coords();
  const auto& z = tuple[2].coords();
  const auto& w = tuple[3].coords();
  // Quartic eliminant of the transversal-family condition for this rig;
  // coordinates are 0-indexed.
  const Complex value = 2.0 * x[2] * y[1] * z[1] * w[1]
                      - x[2] * y[0] * z[2] * w[1]
                      - x[1] * y[1] * z[2] * w[1]
                      - x[2] * y[0] * z[1] * w[2]
                      - x[1] * y[1] * z[1] * w[2]
                      + 2.0 * x[1] * y[0] * z[2] * w[2];
  const double scale =
      x.norm() * y.norm() * z.norm() * w.norm();
  return value / scale;
}

}  // namespace lmv
