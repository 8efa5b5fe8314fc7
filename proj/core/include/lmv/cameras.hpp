#pragma once

#include <Eigen/Core>
#include <vector>

#include "lmv/grassmannian.hpp"
#include "lmv/projective.hpp"

namespace lmv {

using Matrix34d = Eigen::Matrix<double, 3, 4>;

/// A plane in P^3, identified with its linear equation h (a point of P^3):
/// the plane is { p : h^T p = 0 }.
struct Plane3 {
  Eigen::Vector4cd h;

  explicit Plane3(const Eigen::Vector4cd& eq) : h(eq.normalized()) {
    if (!(eq.norm() > 1e-300)) throw ZeroVector();
  }
  explicit Plane3(const Eigen::Vector4d& eq) : Plane3(Eigen::Vector4cd(eq.cast<Complex>())) {}

  Complex evaluate(const Eigen::Vector4cd& p) const {
    return h.cwiseProduct(p).sum();  // bilinear, no conjugation
  }
  bool contains(const Eigen::Vector4cd& p, double tol = kIncidenceTol) const {
    return std::abs(evaluate(p)) / p.norm() < tol;
  }
};

/// Pinhole camera: a full-rank 3x4 real matrix acting on P^3, with the
/// kernel (camera center) cached at construction.
class Camera {
 public:
  explicit Camera(const Matrix34d& matrix, double rank_tol = kRankTol);

  const Matrix34d& matrix() const { return matrix_; }
  /// Unit-norm kernel of the matrix.
  const Eigen::Vector4d& center() const { return center_; }
  ProjectivePoint center_point() const {
    return ProjectivePoint(Eigen::VectorXd(center_));
  }

 private:
  Matrix34d matrix_;
  Eigen::Vector4d center_;
};

ProjectivePoint center(const Camera& camera);

/// Image of a line under the camera: the cross product of the two projected
/// spanning points, in dual coordinates. Throws LineThroughCenter when the
/// cross product collapses (relative norm below 1e-10), which is exactly
/// where the camera map for lines is undefined.
ProjectivePoint project_line(const Camera& camera, const PlueckerLine& line);

/// The plane C^T l of all points projecting onto the image line l. Contains
/// the camera center.
Plane3 back_project(const Camera& camera, const ProjectivePoint& image_line);
Plane3 back_project(const Camera& camera, const Eigen::Vector3cd& image_line);

/// Left inverse of back_project: l = (C^T)^+ h. Throws NotBackProjected when
/// h has a component outside the column span of C^T (equivalently, the plane
/// misses the camera center).
ProjectivePoint plane_to_image_line(const Camera& camera, const Plane3& plane,
                                    double tol = kIncidenceTol);

/// An ordered arrangement of m >= 2 cameras with pairwise distinct centers,
/// classified at construction: maximal collinear center groups (|I| >= 3
/// recorded) and overall coplanarity.
class CameraRig {
 public:
  explicit CameraRig(std::vector<Camera> cameras, double rank_tol = kRankTol);

  int size() const { return static_cast<int>(cameras_.size()); }
  const Camera& camera(int i) const { return cameras_.at(i); }
  const std::vector<Camera>& cameras() const { return cameras_; }
  const Eigen::Vector4d& center(int i) const { return cameras_.at(i).center(); }

  /// Maximal collinear index groups of size >= 3, each sorted ascending.
  const std::vector<std::vector<int>>& collinear_groups() const {
    return collinear_groups_;
  }
  /// Groups of size >= 4 break the pure rank description of the variety.
  bool has_large_collinear_group() const;
  bool coplanar() const { return coplanar_; }

  /// The line spanned by the centers of a collinear group.
  PlueckerLine baseline(const std::vector<int>& group) const;

  /// Restriction to a subset of cameras (order preserved).
  CameraRig subrig(const std::vector<int>& indices) const;

 private:
  std::vector<Camera> cameras_;
  std::vector<std::vector<int>> collinear_groups_;
  bool coplanar_ = false;
};

CameraRig classify_rig(std::vector<Camera> cameras, double rank_tol = kRankTol);

}  // namespace lmv
