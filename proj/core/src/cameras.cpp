#include "lmv/cameras.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <set>

namespace lmv {

Camera::Camera(const Matrix34d& matrix, double rank_tol) : matrix_(matrix) {
  Eigen::JacobiSVD<Matrix34d> svd(matrix, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[2] / sv[0] <= rank_tol) throw RankDeficientCamera();
  center_ = svd.matrixV().col(3);
}

ProjectivePoint center(const Camera& camera) {
  return camera.center_point();
}

ProjectivePoint project_line(const Camera& camera, const PlueckerLine& line) {
  const Matrix42cd& basis = line.basis();
  const Eigen::Vector3cd a = camera.matrix().cast<Complex>() * basis.col(0);
  const Eigen::Vector3cd b = camera.matrix().cast<Complex>() * basis.col(1);
  const Eigen::Vector3cd ell = bilinear_cross(a, b);
  const double scale = a.norm() * b.norm();
  if (!(scale > 1e-300) || ell.norm() < 1e-10 * scale)
    throw LineThroughCenter(-1);
  return ProjectivePoint(Eigen::VectorXcd(ell));
}

Plane3 back_project(const Camera& camera, const Eigen::Vector3cd& image_line) {
  return Plane3(Eigen::Vector4cd(camera.matrix().transpose().cast<Complex>() *
                                 image_line));
}

Plane3 back_project(const Camera& camera, const ProjectivePoint& image_line) {
  if (image_line.size() != 3)
    throw Error("back_project expects an image line in P^2");
  return back_project(camera, Eigen::Vector3cd(image_line.coords()));
}

ProjectivePoint plane_to_image_line(const Camera& camera, const Plane3& plane,
                                    double tol) {
  // Least-squares left inverse of C^T; QR keeps the conditioning of C
  // rather than squaring it through the normal equations.
  const Eigen::Matrix<Complex, 4, 3> ct =
      camera.matrix().transpose().cast<Complex>();
  const Eigen::Vector3cd ell =
      Eigen::ColPivHouseholderQR<Eigen::Matrix<Complex, 4, 3>>(ct).solve(
          plane.h);
  // h must lie in colspan(C^T): compare against its reprojection.
  const Eigen::Vector4cd reproj = ct * ell;
  const Eigen::Vector4cd residual =
      plane.h - reproj * (reproj.dot(plane.h) / reproj.squaredNorm());
  if (residual.norm() > tol) throw NotBackProjected();
  return ProjectivePoint(Eigen::VectorXcd(ell));
}

namespace {

bool centers_collinear(const std::vector<Eigen::Vector4d>& centers,
                       const std::vector<int>& idx, double rank_tol) {
  Eigen::MatrixXd stacked(4, idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) stacked.col(k) = centers[idx[k]];
  return numerical_rank(stacked, rank_tol).numerical_rank == 2;
}

}  // namespace

CameraRig::CameraRig(std::vector<Camera> cameras, double rank_tol)
    : cameras_(std::move(cameras)) {
  const int m = size();
  if (m < 2) throw Error("a rig needs at least two cameras");

  std::vector<Eigen::Vector4d> centers(m);
  for (int i = 0; i < m; ++i) centers[i] = cameras_[i].center();

  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (angular_distance(Eigen::VectorXd(centers[i]),
                           Eigen::VectorXd(centers[j])) <= 1e-10)
        throw DuplicateCenters(i, j);

  // Seed a candidate group from every pair and grow it to all centers on
  // that line; keep the maximal distinct groups of size >= 3.
  std::set<std::vector<int>> groups;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      std::vector<int> group{i, j};
      for (int k = 0; k < m; ++k) {
        if (k == i || k == j) continue;
        if (centers_collinear(centers, {i, j, k}, rank_tol)) group.push_back(k);
      }
      if (group.size() < 3) continue;
      std::sort(group.begin(), group.end());
      if (centers_collinear(centers, group, rank_tol)) groups.insert(group);
    }
  }
  for (const auto& g : groups) {
    bool maximal = true;
    for (const auto& other : groups) {
      if (other.size() <= g.size()) continue;
      if (std::includes(other.begin(), other.end(), g.begin(), g.end())) {
        maximal = false;
        break;
      }
    }
    if (maximal) collinear_groups_.push_back(g);
  }

  Eigen::MatrixXd stacked(4, m);
  for (int i = 0; i < m; ++i) stacked.col(i) = centers[i];
  coplanar_ = numerical_rank(stacked, rank_tol).numerical_rank <= 3;
}

bool CameraRig::has_large_collinear_group() const {
  for (const auto& g : collinear_groups_)
    if (g.size() >= 4) return true;
  return false;
}

PlueckerLine CameraRig::baseline(const std::vector<int>& group) const {
  if (group.size() < 2) throw Error("baseline needs at least two centers");
  return PlueckerLine::from_points(
      Eigen::Vector4cd(center(group[0]).cast<Complex>()),
      Eigen::Vector4cd(center(group[1]).cast<Complex>()));
}

CameraRig CameraRig::subrig(const std::vector<int>& indices) const {
  std::vector<Camera> sub;
  sub.reserve(indices.size());
  for (int i : indices) sub.push_back(cameras_.at(i));
  return CameraRig(std::move(sub));
}

CameraRig classify_rig(std::vector<Camera> cameras, double rank_tol) {
  return CameraRig(std::move(cameras), rank_tol);
}

}  // namespace lmv
