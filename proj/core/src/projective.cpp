#include "lmv/projective.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace lmv {

namespace {

Eigen::VectorXcd normalized_or_throw(Eigen::VectorXcd v) {
  const double norm = v.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm)) throw ZeroVector();
  return v / norm;
}

}  // namespace

ProjectivePoint::ProjectivePoint(Eigen::VectorXcd coords)
    : coords_(normalized_or_throw(std::move(coords))) {}

ProjectivePoint::ProjectivePoint(const Eigen::VectorXd& coords)
    : coords_(normalized_or_throw(coords.cast<Complex>())) {}

ProjectivePoint::ProjectivePoint(std::initializer_list<Complex> coords)
    : coords_(normalized_or_throw(
          Eigen::Map<const Eigen::VectorXcd>(coords.begin(),
                                             static_cast<int>(coords.size())))) {}

bool ProjectivePoint::is_real(double tol) const {
  // Align the phase of the largest-magnitude coordinate, then check the
  // imaginary part of the whole vector.
  int imax = 0;
  coords_.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = coords_[imax];
  const Complex phase = std::conj(pivot) / std::abs(pivot);
  return ((coords_ * phase).imag()).norm() <= tol;
}

Eigen::VectorXd ProjectivePoint::real_coords(double tol) const {
  int imax = 0;
  coords_.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = coords_[imax];
  const Complex phase = std::conj(pivot) / std::abs(pivot);
  const Eigen::VectorXcd aligned = coords_ * phase;
  if (aligned.imag().norm() > tol)
    throw Error("projective point has no real representative");
  return aligned.real();
}

double angular_distance(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  if (u.size() != v.size())
    throw LengthMismatch("angular_distance: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 1e-300) || !(nv > 1e-300)) throw ZeroVector();
  // min_t ||u - t v||^2 / ||u||^2 = 1 - |<v,u>|^2 / (||u||^2 ||v||^2)
  const double c = std::abs(u.dot(v)) / (nu * nv);
  const double s2 = 1.0 - std::min(1.0, c * c);
  return std::sqrt(std::max(0.0, s2));
}

double angular_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw LengthMismatch("angular_distance: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 1e-300) || !(nv > 1e-300)) throw ZeroVector();
  const double c = std::abs(u.dot(v)) / (nu * nv);
  const double s2 = 1.0 - std::min(1.0, c * c);
  return std::sqrt(std::max(0.0, s2));
}

double angular_distance(const ProjectivePoint& u, const ProjectivePoint& v) {
  return angular_distance(u.coords(), v.coords());
}

double product_distance(const std::vector<ProjectivePoint>& x,
                        const std::vector<ProjectivePoint>& y) {
  if (x.size() != y.size())
    throw LengthMismatch("product_distance: tuple lengths differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = angular_distance(x[i], y[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

RankReport rank_from_singular_values(Eigen::VectorXd sv, double rank_tol) {
  if (!(rank_tol > 0.0) || !(rank_tol < 1.0))
    throw Error("rank_tol must lie in (0, 1)");
  const double s0 = sv.size() > 0 ? sv[0] : 0.0;
  if (!(s0 > 0.0)) throw ZeroMatrix();
  RankReport report;
  report.singular_values = std::move(sv);
  int r = 0;
  for (int k = 0; k < report.singular_values.size(); ++k)
    if (report.singular_values[k] / s0 > rank_tol) ++r;
  report.numerical_rank = r;
  report.gap_ratio =
      r < report.singular_values.size() ? report.singular_values[r] / s0 : 0.0;
  return report;
}

}  // namespace

RankReport numerical_rank(const Eigen::MatrixXcd& matrix, double rank_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix);
  return rank_from_singular_values(svd.singularValues(), rank_tol);
}

RankReport numerical_rank(const Eigen::MatrixXd& matrix, double rank_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  return rank_from_singular_values(svd.singularValues(), rank_tol);
}

}  // namespace lmv
