#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "lmv/errors.hpp"

namespace lmv {

using Complex = std::complex<double>;

/// Default tolerance on singular-value ratios for numerical rank decisions.
inline constexpr double kRankTol = 1e-8;
/// Tolerance on the unit-normalized incidence pairing.
inline constexpr double kIncidenceTol = 1e-8;

/// A point of P^2 or P^3 (and internally P^5), stored as a unit-norm
/// representative of its class. Complex coordinates are supported everywhere;
/// real data stays real.
class ProjectivePoint {
 public:
  /// Normalizes to unit Euclidean norm. Throws ZeroVector on (numerically)
  /// zero input.
  explicit ProjectivePoint(Eigen::VectorXcd coords);
  explicit ProjectivePoint(const Eigen::VectorXd& coords);
  ProjectivePoint(std::initializer_list<Complex> coords);

  const Eigen::VectorXcd& coords() const { return coords_; }
  int size() const { return static_cast<int>(coords_.size()); }
  /// Projective dimension n of the ambient P^n.
  int dim() const { return size() - 1; }

  /// True when some representative of the class has real coordinates.
  bool is_real(double tol = 1e-10) const;
  /// A real representative; requires is_real().
  Eigen::VectorXd real_coords(double tol = 1e-10) const;

 private:
  Eigen::VectorXcd coords_;
};

/// Result of a tolerance-based rank decision.
struct RankReport {
  Eigen::VectorXd singular_values;  // descending
  int numerical_rank = 0;
  /// sigma_{r+1} / sigma_1; zero when the matrix has full numerical rank.
  double gap_ratio = 0.0;
};

/// d([u],[v]) = min_t ||u - t v|| / ||u||, the sine of the minimal angle
/// between the classes. Symmetric, in [0,1], invariant under nonzero complex
/// rescaling of either argument.
double angular_distance(const ProjectivePoint& u, const ProjectivePoint& v);

/// Raw-coordinate versions used on hot paths.
double angular_distance(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v);
double angular_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Root-sum-of-squares of componentwise angular distances.
double product_distance(const std::vector<ProjectivePoint>& x,
                        const std::vector<ProjectivePoint>& y);

/// Numerical rank via SVD. The decision depends only on singular value
/// ratios, so it is invariant under global rescaling.
RankReport numerical_rank(const Eigen::MatrixXcd& matrix,
                          double rank_tol = kRankTol);
RankReport numerical_rank(const Eigen::MatrixXd& matrix,
                          double rank_tol = kRankTol);

/// Plain bilinear cross product. Eigen's cross() conjugates complex results;
/// the projective geometry here needs (a x b)^T a = 0, not orthogonality in
/// the Hermitian sense.
inline Eigen::Vector3cd bilinear_cross(const Eigen::Vector3cd& a,
                                       const Eigen::Vector3cd& b) {
  return {a[1] * b[2] - a[2] * b[1],
          a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

}  // namespace lmv
