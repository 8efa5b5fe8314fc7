#pragma once

#include <Eigen/Core>

#include "lmv/projective.hpp"

namespace lmv {

using Vector6cd = Eigen::Matrix<Complex, 6, 1>;
using Matrix42cd = Eigen::Matrix<Complex, 4, 2>;

/// A line in P^3 in Plücker coordinates.
///
/// Coordinate convention: p = (p0,...,p5) are the lexicographic 2x2 minors
/// (01,02,03,12,13,23) of a spanning pair, i.e. p_k = x_i y_j - x_j y_i. The
/// quadric p0 p5 - p1 p4 + p2 p3 = 0 is the Pfaffian of the skew matrix
/// x y^T - y x^T; this is the same layout as the classical skew-matrix
/// presentation of the Grassmannian, up to a global projective sign.
///
/// Lines are stored both as a unit-norm Plücker vector and as a cached
/// orthonormal spanning pair: the pairing needs Plücker coordinates, the
/// projections need bases.
class PlueckerLine {
 public:
  /// Line through two projectively distinct points of P^3.
  static PlueckerLine from_points(const ProjectivePoint& x,
                                  const ProjectivePoint& y);
  static PlueckerLine from_points(const Eigen::Vector4cd& x,
                                  const Eigen::Vector4cd& y);

  /// Line from 6 Plücker coordinates. The input must satisfy the quadric to
  /// about 1e-6 after unit normalization; the stored representative is
  /// re-embedded from the recovered 2-plane, so the quadric residual of the
  /// result is at rounding level.
  static PlueckerLine from_pluecker(const Vector6cd& p);
  static PlueckerLine from_pluecker(const Eigen::Matrix<double, 6, 1>& p);

  /// Unit-norm Plücker vector.
  const Vector6cd& pluecker() const { return p_; }
  /// Orthonormal spanning pair of the 2-plane in C^4 (columns).
  const Matrix42cd& basis() const { return basis_; }

  /// p0 p5 - p1 p4 + p2 p3 of the stored unit representative.
  Complex quadric_residual() const;

  bool is_real(double tol = 1e-10) const;

  /// The 4x4 skew matrix with the stored coordinates in lexicographic minor
  /// positions; its column span is the line.
  Eigen::Matrix4cd skew_matrix() const;

 private:
  PlueckerLine(Vector6cd p, Matrix42cd basis)
      : p_(std::move(p)), basis_(std::move(basis)) {}

  Vector6cd p_;
  Matrix42cd basis_;
};

/// Affine chart coordinates of the Grassmannian: v parameterizes the line
/// rowspan [[1,0,v11,v12],[0,1,v21,v22]]. The designated Plücker coordinate
/// of every chart image is p0.
struct ChartPoint {
  Eigen::Matrix2cd v;

  ChartPoint() : v(Eigen::Matrix2cd::Zero()) {}
  explicit ChartPoint(const Eigen::Matrix2cd& m) : v(m) {}
  explicit ChartPoint(const Eigen::Matrix2d& m) : v(m.cast<Complex>()) {}
  ChartPoint(Complex v11, Complex v12, Complex v21, Complex v22) {
    v << v11, v12, v21, v22;
  }
};

PlueckerLine line_from_points(const ProjectivePoint& x,
                              const ProjectivePoint& y);

PlueckerLine chart(const ChartPoint& v);

/// Inverse of chart(). Throws ChartDegenerate when the designated Plücker
/// coordinate vanishes numerically.
ChartPoint chart_coordinates(const PlueckerLine& line, double tol = 1e-12);

enum class DualMode { kEuclidean, kHermitian };

/// Line of points annihilating the given one under the chosen form
/// (p^T q = 0 for Euclidean, p^* q = 0 for Hermitian). An involution in both
/// modes; the two modes agree on real lines.
PlueckerLine dual_line(const PlueckerLine& line,
                       DualMode mode = DualMode::kHermitian);

/// Operator norm of the difference of the orthogonal projectors, i.e. the
/// sine of the largest principal angle. Unitary invariant, in [0,1].
double grassmann_distance(const PlueckerLine& l, const PlueckerLine& k);

/// Polarization of the Plücker quadric, normalized so the diagonal value is
/// exactly the quadric. Vanishes iff the lines intersect.
Complex meet_pairing(const PlueckerLine& l, const PlueckerLine& k);

/// Raw-coordinate pairing for hot paths: (p0q5+p5q0-p1q4-p4q1+p2q3+p3q2)/2.
Complex meet_pairing(const Vector6cd& p, const Vector6cd& q);
double meet_pairing(const Eigen::Matrix<double, 6, 1>& p,
                    const Eigen::Matrix<double, 6, 1>& q);

/// Whether the unit-normalized pairing vanishes within tol.
bool lines_intersect(const PlueckerLine& l, const PlueckerLine& k,
                     double tol = kIncidenceTol);

/// Whether x lies on the line within tolerance (angular distance of x from
/// the spanning 2-plane).
bool point_on_line(const PlueckerLine& line, const ProjectivePoint& x,
                   double tol = kIncidenceTol);

/// Distance of a point from the line's 2-plane (sine of the angle).
double point_line_distance(const PlueckerLine& line, const Eigen::Vector4cd& x);

/// Lexicographic minors of a spanning pair; no normalization.
Vector6cd pluecker_of_pair(const Eigen::Vector4cd& x, const Eigen::Vector4cd& y);
Eigen::Matrix<double, 6, 1> pluecker_of_pair(const Eigen::Vector4d& x,
                                             const Eigen::Vector4d& y);

}  // namespace lmv
