#include "lmv/grassmannian.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace lmv {

Vector6cd pluecker_of_pair(const Eigen::Vector4cd& x, const Eigen::Vector4cd& y) {
  Vector6cd p;
  p[0] = x[0] * y[1] - x[1] * y[0];
  p[1] = x[0] * y[2] - x[2] * y[0];
  p[2] = x[0] * y[3] - x[3] * y[0];
  p[3] = x[1] * y[2] - x[2] * y[1];
  p[4] = x[1] * y[3] - x[3] * y[1];
  p[5] = x[2] * y[3] - x[3] * y[2];
  return p;
}

Eigen::Matrix<double, 6, 1> pluecker_of_pair(const Eigen::Vector4d& x,
                                             const Eigen::Vector4d& y) {
  Eigen::Matrix<double, 6, 1> p;
  p[0] = x[0] * y[1] - x[1] * y[0];
  p[1] = x[0] * y[2] - x[2] * y[0];
  p[2] = x[0] * y[3] - x[3] * y[0];
  p[3] = x[1] * y[2] - x[2] * y[1];
  p[4] = x[1] * y[3] - x[3] * y[1];
  p[5] = x[2] * y[3] - x[3] * y[2];
  return p;
}

namespace {

Matrix42cd orthonormal_pair(const Eigen::Vector4cd& x, const Eigen::Vector4cd& y) {
  Matrix42cd basis;
  basis.col(0) = x.normalized();
  Eigen::Vector4cd r = y - basis.col(0) * basis.col(0).dot(y);
  basis.col(1) = r.normalized();
  return basis;
}

}  // namespace

PlueckerLine PlueckerLine::from_points(const Eigen::Vector4cd& x,
                                       const Eigen::Vector4cd& y) {
  const double nx = x.norm();
  const double ny = y.norm();
  if (!(nx > 1e-300) || !(ny > 1e-300)) throw ZeroVector();
  Vector6cd p = pluecker_of_pair(x, y);
  const double pn = p.norm();
  if (pn < 1e-12 * nx * ny) throw DegenerateSpan();
  return PlueckerLine(p / pn, orthonormal_pair(x, y));
}

PlueckerLine PlueckerLine::from_points(const ProjectivePoint& x,
                                       const ProjectivePoint& y) {
  if (x.size() != 4 || y.size() != 4)
    throw Error("lines in P^3 need points with 4 coordinates");
  return from_points(Eigen::Vector4cd(x.coords()), Eigen::Vector4cd(y.coords()));
}

PlueckerLine PlueckerLine::from_pluecker(const Vector6cd& p_in) {
  const double pn = p_in.norm();
  if (!(pn > 1e-300)) throw ZeroVector();
  const Vector6cd p = p_in / pn;
  // Column span of the skew matrix is the candidate 2-plane.
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(0, 1) = p[0]; s(0, 2) = p[1]; s(0, 3) = p[2];
  s(1, 2) = p[3]; s(1, 3) = p[4]; s(2, 3) = p[5];
  s(1, 0) = -p[0]; s(2, 0) = -p[1]; s(3, 0) = -p[2];
  s(2, 1) = -p[3]; s(3, 1) = -p[4]; s(3, 2) = -p[5];
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(s, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  if (sv[2] / sv[0] > 1e-6)
    throw InvalidLine("Plücker coordinates do not satisfy the quadric");
  Matrix42cd basis = svd.matrixU().leftCols<2>();
  // Re-embed so the stored coordinates satisfy the quadric exactly up to
  // rounding, and keep the phase of the input representative.
  Vector6cd q = pluecker_of_pair(Eigen::Vector4cd(basis.col(0)),
                                 Eigen::Vector4cd(basis.col(1)));
  q /= q.norm();
  const Complex align = p.dot(q);  // conj(p) . q
  if (std::abs(align) > 1e-300) q *= std::conj(align) / std::abs(align);
  return PlueckerLine(q, std::move(basis));
}

PlueckerLine PlueckerLine::from_pluecker(const Eigen::Matrix<double, 6, 1>& p) {
  return from_pluecker(Vector6cd(p.cast<Complex>()));
}

Complex PlueckerLine::quadric_residual() const {
  return p_[0] * p_[5] - p_[1] * p_[4] + p_[2] * p_[3];
}

bool PlueckerLine::is_real(double tol) const {
  int imax = 0;
  p_.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = p_[imax];
  const Complex phase = std::conj(pivot) / std::abs(pivot);
  return ((p_ * phase).imag()).norm() <= tol;
}

Eigen::Matrix4cd PlueckerLine::skew_matrix() const {
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(0, 1) = p_[0]; s(0, 2) = p_[1]; s(0, 3) = p_[2];
  s(1, 2) = p_[3]; s(1, 3) = p_[4]; s(2, 3) = p_[5];
  s(1, 0) = -p_[0]; s(2, 0) = -p_[1]; s(3, 0) = -p_[2];
  s(2, 1) = -p_[3]; s(3, 1) = -p_[4]; s(3, 2) = -p_[5];
  return s;
}

PlueckerLine line_from_points(const ProjectivePoint& x, const ProjectivePoint& y) {
  return PlueckerLine::from_points(x, y);
}

PlueckerLine chart(const ChartPoint& v) {
  Eigen::Vector4cd a, b;
  a << 1.0, 0.0, v.v(0, 0), v.v(0, 1);
  b << 0.0, 1.0, v.v(1, 0), v.v(1, 1);
  return PlueckerLine::from_points(a, b);
}

ChartPoint chart_coordinates(const PlueckerLine& line, double tol) {
  const Vector6cd& p = line.pluecker();
  if (std::abs(p[0]) <= tol) throw ChartDegenerate();
  // p = s * (1, v21, v22, -v11, -v12, det v)
  return ChartPoint(-p[3] / p[0], -p[4] / p[0], p[1] / p[0], p[2] / p[0]);
}

PlueckerLine dual_line(const PlueckerLine& line, DualMode mode) {
  Vector6cd p = line.pluecker();
  if (mode == DualMode::kHermitian) p = p.conjugate();
  Vector6cd d;
  d << p[5], -p[4], p[3], p[2], -p[1], p[0];
  return PlueckerLine::from_pluecker(d);
}

double grassmann_distance(const PlueckerLine& l, const PlueckerLine& k) {
  const Matrix42cd& bl = l.basis();
  const Matrix42cd& bk = k.basis();
  const Eigen::Matrix4cd diff =
      bl * bl.adjoint() - bk * bk.adjoint();
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(diff);
  return std::min(1.0, svd.singularValues()[0]);
}

Complex meet_pairing(const Vector6cd& p, const Vector6cd& q) {
  return 0.5 * (p[0] * q[5] + p[5] * q[0] - p[1] * q[4] - p[4] * q[1] +
                p[2] * q[3] + p[3] * q[2]);
}

double meet_pairing(const Eigen::Matrix<double, 6, 1>& p,
                    const Eigen::Matrix<double, 6, 1>& q) {
  return 0.5 * (p[0] * q[5] + p[5] * q[0] - p[1] * q[4] - p[4] * q[1] +
                p[2] * q[3] + p[3] * q[2]);
}

Complex meet_pairing(const PlueckerLine& l, const PlueckerLine& k) {
  return meet_pairing(l.pluecker(), k.pluecker());
}

bool lines_intersect(const PlueckerLine& l, const PlueckerLine& k, double tol) {
  return std::abs(meet_pairing(l, k)) < tol;
}

double point_line_distance(const PlueckerLine& line, const Eigen::Vector4cd& x) {
  const double nx = x.norm();
  if (!(nx > 1e-300)) throw ZeroVector();
  const Matrix42cd& b = line.basis();
  const Eigen::Vector4cd residual = x - b * (b.adjoint() * x);
  return residual.norm() / nx;
}

bool point_on_line(const PlueckerLine& line, const ProjectivePoint& x,
                   double tol) {
  if (x.size() != 4) throw Error("point_on_line expects a point of P^3");
  return point_line_distance(line, Eigen::Vector4cd(x.coords())) < tol;
}

}  // namespace lmv
