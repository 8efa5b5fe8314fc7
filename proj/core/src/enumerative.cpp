#include "lmv/enumerative.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "lmv/multiview.hpp"
#include "lmv/parallel.hpp"
#include "lmv/rng.hpp"

namespace lmv {

namespace {

constexpr double kPencilTol = 1e-10;      // quadric-coefficient threshold
constexpr double kDiscriminantGuard = 1e-12;  // relative guard band

/// Incidence row: r . q = 0 iff the line with Plücker vector q meets the
/// line with Plücker vector p.
template <typename Vec6>
Vec6 incidence_row(const Vec6& p) {
  Vec6 r;
  r << p[5], -p[4], p[3], p[2], -p[1], p[0];
  return r;
}

template <typename Scalar>
Scalar quadric_value(const Eigen::Matrix<Scalar, 6, 1>& p) {
  return p[0] * p[5] - p[1] * p[4] + p[2] * p[3];
}

/// Full polarization: q(s a + t b) = s^2 q(a) + s t polar(a,b) + t^2 q(b).
template <typename Scalar>
Scalar quadric_polar(const Eigen::Matrix<Scalar, 6, 1>& a,
                     const Eigen::Matrix<Scalar, 6, 1>& b) {
  return a[0] * b[5] + a[5] * b[0] - a[1] * b[4] - a[4] * b[1] +
         a[2] * b[3] + a[3] * b[2];
}

/// Roots (s:t) of A s^2 + B s t + C t^2 = 0, solved in homogenized form so a
/// root at infinity of either affine chart is kept.
void homogeneous_quadratic_roots(Complex a, Complex b, Complex c,
                                 std::array<std::array<Complex, 2>, 2>& roots) {
  const Complex disc = b * b - 4.0 * a * c;
  const Complex sq = std::sqrt(disc);
  if (std::abs(a) >= std::abs(c)) {
    // s/t roots; |a| dominant keeps the division stable.
    roots[0] = {(-b + sq) / (2.0 * a), Complex(1.0)};
    roots[1] = {(-b - sq) / (2.0 * a), Complex(1.0)};
  } else {
    roots[0] = {Complex(1.0), (-b + sq) / (2.0 * c)};
    roots[1] = {Complex(1.0), (-b - sq) / (2.0 * c)};
  }
}

Eigen::Matrix<double, 6, 1> real_representative(const PlueckerLine& line) {
  const Vector6cd& p = line.pluecker();
  int imax = 0;
  p.cwiseAbs().maxCoeff(&imax);
  const Complex phase = std::conj(p[imax]) / std::abs(p[imax]);
  return (p * phase).real();
}

/// Shared core of the transversal solve once the incidence matrix rows are
/// known. Real path: inputs real, pencil real, the discriminant sign decides
/// the real count.
TransversalSolution solve_real(const Eigen::Matrix<double, Eigen::Dynamic, 6>& rows,
                               double rank_tol) {
  TransversalSolution out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int observed = static_cast<int>(sv.size());
  int rank = 0;
  for (int k = 0; k < observed; ++k)
    if (sv[k] / sv[0] > rank_tol) ++rank;
  const int nullity = 6 - rank;
  out.pencil_dim = nullity - 1;

  if (nullity >= 3) {
    out.status = TransversalStatus::kInfinite;
    out.margin = observed >= 4 ? (sv[3] / sv[0]) / rank_tol : 0.0;
    return out;
  }
  if (nullity <= 1) {
    out.status = TransversalStatus::kFinite;
    out.margin = (sv[std::min(observed, 4) - 1] / sv[0]) / rank_tol;
    if (nullity == 1) {
      const Eigen::Matrix<double, 6, 1> p = svd.matrixV().col(5);
      if (std::abs(quadric_value(p)) < kPencilTol) {
        out.lines.push_back(PlueckerLine::from_pluecker(p));
        out.real_count = 1;
      }
    }
    return out;
  }

  const Eigen::Matrix<double, 6, 1> a = svd.matrixV().col(4);
  const Eigen::Matrix<double, 6, 1> b = svd.matrixV().col(5);
  const double qa = quadric_value(a);
  const double qb = quadric_value(b);
  const double qab = quadric_polar(a, b);
  const double coeff_max =
      std::max({std::abs(qa), std::abs(qab), std::abs(qb)});
  out.margin = coeff_max / kPencilTol;
  if (coeff_max < kPencilTol) {
    // The whole pencil sits inside the quadric.
    out.status = TransversalStatus::kInfinite;
    return out;
  }

  const double disc = qab * qab - 4.0 * qa * qb;
  const double disc_scale = std::max(qab * qab, std::abs(4.0 * qa * qb));
  std::array<std::array<Complex, 2>, 2> roots;
  homogeneous_quadratic_roots(Complex(qa), Complex(qab), Complex(qb), roots);
  for (const auto& st : roots) {
    const Vector6cd p = st[0] * a.cast<Complex>() + st[1] * b.cast<Complex>();
    out.lines.push_back(PlueckerLine::from_pluecker(p));
  }
  if (std::abs(disc) <= kDiscriminantGuard * disc_scale) {
    out.status = TransversalStatus::kDegenerate;
    out.real_count = 0;
    return out;
  }
  out.status = TransversalStatus::kFinite;
  out.real_count = disc > 0.0 ? 2 : 0;
  return out;
}

TransversalSolution solve_complex(
    const Eigen::Matrix<Complex, Eigen::Dynamic, 6>& rows, double rank_tol) {
  TransversalSolution out;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int observed = static_cast<int>(sv.size());
  int rank = 0;
  for (int k = 0; k < observed; ++k)
    if (sv[k] / sv[0] > rank_tol) ++rank;
  const int nullity = 6 - rank;
  out.pencil_dim = nullity - 1;

  if (nullity >= 3) {
    out.status = TransversalStatus::kInfinite;
    out.margin = observed >= 4 ? (sv[3] / sv[0]) / rank_tol : 0.0;
    return out;
  }
  if (nullity <= 1) {
    out.status = TransversalStatus::kFinite;
    out.margin = (sv[std::min(observed, 4) - 1] / sv[0]) / rank_tol;
    if (nullity == 1) {
      const Vector6cd p = svd.matrixV().col(5);
      if (std::abs(quadric_value(p)) < kPencilTol) {
        out.lines.push_back(PlueckerLine::from_pluecker(p));
        out.real_count = out.lines.back().is_real(1e-8) ? 1 : 0;
      }
    }
    return out;
  }

  const Vector6cd a = svd.matrixV().col(4);
  const Vector6cd b = svd.matrixV().col(5);
  const Complex qa = quadric_value(a);
  const Complex qb = quadric_value(b);
  const Complex qab = quadric_polar(a, b);
  const double coeff_max =
      std::max({std::abs(qa), std::abs(qab), std::abs(qb)});
  out.margin = coeff_max / kPencilTol;
  if (coeff_max < kPencilTol) {
    out.status = TransversalStatus::kInfinite;
    return out;
  }

  const Complex disc = qab * qab - 4.0 * qa * qb;
  const double disc_scale =
      std::max(std::norm(qab), std::abs(std::abs(4.0 * qa * qb)));
  std::array<std::array<Complex, 2>, 2> roots;
  homogeneous_quadratic_roots(qa, qab, qb, roots);
  for (const auto& st : roots) {
    const Vector6cd p = st[0] * a + st[1] * b;
    out.lines.push_back(PlueckerLine::from_pluecker(p));
  }
  if (std::abs(disc) <= kDiscriminantGuard * disc_scale) {
    out.status = TransversalStatus::kDegenerate;
    return out;
  }
  out.status = TransversalStatus::kFinite;
  for (const auto& line : out.lines) out.real_count += line.is_real(1e-8);
  return out;
}

}  // namespace

TransversalSolution common_transversals(const std::vector<PlueckerLine>& lines,
                                        double rank_tol) {
  if (lines.empty()) {
    TransversalSolution out;
    out.status = TransversalStatus::kInfinite;
    out.pencil_dim = 4;
    return out;
  }
  bool all_real = true;
  for (const auto& l : lines) all_real &= l.is_real(1e-10);
  const int k = static_cast<int>(lines.size());
  if (all_real) {
    Eigen::Matrix<double, Eigen::Dynamic, 6> rows(k, 6);
    for (int i = 0; i < k; ++i)
      rows.row(i) = incidence_row(
          Eigen::Matrix<double, 6, 1>(real_representative(lines[i])));
    return solve_real(rows, rank_tol);
  }
  Eigen::Matrix<Complex, Eigen::Dynamic, 6> rows(k, 6);
  for (int i = 0; i < k; ++i)
    rows.row(i) = incidence_row(Vector6cd(lines[i].pluecker()));
  return solve_complex(rows, rank_tol);
}

TransversalSolution transversals_of_four(const PlueckerLine& l1,
                                         const PlueckerLine& l2,
                                         const PlueckerLine& l3,
                                         const PlueckerLine& l4) {
  return common_transversals({l1, l2, l3, l4});
}

int Quadric3::rank(double tol) const {
  return numerical_rank(Eigen::MatrixXcd(matrix), tol).numerical_rank;
}

Quadric3 quadric_through_three_lines(const PlueckerLine& l1,
                                     const PlueckerLine& l2,
                                     const PlueckerLine& l3, double rank_tol) {
  // Nine sample points, three per line, against the ten quadric coefficients
  // (A00,A11,A22,A33,A01,A02,A03,A12,A13,A23).
  const PlueckerLine* lines[3] = {&l1, &l2, &l3};
  Eigen::Matrix<Complex, 9, 10> system;
  int row = 0;
  for (const PlueckerLine* line : lines) {
    const Matrix42cd& basis = line->basis();
    const Eigen::Vector4cd pts[3] = {
        basis.col(0), basis.col(1), (basis.col(0) + basis.col(1)).normalized()};
    for (const auto& p : pts) {
      system.row(row++) << p[0] * p[0], p[1] * p[1], p[2] * p[2], p[3] * p[3],
          2.0 * p[0] * p[1], 2.0 * p[0] * p[2], 2.0 * p[0] * p[3],
          2.0 * p[1] * p[2], 2.0 * p[1] * p[3], 2.0 * p[2] * p[3];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(system, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] / sv[0] > rank_tol) ++rank;
  const int nullity = 10 - rank;
  if (nullity != 1) throw NonUniqueQuadric(nullity);

  const Eigen::Matrix<Complex, 10, 1> a = svd.matrixV().col(9);
  Quadric3 q;
  q.matrix << a[0], a[4], a[5], a[6],
              a[4], a[1], a[7], a[8],
              a[5], a[7], a[2], a[9],
              a[6], a[8], a[9], a[3];
  return q;
}

namespace {

/// Min-norm preimage point of an image point: together with the center it
/// spans the back-projected line of x.
Eigen::Vector4d preimage_point(const Matrix34d& c, const Eigen::Vector3d& x) {
  return c.transpose() * (c * c.transpose()).ldlt().solve(x);
}

Eigen::Vector4cd preimage_point(const Matrix34d& c, const Eigen::Vector3cd& x) {
  return c.transpose().cast<Complex>() *
         (c * c.transpose()).ldlt().solve(Eigen::Matrix3d::Identity()).cast<Complex>() * x;
}

/// Kernel of a 3x4 matrix by cofactor expansion.
Eigen::Vector4d kernel4(const Matrix34d& c) {
  Eigen::Vector4d k;
  Eigen::Matrix3d minor;
  for (int j = 0; j < 4; ++j) {
    int col = 0;
    for (int q = 0; q < 4; ++q) {
      if (q == j) continue;
      minor.col(col++) = c.col(q);
    }
    k[j] = (j % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
  }
  return k;
}

bool verified_member(const CameraRig& rig, const LineTuple& tuple,
                     double rank_tol) {
  const Eigen::MatrixXcd m = build_M(rig, tuple);
  return numerical_rank(m, rank_tol).numerical_rank <= 2;
}

}  // namespace

MultidegreeOutcome multidegree_check(const CameraRig& rig,
                                     const std::vector<int>& degrees,
                                     int trials, std::uint64_t seed) {
  const int m = rig.size();
  std::vector<int> d(degrees);
  if (static_cast<int>(d.size()) > m)
    throw Error("degree vector longer than the rig");
  d.resize(m, 0);

  int sum = 0;
  std::vector<int> two_idx, one_idx;
  for (int i = 0; i < m; ++i) {
    sum += d[i];
    if (d[i] == 2) two_idx.push_back(i);
    else if (d[i] == 1) one_idx.push_back(i);
    else if (d[i] != 0) throw Error("degrees must be 0, 1 or 2");
  }
  if (sum != 4) throw Error("degrees must sum to 4");

  MultidegreeOutcome outcome;
  outcome.counts.reserve(trials);

  for (int trial = 0; trial < trials; ++trial) {
    bool done = false;
    for (int attempt = 0; attempt < 64 && !done; ++attempt) {
      Rng rng(sub_seed(seed, static_cast<std::uint64_t>(trial) * 64 + attempt));
      if (attempt > 0) ++outcome.degenerate_resamples;

      // Fixed slice data: full image lines where d=2, image points where d=1.
      std::vector<Eigen::Vector3d> fixed_lines(m), fixed_points(m);
      for (int i : two_idx) fixed_lines[i] = rng.gaussian_vector(3);
      for (int i : one_idx) fixed_points[i] = rng.gaussian_vector(3);

      std::vector<PlueckerLine> candidates;
      if (two_idx.size() == 2) {
        // Two full planes meet in exactly a line.
        Eigen::Matrix<Complex, 2, 4> planes;
        for (int k = 0; k < 2; ++k)
          planes.row(k) = (rig.camera(two_idx[k]).matrix().transpose() *
                           fixed_lines[two_idx[k]])
                              .transpose()
                              .cast<Complex>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(planes, Eigen::ComputeFullV);
        if (svd.singularValues()[1] / svd.singularValues()[0] < 1e-8) continue;
        candidates.push_back(PlueckerLine::from_points(
            Eigen::Vector4cd(svd.matrixV().col(2)),
            Eigen::Vector4cd(svd.matrixV().col(3))));
      } else if (two_idx.size() == 1) {
        // One plane, two back-projected point constraints: the two piercing
        // points span the solution.
        const int i = two_idx[0];
        const Eigen::Vector4d h =
            rig.camera(i).matrix().transpose() * fixed_lines[i];
        Eigen::Vector4d piercing[2];
        bool ok = true;
        for (int k = 0; k < 2; ++k) {
          const int j = one_idx[k];
          const Eigen::Vector4d c = rig.center(j);
          const Eigen::Vector4d p =
              preimage_point(rig.camera(j).matrix(), fixed_points[j]);
          piercing[k] = h.dot(p) * c - h.dot(c) * p;
          ok &= piercing[k].norm() > 1e-10;
        }
        if (!ok) continue;
        try {
          candidates.push_back(PlueckerLine::from_points(
              Eigen::Vector4cd(piercing[0].cast<Complex>()),
              Eigen::Vector4cd(piercing[1].cast<Complex>())));
        } catch (const DegenerateSpan&) {
          continue;
        }
      } else {
        // Four back-projected constraint lines; their common transversals
        // are the solutions.
        std::vector<PlueckerLine> constraint;
        bool ok = true;
        for (int j : one_idx) {
          const Eigen::Vector4d c = rig.center(j);
          const Eigen::Vector4d p =
              preimage_point(rig.camera(j).matrix(), fixed_points[j]);
          try {
            constraint.push_back(PlueckerLine::from_points(
                Eigen::Vector4cd(c.cast<Complex>()),
                Eigen::Vector4cd(p.cast<Complex>())));
          } catch (const DegenerateSpan&) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const TransversalSolution sol = common_transversals(constraint);
        if (sol.status != TransversalStatus::kFinite) continue;
        candidates = sol.lines;
      }

      // Count candidates that verify as consistent tuples meeting every
      // fixed slice.
      int count = 0;
      bool degenerate = false;
      for (const PlueckerLine& line : candidates) {
        LineTuple tuple;
        try {
          tuple = forward_map(rig, line);
        } catch (const LineThroughCenter&) {
          degenerate = true;
          break;
        }
        bool fits = verified_member(rig, tuple, kRankTol);
        for (int i : two_idx)
          fits &= angular_distance(
                      tuple[i].coords(),
                      Eigen::VectorXcd(fixed_lines[i].cast<Complex>())) < 1e-6;
        for (int i : one_idx)
          fits &= std::abs(fixed_points[i]
                               .cast<Complex>()
                               .cwiseProduct(tuple[i].coords())
                               .sum()) < 1e-6;
        if (fits) ++count;
        else degenerate = true;
      }
      if (degenerate || count == 0) continue;
      outcome.counts.push_back(count);
      done = true;
    }
    if (!done)
      throw Error("multidegree trial failed to produce a generic sample");
  }
  return outcome;
}

RealTransversalStats expected_real_transversals(std::uint64_t samples,
                                                std::uint64_t seed,
                                                int threads) {
  if (samples < 1) throw Error("need at least one sample");
  // Fixed image points: the standard simplex of P^2. The camera distribution
  // is orthogonally invariant, so this choice does not affect the law of the
  // back-projected lines.
  const Eigen::Vector3d image_points[4] = {
      Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
      Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 1, 1).normalized()};

  // -1 marks a discarded sample; summation over the slot vector keeps the
  // result independent of scheduling.
  std::vector<signed char> counts(samples, -1);
  parallel_for(samples, threads, [&](std::size_t s) {
    Rng rng(sub_seed(seed, s));
    Eigen::Matrix<double, 4, 6> rows;
    for (int i = 0; i < 4; ++i) {
      Matrix34d c;
      for (int col = 0; col < 4; ++col)
        for (int r = 0; r < 3; ++r) c(r, col) = rng.gaussian();
      const Eigen::Vector4d center = kernel4(c);
      if (center.norm() < 1e-12) return;
      const Eigen::Vector4d p = preimage_point(c, image_points[i]);
      const Eigen::Matrix<double, 6, 1> k = pluecker_of_pair(center, p);
      const double kn = k.norm();
      if (kn < 1e-12 * center.norm() * p.norm()) return;
      rows.row(i) = incidence_row(Eigen::Matrix<double, 6, 1>(k / kn));
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 6>> svd(rows,
                                                      Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[3] / sv[0] <= kRankTol) return;  // infinite family, discard
    const Eigen::Matrix<double, 6, 1> a = svd.matrixV().col(4);
    const Eigen::Matrix<double, 6, 1> b = svd.matrixV().col(5);
    const double qa = quadric_value(a);
    const double qb = quadric_value(b);
    const double qab = quadric_polar(a, b);
    if (std::max({std::abs(qa), std::abs(qab), std::abs(qb)}) < kPencilTol)
      return;
    const double disc = qab * qab - 4.0 * qa * qb;
    const double scale = std::max(qab * qab, std::abs(4.0 * qa * qb));
    if (std::abs(disc) <= kDiscriminantGuard * scale) return;
    counts[s] = disc > 0.0 ? 2 : 0;
  });

  RealTransversalStats stats;
  std::uint64_t sum = 0;
  for (signed char c : counts) {
    if (c < 0) {
      ++stats.discarded;
      continue;
    }
    ++stats.samples;
    sum += static_cast<std::uint64_t>(c);
  }
  if (stats.samples == 0) return stats;
  stats.mean = static_cast<double>(sum) / static_cast<double>(stats.samples);
  // Counts are 0 or 2: E[X^2] = 2 E[X].
  const double second_moment = 2.0 * stats.mean;
  const double variance = std::max(0.0, second_moment - stats.mean * stats.mean);
  stats.std_error = std::sqrt(variance / static_cast<double>(stats.samples));
  return stats;
}

}  // namespace lmv
