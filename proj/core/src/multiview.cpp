#include "lmv/multiview.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lmv/enumerative.hpp"

namespace lmv {

Eigen::MatrixXcd build_M(const CameraRig& rig, const LineTuple& tuple) {
  if (tuple.size() != rig.size())
    throw LengthMismatch("tuple length does not match the rig");
  Eigen::MatrixXcd m(4, rig.size());
  for (int i = 0; i < rig.size(); ++i) {
    const ProjectivePoint& ell = tuple[i];
    if (ell.size() != 3)
      throw Error("tuple components must be image lines in P^2");
    m.col(i) = rig.camera(i).matrix().transpose().cast<Complex>() * ell.coords();
  }
  return m;
}

LineTuple forward_map(const CameraRig& rig, const PlueckerLine& line) {
  std::vector<ProjectivePoint> components;
  components.reserve(rig.size());
  for (int i = 0; i < rig.size(); ++i) {
    try {
      components.push_back(project_line(rig.camera(i), line));
    } catch (const LineThroughCenter&) {
      throw LineThroughCenter(i);
    }
  }
  return LineTuple(std::move(components));
}

FamilyTestResult exceptional_locus_test(const CameraRig& rig,
                                        const LineTuple& tuple,
                                        const std::vector<int>& group,
                                        double rank_tol) {
  if (group.size() < 4) throw NotCollinearGroup();
  Eigen::MatrixXd stacked(4, group.size());
  for (std::size_t k = 0; k < group.size(); ++k) {
    if (group[k] < 0 || group[k] >= rig.size()) throw NotCollinearGroup();
    stacked.col(k) = rig.center(group[k]);
  }
  if (numerical_rank(stacked, rank_tol).numerical_rank != 2)
    throw NotCollinearGroup();

  // Baseline from the dominant 2-plane of the stacked centers.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullU);
  const PlueckerLine baseline = PlueckerLine::from_points(
      Eigen::Vector4cd(svd.matrixU().col(0).cast<Complex>()),
      Eigen::Vector4cd(svd.matrixU().col(1).cast<Complex>()));
  const PlueckerLine dual_baseline = dual_line(baseline, DualMode::kHermitian);
  const Eigen::Vector4cd f1 = dual_baseline.basis().col(0);
  const Eigen::Vector4cd f2 = dual_baseline.basis().col(1);

  FamilyTestResult result;
  std::vector<PlueckerLine> constraints;
  constraints.reserve(group.size());
  for (int i : group) {
    const Plane3 plane = back_project(rig.camera(i), tuple[i]);
    const Complex a = plane.h.cwiseProduct(f1).sum();
    const Complex b = plane.h.cwiseProduct(f2).sum();
    if (std::hypot(std::abs(a), std::abs(b)) < 1e-10) {
      // The dual baseline lies inside the plane; the constraint line widens
      // to a 2-flat and every line meets it, so the row drops out.
      result.nongeneric = true;
      continue;
    }
    const Eigen::Vector4cd q = b * f1 - a * f2;
    const Eigen::Vector4cd c = rig.center(i).cast<Complex>();
    constraints.push_back(PlueckerLine::from_points(c, q));
  }

  if (constraints.size() < 4) {
    // Three or fewer incidence conditions always leave a positive-dimensional
    // family.
    result.infinite = true;
    result.margin = 0.0;
    return result;
  }
  const TransversalSolution sol = common_transversals(constraints, rank_tol);
  result.infinite = (sol.status == TransversalStatus::kInfinite);
  result.margin = sol.margin;
  return result;
}

MembershipReport membership(const CameraRig& rig, const LineTuple& tuple,
                            const MembershipConfig& config) {
  MembershipReport report;
  const Eigen::MatrixXcd m = build_M(rig, tuple);
  const RankReport rank_report = numerical_rank(m, config.rank_tol);
  report.rank = rank_report.numerical_rank;
  report.diagnostics.rank_gap_ratio = rank_report.gap_ratio;

  if (report.rank == 2) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.transpose(), Eigen::ComputeFullV);
    const Eigen::Matrix4cd v = svd.matrixV();
    report.witness_line =
        PlueckerLine::from_points(Eigen::Vector4cd(v.col(2)),
                                  Eigen::Vector4cd(v.col(3)));
  }

  report.exceptional_ok = true;
  report.diagnostics.family_margin = 0.0;
  if (report.rank <= 2) {
    for (const auto& group : rig.collinear_groups()) {
      if (group.size() < 4) continue;
      const FamilyTestResult family =
          exceptional_locus_test(rig, tuple, group, config.rank_tol);
      report.diagnostics.family_margin =
          std::max(report.diagnostics.family_margin, family.margin);
      report.diagnostics.family_nongeneric |= family.nongeneric;
      report.diagnostics.family_marginal |=
          family.margin > 0.1 && family.margin < 10.0;
      if (!family.infinite) report.exceptional_ok = false;
    }
  }

  report.in_variety = report.rank <= 2 && report.exceptional_ok;
  report.singular = report.in_variety && report.rank == 1;

  if (!report.in_variety) {
    report.in_image = false;
  } else if (report.rank == 2) {
    bool through_center = false;
    for (int i = 0; i < rig.size() && !through_center; ++i)
      through_center = point_line_distance(
                           *report.witness_line,
                           rig.center(i).cast<Complex>()) < config.incidence_tol;
    report.in_image = !through_center;
  } else {
    // Back-projected planes meet in a plane; some line in it avoids every
    // center, so the tuple is an actual image.
    report.in_image = true;
  }
  return report;
}

TrifocalTensor::TrifocalTensor(const CameraRig& rig, int pivot) : pivot_(pivot) {
  if (rig.size() != 3) throw Error("trifocal tensor needs exactly 3 cameras");
  if (pivot < 0 || pivot > 2) throw Error("pivot index out of range");
  int k = 0;
  for (int i = 0; i < 3; ++i)
    if (i != pivot) others_[k++] = i;

  const Matrix34d& cp = rig.camera(pivot).matrix();
  const Eigen::Matrix3d gram_inv =
      (cp * cp.transpose()).ldlt().solve(Eigen::Matrix3d::Identity());
  const Eigen::Matrix<double, 3, 4> pinv = gram_inv * cp;  // (C_p^T)^+
  for (int j = 0; j < 2; ++j)
    b_[j] = pinv * rig.camera(others_[j]).matrix().transpose();

  // T[a](j,k) = sum_{b,c} eps_{abc} B1(b,j) B2(c,k)
  for (int a = 0; a < 3; ++a) {
    const int b1 = (a + 1) % 3;
    const int c1 = (a + 2) % 3;
    slices_[a] = b_[0].row(b1).transpose() * b_[1].row(c1) -
                 b_[0].row(c1).transpose() * b_[1].row(b1);
  }
}

Complex TrifocalTensor::residual(const Eigen::Vector3cd& l1,
                                 const Eigen::Vector3cd& l2,
                                 const Eigen::Vector3cd& l3) const {
  const Eigen::Vector3cd args[3] = {l1, l2, l3};
  const Eigen::Vector3cd u = b_[0].cast<Complex>() * args[others_[0]];
  const Eigen::Vector3cd v = b_[1].cast<Complex>() * args[others_[1]];
  return args[pivot_].cwiseProduct(bilinear_cross(u, v)).sum();
}

double TrifocalTensor::normalized_residual(const LineTuple& tuple) const {
  if (tuple.size() != 3)
    throw LengthMismatch("trifocal residual takes a triple");
  const Eigen::Vector3cd l[3] = {tuple[0].coords(), tuple[1].coords(),
                                 tuple[2].coords()};
  const Eigen::Vector3cd u = b_[0].cast<Complex>() * l[others_[0]];
  const Eigen::Vector3cd v = b_[1].cast<Complex>() * l[others_[1]];
  const double scale = l[pivot_].norm() * u.norm() * v.norm();
  if (!(scale > 1e-300)) return 0.0;
  return std::abs(l[pivot_].cwiseProduct(bilinear_cross(u, v)).sum()) / scale;
}

TrifocalTensor trifocal_tensor(const CameraRig& rig, int pivot) {
  return TrifocalTensor(rig, pivot);
}

Eigen::MatrixXcd build_point_matrix(const CameraRig& rig,
                                    const std::vector<ProjectivePoint>& points) {
  const int m = rig.size();
  if (static_cast<int>(points.size()) != m)
    throw LengthMismatch("point tuple length does not match the rig");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3 * m, m + 4);
  for (int i = 0; i < m; ++i) {
    if (points[i].size() != 3)
      throw Error("point tuple components must lie in P^2");
    a.block<3, 4>(3 * i, 0) = rig.camera(i).matrix().cast<Complex>();
    a.block<3, 1>(3 * i, 4 + i) = points[i].coords();
  }
  return a;
}

bool point_multiview_membership(const CameraRig& rig,
                                const std::vector<ProjectivePoint>& points,
                                double rank_tol) {
  const Eigen::MatrixXcd a = build_point_matrix(rig, points);
  return numerical_rank(a, rank_tol).numerical_rank < rig.size() + 4;
}

}  // namespace lmv
