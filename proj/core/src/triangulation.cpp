#include "lmv/triangulation.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "lmv/parallel.hpp"
#include "lmv/rng.hpp"

namespace lmv {

namespace {

struct CameraCache {
  Matrix34d c;
  Eigen::Vector3d col2, col3;  // derivative directions of the chart rows
};

/// Residual blocks and Jacobian of the chart objective. For each camera the
/// residual is rho_i = u_i - s_i kappa_i with s_i = (kappa_i . u_i) /
/// (kappa_i . kappa_i), so that |rho_i| equals the angular distance.
struct ChartProblem {
  std::vector<CameraCache> cams;
  std::vector<Eigen::Vector3d> u;  // unit image lines

  explicit ChartProblem(const CameraRig& rig,
                        const std::vector<Eigen::Vector3d>& image_lines) {
    cams.reserve(rig.size());
    for (int i = 0; i < rig.size(); ++i) {
      const Matrix34d& c = rig.camera(i).matrix();
      cams.push_back({c, c.col(2), c.col(3)});
    }
    u = image_lines;
  }

  int residual_size() const { return 3 * static_cast<int>(cams.size()); }

  /// Returns false when some kappa degenerates (the chart line crosses a
  /// camera center).
  bool evaluate(const Eigen::Vector4d& x, Eigen::VectorXd* residuals,
                Eigen::MatrixXd* jacobian) const {
    const Eigen::Vector4d a(1.0, 0.0, x[0], x[1]);
    const Eigen::Vector4d b(0.0, 1.0, x[2], x[3]);
    for (std::size_t i = 0; i < cams.size(); ++i) {
      const auto& cam = cams[i];
      const Eigen::Vector3d pa = cam.c * a;
      const Eigen::Vector3d pb = cam.c * b;
      const Eigen::Vector3d kappa = pa.cross(pb);
      const double kk = kappa.squaredNorm();
      if (kk < 1e-24 * pa.squaredNorm() * pb.squaredNorm() || kk == 0.0)
        return false;
      const double ku = kappa.dot(u[i]);
      const double s = ku / kk;
      if (residuals) residuals->segment<3>(3 * i) = u[i] - s * kappa;
      if (jacobian) {
        Eigen::Matrix<double, 3, 4> dkappa;
        dkappa.col(0) = cam.col2.cross(pb);
        dkappa.col(1) = cam.col3.cross(pb);
        dkappa.col(2) = pa.cross(cam.col2);
        dkappa.col(3) = pa.cross(cam.col3);
        const Eigen::RowVector4d dku = u[i].transpose() * dkappa;
        const Eigen::RowVector4d dkk = 2.0 * kappa.transpose() * dkappa;
        const Eigen::RowVector4d ds = (dku * kk - ku * dkk) / (kk * kk);
        jacobian->block<3, 4>(3 * i, 0) = -kappa * ds - s * dkappa;
      }
    }
    return true;
  }
};

struct LmOutcome {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  double objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
};

LmOutcome run_lm(const ChartProblem& problem, const Eigen::Vector4d& x0,
                 const TriangulationConfig& config) {
  LmOutcome out;
  Eigen::Vector4d x = x0;
  Eigen::VectorXd r(problem.residual_size());
  Eigen::MatrixXd j(problem.residual_size(), 4);
  if (!problem.evaluate(x, &r, &j)) return out;
  out.feasible = true;
  double f = r.squaredNorm();
  double lambda = 1e-3;

  for (int it = 0; it < config.max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::Vector4d gradient = 2.0 * j.transpose() * r;
    if (gradient.norm() < config.grad_tol || f < 1e-30) {
      out.converged = true;
      break;
    }
    const Eigen::Matrix4d jtj = j.transpose() * j;
    bool stepped = false;
    for (int tries = 0; tries < 24; ++tries) {
      Eigen::Matrix4d damped = jtj;
      for (int d = 0; d < 4; ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      const Eigen::Vector4d delta =
          damped.ldlt().solve(Eigen::Vector4d(-j.transpose() * r));
      const Eigen::Vector4d x_new = x + delta;
      Eigen::VectorXd r_new(problem.residual_size());
      if (problem.evaluate(x_new, &r_new, nullptr)) {
        const double f_new = r_new.squaredNorm();
        if (f_new < f) {
          x = x_new;
          f = f_new;
          lambda = std::max(lambda / 3.0, 1e-14);
          stepped = true;
          break;
        }
      }
      lambda *= 8.0;
      if (lambda > 1e14) break;
    }
    if (!stepped) {
      // The damped step cannot improve; treat the current iterate as final
      // and let the gradient test decide.
      const Eigen::Vector4d g = 2.0 * j.transpose() * r;
      out.converged = g.norm() < config.grad_tol || f < 1e-30;
      break;
    }
    if (!problem.evaluate(x, &r, &j)) break;
  }
  out.x = x;
  out.objective = f;
  return out;
}

std::vector<Eigen::Vector3d> real_unit_tuple(const LineTuple& u) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(u.size());
  for (int i = 0; i < u.size(); ++i) {
    if (u[i].size() != 3) throw Error("image lines live in P^2");
    if (!u[i].is_real(1e-9))
      throw DegenerateInput("triangulation expects real image lines");
    out.push_back(u[i].real_coords(1e-9).normalized());
  }
  return out;
}

/// Kernel 2-plane of M(u)^T: the two right singular vectors with smallest
/// singular values. Exact at zero noise, a stable initializer otherwise.
Matrix42cd witness_basis(const CameraRig& rig, const LineTuple& u) {
  const Eigen::MatrixXcd m = build_M(rig, u);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.transpose(), Eigen::ComputeFullV);
  Matrix42cd basis;
  basis.col(0) = svd.matrixV().col(2);
  basis.col(1) = svd.matrixV().col(3);
  return basis;
}

Eigen::Matrix4d random_rotation4(Rng& rng) {
  const Eigen::Matrix4d g = rng.gaussian_matrix(4, 4);
  const Eigen::HouseholderQR<Eigen::Matrix4d> qr(g);
  Eigen::Matrix4d q = qr.householderQ();
  const Eigen::Matrix4d r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 4; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

}  // namespace

double line_objective(const CameraRig& rig,
                      const std::vector<Eigen::Vector3d>& u,
                      const Eigen::Vector4d& chart_vars) {
  ChartProblem problem(rig, u);
  Eigen::VectorXd r(problem.residual_size());
  if (!problem.evaluate(chart_vars, &r, nullptr))
    throw DegenerateInput("chart line passes through a camera center");
  return r.squaredNorm();
}

Eigen::Vector4d line_objective_gradient(const CameraRig& rig,
                                        const std::vector<Eigen::Vector3d>& u,
                                        const Eigen::Vector4d& chart_vars) {
  ChartProblem problem(rig, u);
  Eigen::VectorXd r(problem.residual_size());
  Eigen::MatrixXd j(problem.residual_size(), 4);
  if (!problem.evaluate(chart_vars, &r, &j))
    throw DegenerateInput("chart line passes through a camera center");
  return 2.0 * j.transpose() * r;
}

TriangulationResult triangulate_line(const CameraRig& rig, const LineTuple& u,
                                     const TriangulationConfig& config) {
  if (u.size() != rig.size())
    throw LengthMismatch("tuple length does not match the rig");
  const std::vector<Eigen::Vector3d> image_lines = real_unit_tuple(u);

  // Witness initializer in world coordinates.
  const Matrix42cd witness = witness_basis(rig, u);
  Eigen::Matrix<double, 4, 2> w0;
  {
    // The kernel basis of a real system may carry a unit phase.
    Eigen::Vector4cd c0 = witness.col(0), c1 = witness.col(1);
    int imax = 0;
    c0.cwiseAbs().maxCoeff(&imax);
    c0 *= std::conj(c0[imax]) / std::abs(c0[imax]);
    c1.cwiseAbs().maxCoeff(&imax);
    c1 *= std::conj(c1[imax]) / std::abs(c1[imax]);
    w0.col(0) = c0.real().normalized();
    w0.col(1) = c1.real().normalized();
  }

  Rng rotation_rng(config.rotation_seed);
  TriangulationResult best;
  best.objective = std::numeric_limits<double>::infinity();
  bool have_result = false;

  for (int attempt = 0; attempt <= config.max_restarts; ++attempt) {
    const Eigen::Matrix4d q = attempt == 0 ? Eigen::Matrix4d::Identity()
                                           : random_rotation4(rotation_rng);
    // World points p map to q p; cameras compose with q^T so images are
    // unchanged and the chart is taken in rotated coordinates.
    std::vector<Camera> rotated;
    rotated.reserve(rig.size());
    for (int i = 0; i < rig.size(); ++i)
      rotated.emplace_back(Matrix34d(rig.camera(i).matrix() * q.transpose()));
    const CameraRig rotated_rig(std::move(rotated));

    const Eigen::Matrix<double, 4, 2> basis = q * w0;
    const Eigen::Matrix<double, 6, 1> p =
        pluecker_of_pair(Eigen::Vector4d(basis.col(0)),
                         Eigen::Vector4d(basis.col(1)));
    const double pn = p.norm();
    if (!(pn > 0.0) || std::abs(p[0]) / pn < config.chart_threshold) {
      if (attempt == config.max_restarts) break;
      continue;  // outside this chart, rotate again
    }
    Eigen::Vector4d x0;
    x0 << -p[3] / p[0], -p[4] / p[0], p[1] / p[0], p[2] / p[0];

    ChartProblem problem(rotated_rig, image_lines);
    LmOutcome lm = run_lm(problem, x0, config);
    if (!lm.feasible) {
      // Initializer sits on a camera center; jiggle once before rotating.
      Rng jiggle(sub_seed(config.rotation_seed, 97 + attempt));
      lm = run_lm(problem, x0 + 1e-8 * jiggle.gaussian_vector(4), config);
      if (!lm.feasible) continue;
    }

    if (lm.objective < best.objective || !have_result) {
      const PlueckerLine rotated_line =
          chart(ChartPoint(Eigen::Matrix2d((Eigen::Matrix2d() << lm.x[0],
                                            lm.x[1], lm.x[2], lm.x[3])
                                               .finished())));
      const Matrix42cd rb = rotated_line.basis();
      best.line = PlueckerLine::from_points(
          Eigen::Vector4cd(q.transpose().cast<Complex>() * rb.col(0)),
          Eigen::Vector4cd(q.transpose().cast<Complex>() * rb.col(1)));
      best.objective = lm.objective;
      best.iterations = lm.iterations;
      best.converged = lm.converged;
      best.restarts_used = attempt;
      have_result = true;
    }
    if (best.converged) break;
  }

  if (!have_result)
    throw DegenerateInput("no chart admitted a feasible solve");
  return best;
}

namespace {

struct PointProblem {
  const CameraRig* rig;
  std::vector<Eigen::Vector2d> q;

  bool evaluate(const Eigen::Vector3d& p, Eigen::VectorXd* residuals,
                Eigen::MatrixXd* jacobian) const {
    const Eigen::Vector4d x(1.0, p[0], p[1], p[2]);
    for (int i = 0; i < rig->size(); ++i) {
      const Matrix34d& c = rig->camera(i).matrix();
      const Eigen::Vector3d w = c * x;
      if (std::abs(w[0]) < 1e-12 * w.norm()) return false;
      if (residuals)
        residuals->segment<2>(2 * i) =
            Eigen::Vector2d(w[1] / w[0] - q[i][0], w[2] / w[0] - q[i][1]);
      if (jacobian) {
        for (int k = 0; k < 3; ++k) {
          const Eigen::Vector3d dw = c.col(k + 1);
          (*jacobian)(2 * i, k) = (dw[1] * w[0] - w[1] * dw[0]) / (w[0] * w[0]);
          (*jacobian)(2 * i + 1, k) =
              (dw[2] * w[0] - w[2] * dw[0]) / (w[0] * w[0]);
        }
      }
    }
    return true;
  }
};

}  // namespace

PointTriangulationResult triangulate_point(
    const CameraRig& rig, const std::vector<Eigen::Vector2d>& image_points,
    const TriangulationConfig& config) {
  const int m = rig.size();
  if (static_cast<int>(image_points.size()) != m)
    throw LengthMismatch("point tuple length does not match the rig");

  // Linear initializer: x cross C X = 0 gives two rows per camera.
  Eigen::MatrixXd a(2 * m, 4);
  for (int i = 0; i < m; ++i) {
    const Matrix34d& c = rig.camera(i).matrix();
    a.row(2 * i) = c.row(1) - image_points[i][0] * c.row(0);
    a.row(2 * i + 1) = c.row(2) - image_points[i][1] * c.row(0);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d x = svd.matrixV().col(3);
  if (std::abs(x[0]) < 1e-10 * x.norm())
    throw DegenerateInput("linear initializer lies near the chart boundary");
  Eigen::Vector3d p(x[1] / x[0], x[2] / x[0], x[3] / x[0]);

  PointProblem problem{&rig, image_points};
  PointTriangulationResult result;
  Eigen::VectorXd r(2 * m);
  Eigen::MatrixXd j(2 * m, 3);
  if (!problem.evaluate(p, &r, &j))
    throw DegenerateInput("initializer projects onto the image chart boundary");
  double f = r.squaredNorm();
  double lambda = 1e-3;

  for (int it = 0; it < config.max_iterations; ++it) {
    result.iterations = it + 1;
    const Eigen::Vector3d gradient = 2.0 * j.transpose() * r;
    if (gradient.norm() < config.grad_tol || f < 1e-30) {
      result.converged = true;
      break;
    }
    const Eigen::Matrix3d jtj = j.transpose() * j;
    bool stepped = false;
    for (int tries = 0; tries < 24; ++tries) {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      const Eigen::Vector3d delta =
          damped.ldlt().solve(Eigen::Vector3d(-j.transpose() * r));
      Eigen::VectorXd r_new(2 * m);
      if (problem.evaluate(p + delta, &r_new, nullptr) &&
          r_new.squaredNorm() < f) {
        p += delta;
        f = r_new.squaredNorm();
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        break;
      }
      lambda *= 8.0;
      if (lambda > 1e14) break;
    }
    if (!stepped) {
      result.converged = (2.0 * j.transpose() * r).norm() < config.grad_tol ||
                         f < 1e-30;
      break;
    }
    problem.evaluate(p, &r, &j);
  }
  result.point = p;
  result.objective = f;
  return result;
}

std::vector<SensitivityRecord> sensitivity_experiment(
    const CameraRig& rig, SensitivityKind kind, int trials, double eps,
    std::uint64_t seed, const TriangulationConfig& config, int threads) {
  if (trials < 1) throw Error("need at least one trial");
  if (!(eps > 0.0)) throw Error("noise radius must be positive");

  std::vector<SensitivityRecord> records(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(sub_seed(seed, t));
    SensitivityRecord rec;
    rec.trial = static_cast<int>(t);
    rec.kind = kind;
    rec.failed = true;

    try {
      if (kind == SensitivityKind::kLines) {
        Eigen::Matrix2d v;
        v << rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian();
        const PlueckerLine truth = chart(ChartPoint(v));
        const LineTuple exact = forward_map(rig, truth);

        std::vector<ProjectivePoint> noisy;
        std::vector<ProjectivePoint> clean;
        noisy.reserve(rig.size());
        clean.reserve(rig.size());
        for (int i = 0; i < rig.size(); ++i) {
          const Eigen::Vector3d hat = exact[i].real_coords().normalized();
          const Eigen::Vector3d perturbed =
              hat + eps * hat.norm() * rng.unit_sphere(3);
          clean.emplace_back(Eigen::VectorXd(hat));
          noisy.emplace_back(Eigen::VectorXd(perturbed));
        }
        const LineTuple u(noisy);
        const TriangulationResult result = triangulate_line(rig, u, config);

        const double data_error = product_distance(clean, noisy);
        const double recon_error = grassmann_distance(truth, result.line);
        rec.e_value = std::log10(recon_error / data_error);
        rec.objective = result.objective;
        rec.converged = result.converged;
        rec.restarts = result.restarts_used;
        rec.failed = !std::isfinite(rec.e_value);
      } else {
        const Eigen::Vector3d p = rng.gaussian_vector(3);
        const Eigen::Vector4d x(1.0, p[0], p[1], p[2]);
        std::vector<Eigen::Vector2d> q(rig.size());
        bool ok = true;
        for (int i = 0; i < rig.size(); ++i) {
          const Eigen::Vector3d w = rig.camera(i).matrix() * x;
          if (std::abs(w[0]) < 1e-12 * w.norm()) {
            ok = false;
            break;
          }
          const Eigen::Vector2d image(w[1] / w[0], w[2] / w[0]);
          if (!(image.norm() > 0.0)) {
            ok = false;
            break;
          }
          q[i] = image + eps * image.norm() * rng.unit_sphere(2);
        }
        if (ok) {
          const PointTriangulationResult result =
              triangulate_point(rig, q, config);
          rec.e_value =
              std::log10((p - result.point).norm() / (eps * p.norm()));
          rec.objective = result.objective;
          rec.converged = result.converged;
          rec.restarts = 0;
          rec.failed = !std::isfinite(rec.e_value);
        }
      }
    } catch (const Error&) {
      rec.failed = true;
    }
    records[t] = rec;
  });
  return records;
}

}  // namespace lmv
