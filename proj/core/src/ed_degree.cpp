#include "lmv/ed_degree.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>

#include "lmv/multiview.hpp"
#include "lmv/parallel.hpp"
#include "lmv/rng.hpp"

namespace lmv {

MultiPolySystem::MultiPolySystem(std::vector<MultiPoly> polys)
    : num_vars_(polys.empty() ? 0 : polys.front().num_vars()),
      polys_(std::move(polys)) {
  if (polys_.empty()) throw Error("empty polynomial system");
  if (static_cast<int>(polys_.size()) != num_vars_)
    throw Error("system must be square");
  partials_.resize(polys_.size());
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    if (polys_[i].num_vars() != num_vars_)
      throw Error("variable count mismatch in system");
    for (int v = 0; v < num_vars_; ++v)
      partials_[i].push_back(polys_[i].differentiate(v));
  }
}

std::vector<int> MultiPolySystem::degrees() const {
  std::vector<int> d;
  d.reserve(polys_.size());
  for (const auto& p : polys_) d.push_back(p.total_degree());
  return d;
}

void MultiPolySystem::evaluate(const Eigen::VectorXcd& x,
                               Eigen::VectorXcd& f) const {
  f.resize(polys_.size());
  for (std::size_t i = 0; i < polys_.size(); ++i) f[i] = polys_[i].evaluate(x);
}

void MultiPolySystem::jacobian(const Eigen::VectorXcd& x,
                               Eigen::MatrixXcd& j) const {
  j.resize(polys_.size(), num_vars_);
  for (std::size_t i = 0; i < polys_.size(); ++i)
    for (int v = 0; v < num_vars_; ++v) j(i, v) = partials_[i][v].evaluate(x);
}

std::vector<MultiPoly> build_ed_system(const CameraRig& rig,
                                       const std::vector<Eigen::Vector3d>& u) {
  const int m = rig.size();
  if (m < 3) throw Error("the critical system needs at least 3 cameras");
  if (static_cast<int>(u.size()) != m)
    throw LengthMismatch("data tuple length does not match the rig");
  const int n = m + 4;  // v11, v12, v21, v22, t_1..t_m

  std::vector<MultiPoly> vars;
  vars.reserve(n);
  for (int i = 0; i < n; ++i) vars.push_back(MultiPoly::variable(n, i));

  MultiPoly f = MultiPoly::constant(n, 0.0);
  for (int i = 0; i < m; ++i) {
    const Matrix34d& c = rig.camera(i).matrix();
    // Projected chart rows: a = C (1,0,v11,v12), b = C (0,1,v21,v22).
    std::vector<MultiPoly> a, b;
    for (int row = 0; row < 3; ++row) {
      a.push_back(MultiPoly::constant(n, c(row, 0)) +
                  vars[0] * Complex(c(row, 2)) + vars[1] * Complex(c(row, 3)));
      b.push_back(MultiPoly::constant(n, c(row, 1)) +
                  vars[2] * Complex(c(row, 2)) + vars[3] * Complex(c(row, 3)));
    }
    const MultiPoly kappa[3] = {a[1] * b[2] - a[2] * b[1],
                                a[2] * b[0] - a[0] * b[2],
                                a[0] * b[1] - a[1] * b[0]};
    for (int row = 0; row < 3; ++row) {
      const MultiPoly diff =
          MultiPoly::constant(n, u[i][row]) - vars[4 + i] * kappa[row];
      f += diff * diff;
    }
  }

  std::vector<MultiPoly> gradient;
  gradient.reserve(n);
  for (int v = 0; v < n; ++v) gradient.push_back(f.differentiate(v).pruned());
  return gradient;
}

EdCriticalSystem::EdCriticalSystem(const CameraRig& rig,
                                   const std::vector<Eigen::Vector3d>& u)
    : m_(rig.size()), u_(u) {
  if (m_ < 3) throw Error("the critical system needs at least 3 cameras");
  if (static_cast<int>(u.size()) != m_)
    throw LengthMismatch("data tuple length does not match the rig");
  cams_.reserve(m_);
  for (int i = 0; i < m_; ++i) cams_.push_back(rig.camera(i).matrix());
}

void EdCriticalSystem::kappas(const Eigen::VectorXcd& x,
                              std::vector<Eigen::Vector3cd>& kappa) const {
  kappa.resize(m_);
  const Eigen::Vector4cd a(1.0, 0.0, x[0], x[1]);
  const Eigen::Vector4cd b(0.0, 1.0, x[2], x[3]);
  for (int i = 0; i < m_; ++i) {
    const Eigen::Vector3cd pa = cams_[i].cast<Complex>() * a;
    const Eigen::Vector3cd pb = cams_[i].cast<Complex>() * b;
    kappa[i] = bilinear_cross(pa, pb);
  }
}

namespace {

/// Plain bilinear product (no conjugation, unlike Eigen's dot()).
inline Complex bil(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace

void EdCriticalSystem::evaluate(const Eigen::VectorXcd& x,
                                Eigen::VectorXcd& f) const {
  const int n = m_ + 4;
  f.setZero(n);
  const Eigen::Vector4cd a(1.0, 0.0, x[0], x[1]);
  const Eigen::Vector4cd b(0.0, 1.0, x[2], x[3]);
  for (int i = 0; i < m_; ++i) {
    const Eigen::Vector3cd pa = cams_[i].cast<Complex>() * a;
    const Eigen::Vector3cd pb = cams_[i].cast<Complex>() * b;
    const Eigen::Vector3cd p2 = cams_[i].col(2).cast<Complex>();
    const Eigen::Vector3cd p3 = cams_[i].col(3).cast<Complex>();
    const Eigen::Vector3cd kappa = bilinear_cross(pa, pb);
    const Eigen::Vector3cd dkappa[4] = {
        bilinear_cross(p2, pb), bilinear_cross(p3, pb),
        bilinear_cross(pa, p2), bilinear_cross(pa, p3)};
    const Eigen::Vector3cd ui = u_[i].cast<Complex>();
    const Complex t = x[4 + i];
    const Eigen::Vector3cd misfit = t * kappa - ui;  // t kappa - u
    // d f / d v_alpha accumulates 2 t (t kappa - u) . dkappa_alpha
    for (int alpha = 0; alpha < 4; ++alpha)
      f[alpha] += 2.0 * t * bil(misfit, dkappa[alpha]);
    // d f / d t_i = 2 kappa . (t kappa - u)
    f[4 + i] = 2.0 * bil(kappa, misfit);
  }
}

void EdCriticalSystem::jacobian(const Eigen::VectorXcd& x,
                                Eigen::MatrixXcd& j) const {
  const int n = m_ + 4;
  j.setZero(n, n);
  const Eigen::Vector4cd a(1.0, 0.0, x[0], x[1]);
  const Eigen::Vector4cd b(0.0, 1.0, x[2], x[3]);
  for (int i = 0; i < m_; ++i) {
    const Eigen::Vector3cd pa = cams_[i].cast<Complex>() * a;
    const Eigen::Vector3cd pb = cams_[i].cast<Complex>() * b;
    const Eigen::Vector3cd p2 = cams_[i].col(2).cast<Complex>();
    const Eigen::Vector3cd p3 = cams_[i].col(3).cast<Complex>();
    const Eigen::Vector3cd kappa = bilinear_cross(pa, pb);
    const Eigen::Vector3cd dkappa[4] = {
        bilinear_cross(p2, pb), bilinear_cross(p3, pb),
        bilinear_cross(pa, p2), bilinear_cross(pa, p3)};
    // Mixed chart second derivatives: only (v11,v22) and (v12,v21) survive.
    const Eigen::Vector3cd p23 = bilinear_cross(p2, p3);
    Eigen::Vector3cd ddkappa[4][4];
    for (auto& row : ddkappa)
      for (auto& e : row) e.setZero();
    ddkappa[0][3] = p23;   // v11, v22
    ddkappa[3][0] = p23;
    ddkappa[1][2] = -p23;  // v12, v21
    ddkappa[2][1] = -p23;
    const Eigen::Vector3cd ui = u_[i].cast<Complex>();
    const Complex t = x[4 + i];
    const Eigen::Vector3cd misfit = t * kappa - ui;

    for (int alpha = 0; alpha < 4; ++alpha) {
      for (int beta = 0; beta < 4; ++beta) {
        j(alpha, beta) += 2.0 * t *
                          (t * bil(dkappa[beta], dkappa[alpha]) +
                           bil(misfit, ddkappa[alpha][beta]));
      }
      const Complex mixed =
          2.0 * bil(misfit, dkappa[alpha]) + 2.0 * t * bil(kappa, dkappa[alpha]);
      j(alpha, 4 + i) = mixed;
      j(4 + i, alpha) = mixed;
    }
    j(4 + i, 4 + i) = 2.0 * bil(kappa, kappa);
  }
}

namespace {

/// Per-equation rescaling wrapper; scaling does not move the roots but keeps
/// the homotopy between the unit-size start system and the target balanced.
class ScaledSystem : public PolynomialSystem {
 public:
  ScaledSystem(const PolynomialSystem& base, Eigen::VectorXd scales)
      : base_(base), inv_scales_(scales.cwiseInverse()) {}

  int num_vars() const override { return base_.num_vars(); }
  std::vector<int> degrees() const override { return base_.degrees(); }
  void evaluate(const Eigen::VectorXcd& x, Eigen::VectorXcd& f) const override {
    base_.evaluate(x, f);
    f.array() *= inv_scales_.array().cast<Complex>();
  }
  void jacobian(const Eigen::VectorXcd& x, Eigen::MatrixXcd& j) const override {
    base_.jacobian(x, j);
    j.array().colwise() *= inv_scales_.array().cast<Complex>();
  }

 private:
  const PolynomialSystem& base_;
  Eigen::VectorXd inv_scales_;
};

struct Homotopy {
  const PolynomialSystem* target;
  std::vector<int> degrees;
  Eigen::VectorXcd start_constants;  // r_i
  Complex gamma;

  int n() const { return static_cast<int>(degrees.size()); }

  void start_values(Eigen::VectorXcd& g, const Eigen::VectorXcd& x) const {
    g.resize(n());
    for (int i = 0; i < n(); ++i) {
      Complex p(1.0);
      for (int k = 0; k < degrees[i]; ++k) p *= x[i];
      g[i] = p - start_constants[i];
    }
  }

  /// H(x,s) and its Jacobian.
  void evaluate(const Eigen::VectorXcd& x, double s, Eigen::VectorXcd& h) const {
    Eigen::VectorXcd f, g;
    target->evaluate(x, f);
    start_values(g, x);
    h = (1.0 - s) * gamma * g + s * f;
  }

  void jacobian(const Eigen::VectorXcd& x, double s, Eigen::MatrixXcd& jh) const {
    target->jacobian(x, jh);
    jh *= s;
    const Complex w = (1.0 - s) * gamma;
    for (int i = 0; i < n(); ++i) {
      Complex p(1.0);
      for (int k = 0; k < degrees[i] - 1; ++k) p *= x[i];
      jh(i, i) += w * static_cast<double>(degrees[i]) * p;
    }
  }

  /// dH/ds = F - gamma G.
  void s_derivative(const Eigen::VectorXcd& x, Eigen::VectorXcd& hs) const {
    Eigen::VectorXcd f, g;
    target->evaluate(x, f);
    start_values(g, x);
    hs = f - gamma * g;
  }
};

PathResult track_one(const Homotopy& hom, std::uint64_t start_index,
                     const TrackConfig& config) {
  const int n = hom.n();
  PathResult result;
  result.start_index = start_index;

  // Decode the start solution from the mixed-radix path index.
  Eigen::VectorXcd x(n);
  {
    std::uint64_t rem = start_index;
    for (int i = 0; i < n; ++i) {
      const int d = hom.degrees[i];
      const int digit = static_cast<int>(rem % d);
      rem /= d;
      const Complex r = hom.start_constants[i];
      const double mod = std::pow(std::abs(r), 1.0 / d);
      const double arg = std::arg(r) / d + 2.0 * M_PI * digit / d;
      x[i] = Complex(mod * std::cos(arg), mod * std::sin(arg));
    }
  }

  double s = 0.0;
  double h = config.step_init;
  int successes = 0;
  Eigen::VectorXcd hs, hv, k1, k2, k3, k4;
  Eigen::MatrixXcd jh;

  auto davidenko = [&](const Eigen::VectorXcd& xi, double si,
                       Eigen::VectorXcd& dx) -> bool {
    hom.jacobian(xi, si, jh);
    hom.s_derivative(xi, hs);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jh);
    dx = lu.solve(-hs);
    return dx.allFinite();
  };

  while (s < 1.0) {
    if (result.steps >= config.max_steps_per_path) {
      result.status = PathStatus::kTruncated;
      result.endpoint = x;
      return result;
    }
    ++result.steps;
    const double step = std::min(h, 1.0 - s);

    // RK4 predictor on the Davidenko ODE.
    bool ok = davidenko(x, s, k1);
    ok = ok && davidenko(x + 0.5 * step * k1, s + 0.5 * step, k2);
    ok = ok && davidenko(x + 0.5 * step * k2, s + 0.5 * step, k3);
    ok = ok && davidenko(x + step * k3, s + step, k4);
    Eigen::VectorXcd x_pred;
    if (ok)
      x_pred = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    // Newton corrector at s + step.
    bool corrected = false;
    if (ok && x_pred.allFinite()) {
      Eigen::VectorXcd xc = x_pred;
      const double target_s = s + step;
      double last_norm = std::numeric_limits<double>::infinity();
      for (int it = 0; it < config.corrector_iterations; ++it) {
        hom.evaluate(xc, target_s, hv);
        hom.jacobian(xc, target_s, jh);
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jh);
        const Eigen::VectorXcd delta = lu.solve(-hv);
        if (!delta.allFinite()) break;
        xc += delta;
        const double dn = delta.norm();
        if (dn < config.corrector_tol * (1.0 + xc.norm())) {
          corrected = true;
          break;
        }
        if (dn > 2.0 * last_norm) break;  // corrector running away
        last_norm = dn;
      }
      if (corrected) {
        x = xc;
        s = target_s;
        if (++successes >= 4) {
          h = std::min(h * 2.0, config.step_max);
          successes = 0;
        }
      }
    }
    if (!corrected) {
      successes = 0;
      h *= 0.5;
      if (h < config.step_min) {
        result.status = PathStatus::kTruncated;
        result.endpoint = x;
        return result;
      }
    }
    if (x.norm() > config.divergence_threshold) {
      result.status = PathStatus::kDiverged;
      result.endpoint = x;
      return result;
    }
  }

  // Endpoint refinement with plain Newton on the target system.
  Eigen::VectorXcd f;
  Eigen::MatrixXcd jf;
  double prev_step = std::numeric_limits<double>::infinity();
  double contraction = 1.0;
  bool contracted_twice = false;
  int small_steps = 0;
  for (int it = 0; it < 20; ++it) {
    hom.target->evaluate(x, f);
    hom.target->jacobian(x, jf);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jf);
    const Eigen::VectorXcd delta = lu.solve(-f);
    if (!delta.allFinite()) break;
    const double dn = delta.norm();
    if (std::isfinite(prev_step) && prev_step > 0.0) {
      contraction = dn / prev_step;
      if (contraction <= 0.1 && it >= 1) contracted_twice = true;
    }
    x += delta;
    prev_step = dn;
    if (dn < 1e-13 * (1.0 + x.norm())) {
      if (++small_steps >= 2) break;
    } else {
      small_steps = 0;
    }
  }
  hom.target->evaluate(x, f);
  result.endpoint = x;
  result.residual = f.lpNorm<Eigen::Infinity>();
  result.newton_contraction = contraction;
  const bool converged =
      prev_step < 1e-11 * (1.0 + x.norm()) && result.residual < config.end_tol;
  if (!x.allFinite() || x.norm() > config.divergence_threshold) {
    result.status = PathStatus::kDiverged;
  } else if (converged && (contracted_twice || prev_step == 0.0)) {
    result.status = PathStatus::kRegular;
  } else {
    result.status = PathStatus::kSingular;
  }
  return result;
}

Homotopy make_homotopy(const PolynomialSystem& system,
                       const TrackConfig& config) {
  Homotopy hom;
  hom.target = &system;
  hom.degrees = system.degrees();
  for (int d : hom.degrees)
    if (d < 1) throw Error("system equation of degree zero");
  Rng rng(splitmix64(config.seed));
  // gamma on the unit circle, away from +-1.
  double arg = 0.0;
  do {
    arg = rng.uniform(0.0, 2.0 * M_PI);
  } while (std::abs(std::sin(arg)) < 0.3);
  hom.gamma = Complex(std::cos(arg), std::sin(arg));
  hom.start_constants.resize(hom.n());
  for (int i = 0; i < hom.n(); ++i)
    hom.start_constants[i] = rng.unit_complex() * rng.uniform(0.6, 1.4);
  return hom;
}

}  // namespace

std::vector<PathResult> solve_total_degree(const PolynomialSystem& system,
                                           const TrackConfig& config) {
  const Homotopy hom = make_homotopy(system, config);
  std::uint64_t total = 1;
  for (int d : hom.degrees) total *= static_cast<std::uint64_t>(d);

  std::vector<PathResult> results(total);
  parallel_for(total, config.threads, [&](std::size_t k) {
    results[k] = track_one(hom, k, config);
  });
  return results;
}

std::vector<PathResult> solve_total_degree(const std::vector<MultiPoly>& system,
                                           const TrackConfig& config) {
  std::vector<MultiPoly> scaled;
  scaled.reserve(system.size());
  for (const auto& p : system) {
    const double s = p.max_abs_coefficient();
    scaled.push_back(p * Complex(s > 0.0 ? 1.0 / s : 1.0));
  }
  MultiPolySystem wrapped(std::move(scaled));
  return solve_total_degree(wrapped, config);
}

namespace {

Eigen::VectorXcd projective_normal_form(const Eigen::VectorXcd& x) {
  int imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  return x / x[imax];
}

}  // namespace

std::vector<int> deduplicate_endpoints(const std::vector<PathResult>& paths,
                                       double dedup_tol) {
  std::vector<int> representatives;
  std::vector<Eigen::VectorXcd> forms;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].status != PathStatus::kRegular) continue;
    const Eigen::VectorXcd z = projective_normal_form(paths[i].endpoint);
    bool duplicate = false;
    for (const auto& seen : forms) {
      if ((z - seen).lpNorm<Eigen::Infinity>() < dedup_tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      forms.push_back(z);
      representatives.push_back(static_cast<int>(i));
    }
  }
  return representatives;
}

EDCount count_ed_critical(const CameraRig& rig,
                          const std::vector<Eigen::Vector3d>& u,
                          const EdConfig& config) {
  const int m = rig.size();
  if (m != 3 && m != 4)
    throw Error("the enumeration is sized for m in {3, 4}");
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<MultiPoly> expanded = build_ed_system(rig, u);
  EdCriticalSystem fast(rig, u);

  // The closed-form evaluator must match the expanded build.
  {
    Rng rng(splitmix64(config.track.seed ^ 0xabcdef));
    Eigen::VectorXcd probe(m + 4);
    for (int i = 0; i < m + 4; ++i)
      probe[i] = Complex(rng.gaussian(), rng.gaussian());
    Eigen::VectorXcd f_fast;
    fast.evaluate(probe, f_fast);
    for (int i = 0; i < m + 4; ++i) {
      const Complex f_exp = expanded[i].evaluate(probe);
      if (std::abs(f_exp - f_fast[i]) >
          1e-8 * (1.0 + std::abs(f_exp) + std::abs(f_fast[i])))
        throw Error("critical-system evaluators disagree");
    }
  }

  Eigen::VectorXd scales(m + 4);
  for (int i = 0; i < m + 4; ++i)
    scales[i] = std::max(expanded[i].max_abs_coefficient(), 1e-12);
  ScaledSystem scaled(fast, scales);

  const std::vector<PathResult> paths = solve_total_degree(scaled, config.track);

  EDCount count;
  count.m = m;
  count.seed = config.track.seed;
  count.total_paths = paths.size();
  for (const auto& p : paths) {
    switch (p.status) {
      case PathStatus::kRegular: ++count.regular_paths; break;
      case PathStatus::kSingular: ++count.singular_paths; break;
      case PathStatus::kDiverged: ++count.diverged_paths; break;
      case PathStatus::kTruncated: ++count.truncated_paths; break;
    }
  }

  const std::vector<int> unique = deduplicate_endpoints(paths, config.dedup_tol);
  count.regular_solutions = static_cast<int>(unique.size());

  // t_i != 0 filter, and for m = 3 the one potential rank-1 (singular) image.
  std::vector<Eigen::VectorXcd> valid;
  for (int idx : unique) {
    const Eigen::VectorXcd& x = paths[idx].endpoint;
    bool ok = true;
    const double xn = x.norm();
    for (int i = 0; i < m; ++i)
      ok &= std::abs(x[4 + i]) > config.t_tol * xn;
    if (ok && m == 3) {
      std::vector<Eigen::Vector3cd> kappa;
      fast.kappas(x, kappa);
      Eigen::MatrixXcd mm(4, m);
      for (int i = 0; i < m; ++i)
        mm.col(i) = rig.camera(i).matrix().transpose().cast<Complex>() *
                    (x[4 + i] * kappa[i]);
      if (numerical_rank(mm).numerical_rank <= 1) ok = false;
    }
    if (ok) valid.push_back(x);
  }
  count.valid_solutions = static_cast<int>(valid.size());
  count.valid_points = valid;

  // Contraction check: from a nearby perturbed point, two consecutive Newton
  // steps must each shrink tenfold and land back on the endpoint.
  Rng cert_rng(splitmix64(config.track.seed ^ 0x5ca1ab1e));
  Eigen::VectorXcd f;
  Eigen::MatrixXcd j;
  for (const auto& x : valid) {
    Eigen::VectorXcd z = x;
    const double scale = 1e-6 * (1.0 + x.norm());
    for (int i = 0; i < z.size(); ++i)
      z[i] += scale * Complex(cert_rng.gaussian(), cert_rng.gaussian());
    double steps[3] = {0, 0, 0};
    for (int it = 0; it < 3; ++it) {
      scaled.evaluate(z, f);
      scaled.jacobian(z, j);
      const Eigen::VectorXcd delta =
          Eigen::PartialPivLU<Eigen::MatrixXcd>(j).solve(-f);
      if (!delta.allFinite()) { steps[0] = -1; break; }
      z += delta;
      steps[it] = delta.norm();
    }
    const bool contracting = steps[0] > 0.0 &&
                             steps[1] <= 0.1 * steps[0] &&
                             steps[2] <= 0.1 * std::max(steps[1], 1e-300);
    const bool same_root =
        (projective_normal_form(z) - projective_normal_form(x))
            .lpNorm<Eigen::Infinity>() < 10.0 * config.dedup_tol;
    if (contracting && same_root) ++count.certified_lower_bound;
  }

  count.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return count;
}

}  // namespace lmv
