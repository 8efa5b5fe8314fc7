// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lmv/ed_degree.hpp"
#include "lmv/enumerative.hpp"
#include "lmv/multiview.hpp"
#include "lmv/reference_rigs.hpp"
#include "lmv/rng.hpp"
#include "lmv/triangulation.hpp"

using namespace lmv;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
  std::printf("%s  %2d. %-28s %s [%.1f s]\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

CameraRig random_rig(Rng& rng, int m) {
  std::vector<Camera> cams;
  for (int i = 0; i < m; ++i)
    cams.emplace_back(Matrix34d(rng.gaussian_matrix(3, 4)));
  return CameraRig(std::move(cams));
}

PlueckerLine random_real_line(Rng& rng) {
  return PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                   rng.gaussian_vector(4).cast<Complex>());
}

// 1. Four random lines have exactly 2 complex transversals.
void criterion_schubert_count() {
  Timer timer;
  Rng rng(101);
  int good = 0, discarded = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const TransversalSolution sol =
        transversals_of_four(random_real_line(rng), random_real_line(rng),
                             random_real_line(rng), random_real_line(rng));
    if (sol.status == TransversalStatus::kDegenerate) {
      ++discarded;
      continue;
    }
    if (sol.status == TransversalStatus::kFinite && sol.lines.size() == 2)
      ++good;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d/%d with 2 transversals, %d discarded",
                good, trials, discarded);
  report(1, "schubert-count", good >= 999 && timer.seconds() < 5.0, detail,
         timer.seconds());
}

// 2. Monte-Carlo mean of real transversal counts.
void criterion_expected_real() {
  Timer timer;
  const RealTransversalStats stats =
      expected_real_transversals(1000000, 20240515, 0);
  const double reference = 1.7262312489219035;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "mean %.5f (ref 1.7262 +- 0.01, se %.5f, %llu discarded)",
                stats.mean, stats.std_error,
                static_cast<unsigned long long>(stats.discarded));
  report(2, "expected-real-count",
         std::abs(stats.mean - reference) < 0.01 && timer.seconds() < 120.0,
         detail, timer.seconds());
}

// 3. Intersection counts with generic linear slices on a 5-camera rig.
void criterion_multidegree() {
  Timer timer;
  Rng rng(303);
  const CameraRig rig = random_rig(rng, 5);
  const struct { std::vector<int> d; int expected; } cases[] = {
      {{2, 2, 0, 0, 0}, 1}, {{2, 1, 1, 0, 0}, 1}, {{1, 1, 1, 1, 0}, 2}};
  bool pass = true;
  int resamples = 0;
  for (const auto& c : cases) {
    const MultidegreeOutcome out = multidegree_check(rig, c.d, 100, 777);
    resamples += out.degenerate_resamples;
    for (int count : out.counts) pass &= (count == c.expected);
    pass &= (out.counts.size() == 100);
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "counts 1/1/2 over 3x100 trials, %d resamples", resamples);
  report(3, "multidegree", pass && timer.seconds() < 10.0, detail,
         timer.seconds());
}

// 4. Membership round trip across rig sizes.
void criterion_membership_roundtrip() {
  Timer timer;
  Rng rng(404);
  const int trials = 1000;
  int good = 0;
  double worst_gap = 0.0, worst_dist = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 3 + t % 4;
    const CameraRig rig = random_rig(rng, m);
    PlueckerLine truth = random_real_line(rng);
    LineTuple ell;
    try {
      ell = forward_map(rig, truth);
    } catch (const LineThroughCenter&) {
      truth = random_real_line(rng);
      ell = forward_map(rig, truth);
    }
    const MembershipReport report_ = membership(rig, ell);
    if (!report_.witness_line) continue;
    const double dist = grassmann_distance(truth, *report_.witness_line);
    worst_gap = std::max(worst_gap, report_.diagnostics.rank_gap_ratio);
    worst_dist = std::max(worst_dist, dist);
    if (report_.rank == 2 && report_.diagnostics.rank_gap_ratio < 1e-10 &&
        dist < 1e-8)
      ++good;
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d/%d round trips (worst gap %.1e, worst witness %.1e)", good,
                trials, worst_gap, worst_dist);
  report(4, "membership-roundtrip", good == trials && timer.seconds() < 10.0,
         detail, timer.seconds());
}

// 5. Exceptional locus of the collinear quadruple: eliminant and family test.
void criterion_collinear_exceptional() {
  Timer timer;
  const CameraRig rig = collinear_quad_rig();
  const std::vector<int> group = rig.collinear_groups()[0];
  Rng rng(505);

  int in_locus = 0;
  const int trials = 1000;
  for (int t = 0; t < trials;) {
    LineTuple ell;
    try {
      ell = forward_map(rig, random_real_line(rng));
    } catch (const LineThroughCenter&) {
      continue;
    }
    ++t;
    const bool eliminant_zero =
        std::abs(collinear_quad_constraint(ell.lines)) < 1e-8;
    const bool family = exceptional_locus_test(rig, ell, group).infinite;
    if (eliminant_zero && family) ++in_locus;
  }

  int out_locus = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<ProjectivePoint> comps;
    for (int i = 0; i < rig.size(); ++i) {
      const Eigen::Vector4d h = rng.gaussian() * Eigen::Vector4d(0, 1, 0, 0) +
                                rng.gaussian() * Eigen::Vector4d(0, 0, 1, 0);
      comps.push_back(plane_to_image_line(rig.camera(i), Plane3(h)));
    }
    const LineTuple ell(comps);
    const bool rank_two =
        numerical_rank(build_M(rig, ell)).numerical_rank == 2;
    const bool family = exceptional_locus_test(rig, ell, group).infinite;
    if (rank_two && !family) ++out_locus;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d/%d inside, %d/%d outside",
                in_locus, trials, out_locus, trials);
  report(5, "collinear-exceptional",
         in_locus == trials && out_locus == trials && timer.seconds() < 30.0,
         detail, timer.seconds());
}

// 6. Trifocal residual separates consistent from random triples.
void criterion_trifocal() {
  Timer timer;
  Rng rng(606);
  const int trials = 1000;
  int consistent_ok = 0, random_large = 0;
  for (int t = 0; t < trials; ++t) {
    const CameraRig rig = random_rig(rng, 3);
    const TrifocalTensor tensor(rig, 0);
    LineTuple ell;
    try {
      ell = forward_map(rig, random_real_line(rng));
    } catch (const LineThroughCenter&) {
      --t;
      continue;
    }
    if (tensor.normalized_residual(ell) < 1e-8) ++consistent_ok;
    std::vector<ProjectivePoint> comps;
    for (int i = 0; i < 3; ++i)
      comps.emplace_back(Eigen::VectorXd(rng.gaussian_vector(3)));
    if (tensor.normalized_residual(LineTuple(comps)) > 1e-3) ++random_large;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d/%d consistent, %d/%d random",
                consistent_ok, trials, random_large, trials);
  report(6, "trifocal", consistent_ok == trials && random_large >= 990,
         detail, timer.seconds());
}

// 7. Zero-noise triangulation.
void criterion_triangulation_exact() {
  Timer timer;
  Rng rng(707);
  const int trials = 500;
  int converged = 0, recovered = 0;
  for (int t = 0; t < trials;) {
    const int m = 2 + t % 5;
    const CameraRig rig = random_rig(rng, m);
    Eigen::Matrix2cd v;
    v << Complex(rng.gaussian(), 0), Complex(rng.gaussian(), 0),
        Complex(rng.gaussian(), 0), Complex(rng.gaussian(), 0);
    const PlueckerLine truth = chart(ChartPoint(v));
    LineTuple ell;
    try {
      ell = forward_map(rig, truth);
    } catch (const LineThroughCenter&) {
      continue;
    }
    ++t;
    const TriangulationResult result = triangulate_line(rig, ell);
    if (!result.converged) continue;
    ++converged;
    if (grassmann_distance(truth, result.line) < 1e-8) ++recovered;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "%d/%d converged, %d/%d of those recovered", converged, trials,
                recovered, converged);
  report(7, "triangulation-exact",
         converged >= trials * 99 / 100 && recovered == converged, detail,
         timer.seconds());
}

// 8. Sensitivity protocol: CSVs for every configuration plus health stats.
void criterion_sensitivity() {
  Timer timer;
  std::filesystem::create_directories("acceptance_out");
  bool pass = true;
  std::string summary;
  const double eps = 1e-12;
  for (const int m : {2, 3}) {
    for (const bool paper : {true, false}) {
      Rng rig_rng(808 + m);
      const CameraRig rig =
          paper ? (m == 2 ? fixed_pair_rig() : fixed_triplet_rig())
                : random_rig(rig_rng, m);
      for (const SensitivityKind kind :
           {SensitivityKind::kLines, SensitivityKind::kPoints}) {
        const auto records =
            sensitivity_experiment(rig, kind, 1000, eps, 911 + m);
        const std::string path =
            std::string("acceptance_out/sensitivity_") +
            (kind == SensitivityKind::kLines ? "lines" : "points") + "_m" +
            std::to_string(m) + (paper ? "_paper" : "_gaussian") + ".csv";
        std::ofstream csv(path);
        csv << "trial,kind,e_value,objective,converged,restarts\n";
        int healthy = 0;
        double e_sum = 0.0, e_max = -1e300;
        for (const auto& rec : records) {
          char row[192];
          std::snprintf(row, sizeof(row), "%d,%s,%.17g,%.17g,%d,%d\n",
                        rec.trial,
                        rec.kind == SensitivityKind::kLines ? "lines"
                                                            : "points",
                        rec.e_value, rec.objective, rec.converged ? 1 : 0,
                        rec.restarts);
          csv << row;
          if (!rec.failed && rec.converged && std::isfinite(rec.e_value)) {
            ++healthy;
            e_sum += rec.e_value;
            e_max = std::max(e_max, rec.e_value);
          }
        }
        pass &= healthy >= 950;
        char stat[128];
        std::snprintf(stat, sizeof(stat), " [m=%d %s %s: %d/1000 mean_e %.2f]",
                      m, paper ? "paper" : "gauss",
                      kind == SensitivityKind::kLines ? "lines" : "points",
                      healthy, e_sum / std::max(healthy, 1));
        summary += stat;
      }
    }
  }
  std::printf("      sensitivity details:%s\n", summary.c_str());
  report(8, "sensitivity-protocol", pass, "8 CSVs in acceptance_out/",
         timer.seconds());
}

// 9. Critical-point enumeration, two gamma draws.
void criterion_ed_enumeration() {
  Timer timer;
  Rng rng(909);
  const CameraRig rig = random_rig(rng, 3);
  std::vector<Eigen::Vector3d> u(3);
  for (int i = 0; i < 3; ++i) u[i] = rng.unit_sphere(3);

  EdConfig config;
  config.track.threads = 0;
  config.track.seed = 1111;
  const EDCount first = count_ed_critical(rig, u, config);
  config.track.seed = 2222;
  const EDCount second = count_ed_critical(rig, u, config);

  const bool conservation =
      first.regular_paths + first.singular_paths + first.diverged_paths +
          first.truncated_paths == static_cast<int>(first.total_paths);
  const bool pass = first.total_paths == 78125 &&
                    first.valid_solutions >= 74 &&
                    second.valid_solutions == first.valid_solutions &&
                    first.certified_lower_bound >= 74 &&
                    second.certified_lower_bound >= 74 && conservation &&
                    timer.seconds() < 900.0;
  char detail[192];
  std::snprintf(detail, sizeof(detail),
                "valid %d/%d (runs agree %s), certified %d/%d, paths %llu",
                first.valid_solutions, second.valid_solutions,
                first.valid_solutions == second.valid_solutions ? "yes" : "NO",
                first.certified_lower_bound, second.certified_lower_bound,
                static_cast<unsigned long long>(first.total_paths));
  report(9, "ed-critical-enumeration", pass, detail, timer.seconds());
}

// 10. Numerical property sweep.
void criterion_numerics() {
  Timer timer;
  Rng rng(1010);
  bool pass = true;

  // Gradient of the triangulation objective vs central differences.
  for (int trial = 0; trial < 50; ++trial) {
    const CameraRig rig = random_rig(rng, 3);
    std::vector<Eigen::Vector3d> u;
    for (int i = 0; i < 3; ++i) u.push_back(rng.unit_sphere(3));
    const Eigen::Vector4d x = rng.gaussian_vector(4);
    Eigen::Vector4d g;
    try {
      g = line_objective_gradient(rig, u, x);
    } catch (const DegenerateInput&) {
      continue;
    }
    for (int k = 0; k < 4; ++k) {
      Eigen::Vector4d xp = x, xm = x;
      xp[k] += 1e-6;
      xm[k] -= 1e-6;
      const double fd =
          (line_objective(rig, u, xp) - line_objective(rig, u, xm)) / 2e-6;
      pass &= std::abs(g[k] - fd) <= 1e-6 * (1.0 + std::abs(fd));
    }
  }

  // Gradient polynomials of the distance system vs central differences.
  {
    const CameraRig rig = random_rig(rng, 3);
    std::vector<Eigen::Vector3d> u;
    for (int i = 0; i < 3; ++i) u.push_back(rng.unit_sphere(3));
    const std::vector<MultiPoly> system = build_ed_system(rig, u);
    const EdCriticalSystem fast(rig, u);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXcd x(7);
      for (int i = 0; i < 7; ++i) x[i] = Complex(rng.gaussian(), 0.0);
      Eigen::VectorXcd f;
      fast.evaluate(x, f);
      for (int i = 0; i < 7; ++i) {
        const Complex expanded = system[i].evaluate(x);
        pass &= std::abs(f[i] - expanded) < 1e-8 * (1.0 + std::abs(expanded));
      }
    }
  }

  // Quadric residual, dual involution, metric scale invariance.
  for (int trial = 0; trial < 200; ++trial) {
    const PlueckerLine l = random_real_line(rng);
    pass &= std::abs(l.quadric_residual()) < 1e-10;
    pass &= grassmann_distance(
                dual_line(dual_line(l, DualMode::kHermitian),
                          DualMode::kHermitian), l) < 1e-10;
    const ProjectivePoint a(Eigen::VectorXd(rng.gaussian_vector(3)));
    const ProjectivePoint b(Eigen::VectorXd(rng.gaussian_vector(3)));
    const ProjectivePoint b_scaled(
        Eigen::VectorXcd(b.coords() * Complex(0.0, -7.25)));
    pass &= std::abs(angular_distance(a, b) - angular_distance(a, b_scaled)) <
            1e-12;
  }

  report(10, "numerical-properties", pass && timer.seconds() < 30.0,
         "gradients, quadric, involution, scale invariance",
         timer.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_schubert_count();
  criterion_expected_real();
  criterion_multidegree();
  criterion_membership_roundtrip();
  criterion_collinear_exceptional();
  criterion_trifocal();
  criterion_triangulation_exact();
  criterion_sensitivity();
  criterion_ed_enumeration();
  criterion_numerics();
  std::printf(failures == 0 ? "all criteria passed\n"
                            : "%d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
