#include <Eigen/Dense>

#include "doctest.h"
#include "lmv/reference_rigs.hpp"
#include "lmv/rng.hpp"
#include "lmv/triangulation.hpp"

using namespace lmv;

namespace {

CameraRig random_rig(Rng& rng, int m) {
  std::vector<Camera> cams;
  for (int i = 0; i < m; ++i)
    cams.emplace_back(Matrix34d(rng.gaussian_matrix(3, 4)));
  return CameraRig(std::move(cams));
}

PlueckerLine random_chart_line(Rng& rng) {
  Eigen::Matrix2cd v;
  v << Complex(rng.gaussian(), 0), Complex(rng.gaussian(), 0),
      Complex(rng.gaussian(), 0), Complex(rng.gaussian(), 0);
  return chart(ChartPoint(v));
}

LineTuple perturbed_tuple(const LineTuple& exact, Rng& rng, double eps) {
  std::vector<ProjectivePoint> noisy;
  for (int i = 0; i < exact.size(); ++i) {
    const Eigen::Vector3d hat = exact[i].real_coords().normalized();
    noisy.emplace_back(Eigen::VectorXd(hat + eps * rng.unit_sphere(3)));
  }
  return LineTuple(noisy);
}

}  // namespace

TEST_CASE("zero-noise recovery") {
  Rng rng(81);
  SUBCASE("fixed triplet rig") {
    for (int trial = 0; trial < 25; ++trial) {
      const CameraRig rig = fixed_triplet_rig();
      const PlueckerLine truth = random_chart_line(rng);
      const TriangulationResult result =
          triangulate_line(rig, forward_map(rig, truth));
      CHECK(result.converged);
      CHECK(result.objective < 1e-16);
      CHECK(grassmann_distance(truth, result.line) < 1e-8);
    }
  }
  SUBCASE("random rigs of every size") {
    for (int m = 2; m <= 6; ++m) {
      for (int trial = 0; trial < 10; ++trial) {
        const CameraRig rig = random_rig(rng, m);
        const PlueckerLine truth = random_chart_line(rng);
        LineTuple exact;
        try {
          exact = forward_map(rig, truth);
        } catch (const LineThroughCenter&) {
          continue;
        }
        const TriangulationResult result = triangulate_line(rig, exact);
        CHECK(result.converged);
        CHECK(grassmann_distance(truth, result.line) < 1e-8);
      }
    }
  }
}

TEST_CASE("two cameras always fit exactly") {
  Rng rng(82);
  const CameraRig rig = random_rig(rng, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ProjectivePoint> comps;
    comps.emplace_back(Eigen::VectorXd(rng.gaussian_vector(3)));
    comps.emplace_back(Eigen::VectorXd(rng.gaussian_vector(3)));
    const TriangulationResult result = triangulate_line(rig, LineTuple(comps));
    CHECK(result.objective < 1e-16);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(83);
  int checked = 0;
  while (checked < 100) {
    const CameraRig rig = random_rig(rng, 3);
    std::vector<Eigen::Vector3d> u;
    for (int i = 0; i < 3; ++i) u.push_back(rng.unit_sphere(3));
    const Eigen::Vector4d x = rng.gaussian_vector(4);
    Eigen::Vector4d gradient;
    try {
      gradient = line_objective_gradient(rig, u, x);
    } catch (const DegenerateInput&) {
      continue;
    }
    const double h = 1e-6;
    for (int k = 0; k < 4; ++k) {
      Eigen::Vector4d xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd =
          (line_objective(rig, u, xp) - line_objective(rig, u, xm)) / (2 * h);
      CHECK(gradient[k] ==
            doctest::Approx(fd).epsilon(1e-6).scale(1.0 + std::abs(fd)));
    }
    ++checked;
  }
}

TEST_CASE("small noise stays near the truth") {
  Rng rng(84);
  const CameraRig rig = fixed_triplet_rig();
  for (int trial = 0; trial < 20; ++trial) {
    const PlueckerLine truth = random_chart_line(rng);
    const LineTuple noisy =
        perturbed_tuple(forward_map(rig, truth), rng, 1e-12);
    const TriangulationResult result = triangulate_line(rig, noisy);
    CHECK(result.converged);
    CHECK(result.objective < 1e-20);  // about (noise)^2 * m
    CHECK(grassmann_distance(truth, result.line) < 1e-6);
  }
}

TEST_CASE("objective does not exceed the initializer objective") {
  Rng rng(85);
  for (int trial = 0; trial < 20; ++trial) {
    const CameraRig rig = random_rig(rng, 4);
    PlueckerLine truth = random_chart_line(rng);
    LineTuple exact;
    try {
      exact = forward_map(rig, truth);
    } catch (const LineThroughCenter&) {
      continue;
    }
    const LineTuple noisy = perturbed_tuple(exact, rng, 1e-4);
    const TriangulationResult result = triangulate_line(rig, noisy);
    // The optimum can be no worse than the noise floor of the data itself.
    std::vector<Eigen::Vector3d> u;
    for (int i = 0; i < noisy.size(); ++i)
      u.push_back(noisy[i].real_coords().normalized());
    std::vector<ProjectivePoint> reproj;
    for (int i = 0; i < rig.size(); ++i)
      reproj.push_back(project_line(rig.camera(i), truth));
    CHECK(result.objective <=
          product_distance(reproj, noisy.lines) *
                  product_distance(reproj, noisy.lines) + 1e-12);
  }
}

TEST_CASE("objective is invariant under camera rescaling") {
  Rng rng(86);
  const CameraRig rig = random_rig(rng, 3);
  const PlueckerLine truth = random_chart_line(rng);
  const LineTuple noisy = perturbed_tuple(forward_map(rig, truth), rng, 1e-6);

  std::vector<Camera> scaled;
  for (int i = 0; i < 3; ++i)
    scaled.emplace_back(Matrix34d(rig.camera(i).matrix() * (2.0 + i)));
  const CameraRig scaled_rig(std::move(scaled));

  const TriangulationResult a = triangulate_line(rig, noisy);
  const TriangulationResult b = triangulate_line(scaled_rig, noisy);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
  CHECK(grassmann_distance(a.line, b.line) < 1e-7);
}

TEST_CASE("point triangulation") {
  Rng rng(87);
  SUBCASE("exact images recover the point") {
    for (int trial = 0; trial < 30; ++trial) {
      const CameraRig rig = random_rig(rng, 3);
      const Eigen::Vector3d p = rng.gaussian_vector(3);
      const Eigen::Vector4d x(1.0, p[0], p[1], p[2]);
      std::vector<Eigen::Vector2d> q;
      bool ok = true;
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d w = rig.camera(i).matrix() * x;
        if (std::abs(w[0]) < 1e-6) { ok = false; break; }
        q.emplace_back(w[1] / w[0], w[2] / w[0]);
      }
      if (!ok) continue;
      const PointTriangulationResult result = triangulate_point(rig, q);
      CHECK(result.converged);
      CHECK((result.point - p).norm() < 1e-10 * (1.0 + p.norm()));
    }
  }
  SUBCASE("noisy images give a finite relative error") {
    const CameraRig rig = fixed_triplet_rig();
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Vector3d p = rng.gaussian_vector(3);
      const Eigen::Vector4d x(1.0, p[0], p[1], p[2]);
      std::vector<Eigen::Vector2d> q;
      bool ok = true;
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d w = rig.camera(i).matrix() * x;
        if (std::abs(w[0]) < 1e-6) { ok = false; break; }
        const Eigen::Vector2d image(w[1] / w[0], w[2] / w[0]);
        q.push_back(image + 1e-12 * image.norm() * rng.unit_sphere(2));
      }
      if (!ok) continue;
      const PointTriangulationResult result = triangulate_point(rig, q);
      const double e =
          std::log10((p - result.point).norm() / (1e-12 * p.norm()));
      CHECK(std::isfinite(e));
    }
  }
}

TEST_CASE("sensitivity experiment") {
  const CameraRig rig = fixed_triplet_rig();
  SUBCASE("line records are well formed and mostly converge") {
    const auto records = sensitivity_experiment(
        rig, SensitivityKind::kLines, 100, 1e-12, 99);
    REQUIRE(records.size() == 100);
    int good = 0;
    for (const auto& rec : records) {
      CHECK(rec.kind == SensitivityKind::kLines);
      if (!rec.failed && rec.converged && std::isfinite(rec.e_value)) ++good;
    }
    CHECK(good >= 95);
  }
  SUBCASE("point records use the closed-form relative error") {
    const auto records = sensitivity_experiment(
        rig, SensitivityKind::kPoints, 100, 1e-12, 99);
    int good = 0;
    for (const auto& rec : records)
      if (!rec.failed && std::isfinite(rec.e_value)) ++good;
    CHECK(good >= 95);
  }
  SUBCASE("records are deterministic in the seed") {
    const auto a = sensitivity_experiment(rig, SensitivityKind::kLines, 25,
                                          1e-12, 1234, {}, 1);
    const auto b = sensitivity_experiment(rig, SensitivityKind::kLines, 25,
                                          1e-12, 1234, {}, 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].e_value == b[i].e_value);
      CHECK(a[i].objective == b[i].objective);
    }
  }
}
