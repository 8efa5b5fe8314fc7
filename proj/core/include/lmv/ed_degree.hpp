#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lmv/cameras.hpp"
#include "lmv/multipoly.hpp"

namespace lmv {

/// Square polynomial system interface for the path tracker. Implementations
/// must be safe to call concurrently.
class PolynomialSystem {
 public:
  virtual ~PolynomialSystem() = default;
  virtual int num_vars() const = 0;
  virtual std::vector<int> degrees() const = 0;
  virtual void evaluate(const Eigen::VectorXcd& x, Eigen::VectorXcd& f) const = 0;
  virtual void jacobian(const Eigen::VectorXcd& x, Eigen::MatrixXcd& j) const = 0;
};

/// Generic system backed by expanded polynomials.
class MultiPolySystem : public PolynomialSystem {
 public:
  explicit MultiPolySystem(std::vector<MultiPoly> polys);

  int num_vars() const override { return num_vars_; }
  std::vector<int> degrees() const override;
  void evaluate(const Eigen::VectorXcd& x, Eigen::VectorXcd& f) const override;
  void jacobian(const Eigen::VectorXcd& x, Eigen::MatrixXcd& j) const override;

 private:
  int num_vars_;
  std::vector<MultiPoly> polys_;
  std::vector<std::vector<MultiPoly>> partials_;
};

/// The squared-distance critical system of a rig and a data tuple u in
/// (R^3)^m, in the m+4 variables (v11, v12, v21, v22, t_1, ..., t_m):
/// the gradient of sum_i (u_i - t_i kappa_i(V))^T (u_i - t_i kappa_i(V))
/// where kappa_i is the cross product of the two projected chart rows.
/// Every equation has total degree exactly 5.
std::vector<MultiPoly> build_ed_system(const CameraRig& rig,
                                       const std::vector<Eigen::Vector3d>& u);

/// Closed-form evaluator of the same system (no expansion); used by the big
/// enumeration runs. Agrees with build_ed_system to rounding.
class EdCriticalSystem : public PolynomialSystem {
 public:
  EdCriticalSystem(const CameraRig& rig, const std::vector<Eigen::Vector3d>& u);

  int num_vars() const override { return m_ + 4; }
  std::vector<int> degrees() const override {
    return std::vector<int>(m_ + 4, 5);
  }
  void evaluate(const Eigen::VectorXcd& x, Eigen::VectorXcd& f) const override;
  void jacobian(const Eigen::VectorXcd& x, Eigen::MatrixXcd& j) const override;

  /// The m projected chart rows at V: kappa_i and their chart derivatives.
  void kappas(const Eigen::VectorXcd& x,
              std::vector<Eigen::Vector3cd>& kappa) const;

 private:
  int m_;
  std::vector<Matrix34d> cams_;
  std::vector<Eigen::Vector3d> u_;
};

enum class PathStatus { kRegular, kSingular, kDiverged, kTruncated };

struct PathResult {
  Eigen::VectorXcd endpoint;
  PathStatus status = PathStatus::kTruncated;
  double residual = 0.0;
  /// Ratio of consecutive Newton corrections at the endpoint (small for
  /// regular roots).
  double newton_contraction = 1.0;
  int steps = 0;
  std::uint64_t start_index = 0;
};

struct TrackConfig {
  std::uint64_t seed = 1;
  int max_steps_per_path = 5000;
  double step_init = 0.05;
  double step_min = 1e-7;
  double step_max = 0.1;
  double corrector_tol = 1e-11;
  int corrector_iterations = 3;
  double divergence_threshold = 1e8;
  double end_tol = 1e-8;
  int threads = 0;
};

/// Tracks every start solution of the total-degree start system
/// x_i^{d_i} = r_i to the target under the straight-line gamma homotopy
/// H(x,s) = (1-s) gamma G(x) + s F(x). Results are ordered by start index.
/// A path that exhausts its step budget is reported truncated, never fatal.
std::vector<PathResult> solve_total_degree(const PolynomialSystem& system,
                                           const TrackConfig& config = {});
std::vector<PathResult> solve_total_degree(const std::vector<MultiPoly>& system,
                                           const TrackConfig& config = {});

/// Indices of one representative per cluster of regular endpoints, after
/// normalizing the largest-magnitude coordinate to 1.
std::vector<int> deduplicate_endpoints(const std::vector<PathResult>& paths,
                                       double dedup_tol = 1e-6);

struct EdConfig {
  TrackConfig track;
  double t_tol = 1e-8;      ///< relative threshold for the t_i != 0 filter
  double dedup_tol = 1e-6;
};

struct EDCount {
  int m = 0;
  std::uint64_t total_paths = 0;
  int regular_solutions = 0;    ///< deduplicated regular endpoints
  int valid_solutions = 0;      ///< ... with every |t_i| above threshold
  int certified_lower_bound = 0;  ///< ... passing the Newton-contraction check
  int regular_paths = 0;
  int singular_paths = 0;
  int diverged_paths = 0;
  int truncated_paths = 0;
  double runtime_s = 0.0;
  std::uint64_t seed = 0;
  /// One representative endpoint per valid solution, for audit.
  std::vector<Eigen::VectorXcd> valid_points;
};

/// Full critical-point enumeration for m in {3, 4}: build, track, filter
/// t_i != 0, drop the rank-1 (singular) image for m = 3, deduplicate
/// projectively, and certify with two contracting Newton steps each. The
/// certified count is a heuristic lower bound, not a formal proof.
EDCount count_ed_critical(const CameraRig& rig,
                          const std::vector<Eigen::Vector3d>& u,
                          const EdConfig& config = {});

}  // namespace lmv
