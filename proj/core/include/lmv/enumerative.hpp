#pragma once

#include <cstdint>
#include <vector>

#include "lmv/cameras.hpp"
#include "lmv/grassmannian.hpp"

namespace lmv {

enum class TransversalStatus { kFinite, kInfinite, kDegenerate };

/// Common transversals of a set of input lines: the solutions of the linear
/// incidence conditions on P^5 intersected with the Plücker quadric.
struct TransversalSolution {
  TransversalStatus status = TransversalStatus::kFinite;
  /// Present when status is finite; at most 2 lines, complex allowed.
  std::vector<PlueckerLine> lines;
  int real_count = 0;
  /// Decisive quantity divided by its threshold (< 1 on the infinite branch,
  /// > 1 on the finite branch). Values within a factor of 10 of the
  /// threshold flag a numerically marginal decision.
  double margin = 0.0;
  /// Projective dimension of the linear solution space minus 1 (nullity-1).
  int pencil_dim = 0;
};

/// Solves the incidence system for any number of constraint lines. Planes
/// can be modeled by omitting their (vacuous) constraint row upstream.
TransversalSolution common_transversals(const std::vector<PlueckerLine>& lines,
                                        double rank_tol = kRankTol);

/// The classical problem of lines meeting four given lines: two solutions
/// over C for generic inputs, an infinite family exactly when the inputs sit
/// on a common quadric surface in a ruling or share points degenerately.
TransversalSolution transversals_of_four(const PlueckerLine& l1,
                                         const PlueckerLine& l2,
                                         const PlueckerLine& l3,
                                         const PlueckerLine& l4);

/// A quadric surface in P^3 identified with its symmetric matrix.
struct Quadric3 {
  Eigen::Matrix4cd matrix;

  Complex evaluate(const Eigen::Vector4cd& x) const {
    return x.cwiseProduct(matrix * x).sum();  // bilinear x^T A x
  }
  int rank(double tol = kRankTol) const;
  bool is_smooth(double tol = kRankTol) const { return rank(tol) == 4; }
};

/// The quadric through three lines (nine point conditions on the ten quadric
/// coefficients). Unique and smooth when the lines are pairwise disjoint;
/// throws NonUniqueQuadric with the nullspace dimension otherwise.
Quadric3 quadric_through_three_lines(const PlueckerLine& l1,
                                     const PlueckerLine& l2,
                                     const PlueckerLine& l3,
                                     double rank_tol = kRankTol);

/// Outcome of the intersection-count experiment for one degree vector.
struct MultidegreeOutcome {
  std::vector<int> counts;  ///< complex solution count per trial
  int degenerate_resamples = 0;
};

/// Counts intersection points of the variety with generic linear slices of
/// codimensions d (a permutation of (2,2,0,..), (2,1,1,0,..) or
/// (1,1,1,1,0,..) summing to 4). Every solution is constructed geometrically
/// and verified to be a consistent tuple before it is counted.
MultidegreeOutcome multidegree_check(const CameraRig& rig,
                                     const std::vector<int>& degrees,
                                     int trials, std::uint64_t seed);

struct RealTransversalStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;    ///< samples that entered the mean
  std::uint64_t discarded = 0;  ///< guard-band or degenerate draws
};

/// Monte-Carlo estimate of the expected number of real lines meeting four
/// lines drawn via independent Gaussian cameras: each sample back-projects
/// four fixed generic image points and counts real transversals (0 or 2).
RealTransversalStats expected_real_transversals(std::uint64_t samples,
                                                std::uint64_t seed,
                                                int threads = 0);

}  // namespace lmv
