#pragma once

#include <optional>
#include <vector>

#include "lmv/cameras.hpp"
#include "lmv/grassmannian.hpp"

namespace lmv {

/// An m-tuple of image lines, one per camera of a rig, each a point of P^2
/// in dual coordinates.
struct LineTuple {
  std::vector<ProjectivePoint> lines;

  LineTuple() = default;
  explicit LineTuple(std::vector<ProjectivePoint> components)
      : lines(std::move(components)) {}

  int size() const { return static_cast<int>(lines.size()); }
  const ProjectivePoint& operator[](int i) const { return lines.at(i); }
};

struct MembershipDiagnostics {
  /// sigma_{r+1}/sigma_1 of M.
  double rank_gap_ratio = 0.0;
  /// Decisive quantity of the transversal-family test divided by its
  /// threshold; meaningful only when a collinear group of size >= 4 exists.
  double family_margin = 0.0;
  /// The family decision fell within a factor of 10 of its threshold.
  bool family_marginal = false;
  /// Some constraint line degenerated to a plane during the family test.
  bool family_nongeneric = false;
};

/// Classification of a LineTuple against the variety of consistent tuples.
struct MembershipReport {
  int rank = 0;
  bool in_variety = false;
  bool in_image = false;
  bool singular = false;
  /// True when every required transversal-family condition holds (vacuously
  /// true when no four centers are collinear).
  bool exceptional_ok = true;
  std::optional<PlueckerLine> witness_line;
  MembershipDiagnostics diagnostics;
};

/// The 4xm matrix [C_1^T l_1 ... C_m^T l_m] of back-projected plane
/// equations. Its rank is invariant under rescaling of any component.
Eigen::MatrixXcd build_M(const CameraRig& rig, const LineTuple& tuple);

/// Projects a line through every camera of the rig. Throws LineThroughCenter
/// (with the camera index) where the joint map is undefined.
LineTuple forward_map(const CameraRig& rig, const PlueckerLine& line);

struct MembershipConfig {
  double rank_tol = kRankTol;
  double incidence_tol = kIncidenceTol;
};

/// Full membership classification: rank test, transversal-family test for
/// collinear rigs, witness extraction, image-vs-closure and singularity
/// flags. Always returns a report.
MembershipReport membership(const CameraRig& rig, const LineTuple& tuple,
                            const MembershipConfig& config = {});

struct FamilyTestResult {
  bool infinite = false;
  double margin = 0.0;
  bool nongeneric = false;
};

/// Decides whether the constraint lines attached to a collinear camera group
/// admit a positive-dimensional family of common transversals (the extra
/// membership condition beyond the rank test). I must be a collinear group
/// of the rig with at least four cameras.
FamilyTestResult exceptional_locus_test(const CameraRig& rig,
                                        const LineTuple& tuple,
                                        const std::vector<int>& group,
                                        double rank_tol = kRankTol);

/// The trilinear consistency tensor of a three-camera rig, attached to a
/// pivot camera: residual(l) = l_pivot . (B_j l_j x B_k l_k) vanishes on all
/// consistent triples.
class TrifocalTensor {
 public:
  TrifocalTensor(const CameraRig& rig, int pivot);

  int pivot() const { return pivot_; }
  /// Slice a of the tensor: T[a](j,k).
  const Eigen::Matrix3d& slice(int a) const { return slices_[a]; }

  /// Raw multilinear residual; scales linearly in each argument.
  Complex residual(const Eigen::Vector3cd& l1, const Eigen::Vector3cd& l2,
                   const Eigen::Vector3cd& l3) const;
  /// Residual divided by the norms of the pivot line and the two mapped
  /// lines, so consistent triples score near rounding level.
  double normalized_residual(const LineTuple& tuple) const;

 private:
  int pivot_;
  int others_[2];
  Eigen::Matrix3d b_[2];  // (C_pivot^T)^+ C_j^T for the two non-pivot cameras
  Eigen::Matrix3d slices_[3];
};

TrifocalTensor trifocal_tensor(const CameraRig& rig, int pivot);

/// Point-correspondence membership: rank deficiency of the stacked
/// [C_i | x_i] matrix.
bool point_multiview_membership(const CameraRig& rig,
                                const std::vector<ProjectivePoint>& points,
                                double rank_tol = kRankTol);

/// The stacked 3m x (m+4) point-membership matrix.
Eigen::MatrixXcd build_point_matrix(const CameraRig& rig,
                                    const std::vector<ProjectivePoint>& points);

}  // namespace lmv
