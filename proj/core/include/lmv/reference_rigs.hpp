#pragma once

#include "lmv/cameras.hpp"

namespace lmv {

/// The fixed two- and three-camera rigs used by the sensitivity experiments.
CameraRig fixed_pair_rig();
CameraRig fixed_triplet_rig();

/// Four cameras whose centers all lie on the line through [1:0:0:0] and
/// [0:0:0:1]; the reference example of a rig where the rank condition alone
/// does not cut out the variety.
CameraRig collinear_quad_rig();

/// The quartic in the four image-line tuples that vanishes exactly on the
/// extra constraint of collinear_quad_rig(); value normalized by the
/// component norms. Only meaningful for tuples of that rig.
Complex collinear_quad_constraint(const std::vector<ProjectivePoint>& tuple);

}  // namespace lmv
