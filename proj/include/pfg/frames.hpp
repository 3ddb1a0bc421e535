#pragma once

#include "pfg/math3.hpp"

namespace pfg {

// Line-of-sight direction from the inertial frame: elevation theta, azimuth psi.
// theta in (-pi/2, pi/2), psi wrapped to (-pi, pi].
struct LosAngles {
    double theta = 0.0;  // rad
    double psi = 0.0;    // rad

    friend bool operator==(const LosAngles&, const LosAngles&) = default;
};

// Orientation of a velocity vector relative to the LOS frame.
// Both angles wrapped to (-pi, pi].
struct LeadAngles {
    double theta = 0.0;  // elevation lead, rad
    double psi = 0.0;    // azimuth lead, rad

    friend bool operator==(const LeadAngles&, const LeadAngles&) = default;
};

struct LeadDecomposition {
    LeadAngles lead;
    double speed = 0.0;  // m/s
};

// Rotation convention: inertial->LOS is an azimuth rotation about the inertial
// Z-axis by psi followed by an elevation rotation about the intermediate
// Y-axis by -theta, so the LOS x-axis in inertial coordinates is
// (cos(theta)cos(psi), cos(theta)sin(psi), sin(theta)).
Vec3 los_to_inertial(const Vec3& v_los, const LosAngles& los);
Vec3 inertial_to_los(const Vec3& v_inertial, const LosAngles& los);

// Decompose an inertial velocity into lead angles and speed against the LOS.
// Throws SimError(ZeroSpeed) for |v| < 1e-12 m/s. At theta_lead = +-pi/2 the
// azimuth lead is undefined and reported as 0.
LeadDecomposition lead_angles_from_velocity(const Vec3& v_inertial, const LosAngles& los);

// Inverse of the decomposition: inertial velocity whose LOS-frame components
// are speed * (cos(tl)cos(pl), cos(tl)sin(pl), sin(tl)).
Vec3 velocity_from_lead_angles(double speed, const LeadAngles& lead, const LosAngles& los);

// Effective heading sigma = acos(cos(psi_lead) cos(theta_lead)), in [0, pi].
double effective_heading(const LeadAngles& lead);

}  // namespace pfg
