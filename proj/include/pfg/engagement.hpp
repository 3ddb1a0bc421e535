#pragma once

#include <cstdint>

#include "pfg/frames.hpp"
#include "pfg/math3.hpp"

namespace pfg {

// Relative-motion state: range, LOS angles, and the UAV's lead angles.
struct EngagementState {
    double r = 0.0;  // m, > 0 during integration (denominators clamp at kRangeMin)
    LosAngles los;
    LeadAngles lead_u;
};

// What the guidance is allowed to see of the target: speed and lead angles
// only, never the target's turn rates.
struct ObservedTarget {
    double v_t = 0.0;  // m/s, >= 0
    LeadAngles lead_t;
};

struct UavInputs {
    double v_u = 0.0;      // m/s
    double omega_y = 0.0;  // rad/s, yaw plane
    double omega_z = 0.0;  // rad/s, pitch plane
};

struct EngagementRates {
    double r_dot = 0.0;        // m/s
    double theta_dot = 0.0;    // rad/s
    double psi_dot = 0.0;      // rad/s
    double theta_u_dot = 0.0;  // rad/s
    double psi_u_dot = 0.0;    // rad/s
};

// Guard-trip flags accumulated per step; logged, never fatal.
namespace guard {
constexpr uint32_t kRangeClamped = 1u << 0;        // r below kRangeMin in a denominator
constexpr uint32_t kLosCosClamped = 1u << 1;       // |cos(theta)| at kEpsDen
constexpr uint32_t kLeadCosClamped = 1u << 2;      // |cos(theta_u)| at kEpsDen
constexpr uint32_t kSigmaSingularity = 1u << 3;    // |cos(theta_u)cos(psi_u)| <= kEpsSigma
constexpr uint32_t kSpeedSatDen = 1u << 4;         // speed-channel bracket <= kEpsDen
constexpr uint32_t kPitchSatDen = 1u << 5;         // pitch-channel bracket <= kEpsDen
constexpr uint32_t kYawSatDen = 1u << 6;           // yaw-channel bracket <= kEpsDen
constexpr uint32_t kThetaUSingularity = 1u << 7;   // |cos(theta_u)| <= kEpsDen in yaw law
constexpr uint32_t kSpeedCmdLimited = 1u << 8;     // |u_cmd| clipped to the command limit
constexpr uint32_t kPitchCmdLimited = 1u << 9;
constexpr uint32_t kYawCmdLimited = 1u << 10;
constexpr uint32_t kVerticalHeading = 1u << 11;    // target |cos(gamma)| at guard
constexpr uint32_t kLosElevationClamped = 1u << 12;
}  // namespace guard

constexpr double kRangeMin = 0.1;  // m, denominator floor near rendezvous
constexpr double kEpsDen = 1e-6;   // cosine/denominator guard
constexpr double kEpsSigma = 1e-6;

// Clamp a cosine away from zero, preserving sign; sets `flag` in *flags on trip.
double guarded_cos(double c, uint32_t flag, uint32_t* flags);

// Relative-motion derivatives. Denominators are clamped (max(r, kRangeMin),
// guarded cosines); trips are recorded in *flags when non-null.
EngagementRates engagement_derivatives(const EngagementState& s, const UavInputs& u,
                                       const ObservedTarget& t, uint32_t* flags = nullptr);

// p_U = p_T - r * (LOS x-axis in inertial coordinates).
Vec3 reconstruct_uav_position(const Vec3& p_target, const EngagementState& s);

struct RangeLos {
    double r = 0.0;
    LosAngles los;
};

// Range and LOS angles between two inertial points. Throws
// SimError(CoincidentPoints) when r < 1e-12 m; elevation clamped inside
// (-pi/2, pi/2) for a vertical LOS.
RangeLos los_from_positions(const Vec3& p_uav, const Vec3& p_target);

}  // namespace pfg
