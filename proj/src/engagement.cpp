#include "pfg/engagement.hpp"

#include <cmath>

#include "pfg/errors.hpp"

namespace pfg {

double guarded_cos(double c, uint32_t flag, uint32_t* flags) {
    if (std::fabs(c) <= kEpsDen) {
        if (flags != nullptr) {
            *flags |= flag;
        }
        return (c >= 0.0) ? kEpsDen : -kEpsDen;
    }
    return c;
}

EngagementRates engagement_derivatives(const EngagementState& s, const UavInputs& u,
                                       const ObservedTarget& t, uint32_t* flags) {
    double rr = s.r;
    if (rr < kRangeMin) {
        rr = kRangeMin;
        if (flags != nullptr) {
            *flags |= guard::kRangeClamped;
        }
    }
    const double c_th = std::cos(s.los.theta);
    const double s_th = std::sin(s.los.theta);
    const double c_tu = std::cos(s.lead_u.theta);
    const double s_tu = std::sin(s.lead_u.theta);
    const double c_pu = std::cos(s.lead_u.psi);
    const double s_pu = std::sin(s.lead_u.psi);
    const double c_tt = std::cos(t.lead_t.theta);
    const double s_tt = std::sin(t.lead_t.theta);
    const double c_pt = std::cos(t.lead_t.psi);
    const double s_pt = std::sin(t.lead_t.psi);

    const double c_th_g = guarded_cos(c_th, guard::kLosCosClamped, flags);
    const double c_tu_g = guarded_cos(c_tu, guard::kLeadCosClamped, flags);
    const double tan_tu = s_tu / c_tu_g;

    EngagementRates out;
    out.r_dot = t.v_t * c_tt * c_pt - u.v_u * c_tu * c_pu;
    out.theta_dot = (t.v_t * s_tt - u.v_u * s_tu) / rr;
    out.psi_dot = (t.v_t * c_tt * s_pt - u.v_u * c_tu * s_pu) / (rr * c_th_g);
    out.theta_u_dot = u.omega_z - out.psi_dot * s_th * s_pu - out.theta_dot * c_pu;
    out.psi_u_dot = u.omega_y / c_tu_g + out.psi_dot * tan_tu * c_pu * s_th -
                    out.psi_dot * c_th - out.theta_dot * tan_tu * s_pu;
    return out;
}

Vec3 reconstruct_uav_position(const Vec3& p_target, const EngagementState& s) {
    const double ct = std::cos(s.los.theta);
    const Vec3 los_axis{ct * std::cos(s.los.psi), ct * std::sin(s.los.psi),
                        std::sin(s.los.theta)};
    return p_target - s.r * los_axis;
}

RangeLos los_from_positions(const Vec3& p_uav, const Vec3& p_target) {
    const Vec3 d = p_target - p_uav;
    const double r = d.norm();
    if (r < 1e-12) {
        throw SimError(Err::CoincidentPoints, "los_from_positions: points coincide");
    }
    RangeLos out;
    out.r = r;
    // elevation kept strictly inside (-pi/2, pi/2) for a vertical LOS
    constexpr double kThetaMax = 0.5 * kPi - 1e-9;
    out.los.theta = std::clamp(std::asin(std::clamp(d.z / r, -1.0, 1.0)), -kThetaMax, kThetaMax);
    out.los.psi = std::atan2(d.y, d.x);
    return out;
}

const char* err_name(Err code) {
    switch (code) {
        case Err::ZeroSpeed: return "ZeroSpeed";
        case Err::CoincidentPoints: return "CoincidentPoints";
        case Err::UnknownScenario: return "UnknownScenario";
        case Err::VerticalHeading: return "VerticalHeading";
        case Err::NonFiniteState: return "NonFiniteState";
        case Err::UndefinedAtZeroSigma: return "UndefinedAtZeroSigma";
        case Err::ParseError: return "ParseError";
        case Err::ValidationError: return "ValidationError";
        case Err::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace pfg
