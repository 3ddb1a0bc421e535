#include "pfg/frames.hpp"

#include <cmath>

#include "pfg/errors.hpp"

namespace pfg {

// Columns of the LOS->inertial rotation, written out to avoid a matrix type:
//   x_L = ( ct*cp,  ct*sp, st)
//   y_L = (   -sp,     cp,  0)
//   z_L = (-st*cp, -st*sp, ct)
Vec3 los_to_inertial(const Vec3& v, const LosAngles& los) {
    const double ct = std::cos(los.theta);
    const double st = std::sin(los.theta);
    const double cp = std::cos(los.psi);
    const double sp = std::sin(los.psi);
    return {ct * cp * v.x - sp * v.y - st * cp * v.z,
            ct * sp * v.x + cp * v.y - st * sp * v.z,
            st * v.x + ct * v.z};
}

Vec3 inertial_to_los(const Vec3& v, const LosAngles& los) {
    const double ct = std::cos(los.theta);
    const double st = std::sin(los.theta);
    const double cp = std::cos(los.psi);
    const double sp = std::sin(los.psi);
    return {ct * cp * v.x + ct * sp * v.y + st * v.z,
            -sp * v.x + cp * v.y,
            -st * cp * v.x - st * sp * v.y + ct * v.z};
}

LeadDecomposition lead_angles_from_velocity(const Vec3& v, const LosAngles& los) {
    const double speed = v.norm();
    if (speed < 1e-12) {
        throw SimError(Err::ZeroSpeed, "lead_angles_from_velocity: |v| < 1e-12 m/s");
    }
    const Vec3 v_los = inertial_to_los(v, los);
    const double sz = std::clamp(v_los.z / speed, -1.0, 1.0);
    LeadDecomposition out;
    out.speed = speed;
    out.lead.theta = std::asin(sz);
    // at theta_lead = +-pi/2 the azimuth lead is undefined; report 0
    if (std::fabs(std::fabs(out.lead.theta) - 0.5 * kPi) < 1e-9) {
        out.lead.psi = 0.0;
    } else {
        out.lead.psi = std::atan2(v_los.y, v_los.x);
    }
    return out;
}

Vec3 velocity_from_lead_angles(double speed, const LeadAngles& lead, const LosAngles& los) {
    const double ct = std::cos(lead.theta);
    const Vec3 v_los{speed * ct * std::cos(lead.psi), speed * ct * std::sin(lead.psi),
                     speed * std::sin(lead.theta)};
    return los_to_inertial(v_los, los);
}

double effective_heading(const LeadAngles& lead) {
    const double c = std::clamp(std::cos(lead.psi) * std::cos(lead.theta), -1.0, 1.0);
    return std::acos(c);
}

}  // namespace pfg
