#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfg/engagement.hpp"
#include "pfg/frames.hpp"
#include "pfg/math3.hpp"

namespace pfg {

// Pseudo-target inertial pose: position plus heading azimuth/elevation.
struct TargetState {
    Vec3 position;
    double heading_az = 0.0;  // rad, inertial azimuth chi_T
    double heading_el = 0.0;  // rad, inertial elevation gamma_T in (-pi/2, pi/2)
};

// Piecewise-constant schedule over left-closed intervals [t_i, t_{i+1});
// the last value holds for all later times.
struct PiecewiseSchedule {
    std::vector<double> t_start;
    std::vector<double> value;

    friend bool operator==(const PiecewiseSchedule&, const PiecewiseSchedule&) = default;

    double at(double t) const;
};

enum class ProfileKind { Constant, Helix, Piecewise, TimevaryingSpeed, Table };

struct TableRow {
    double t = 0.0;
    double speed = 0.0;
    double omega_y = 0.0;
    double omega_z = 0.0;

    friend bool operator==(const TableRow&, const TableRow&) = default;
};

// Target motion generator: V_T(t), omega_T^y(t), omega_T^z(t).
struct TargetProfile {
    ProfileKind kind = ProfileKind::Constant;
    double speed = 0.0;      // m/s (Constant, Helix, Piecewise)
    double omega_y = 0.0;    // rad/s (Constant)
    double omega_z = 0.0;    // rad/s (Constant)
    PiecewiseSchedule omega_y_schedule;  // Piecewise, TimevaryingSpeed
    PiecewiseSchedule omega_z_schedule;
    std::vector<TableRow> table;         // Table, sorted by t, linear interpolation
    std::string table_path;              // provenance for serialization

    friend bool operator==(const TargetProfile&, const TargetProfile&) = default;

    double speed_at(double t) const;
    double omega_y_at(double t) const;
    double omega_z_at(double t) const;
};

// Scenario ids: helix_v3, helix_v0, scurve, timevarying, straightline.
// Throws SimError(UnknownScenario) otherwise.
TargetProfile builtin_profile(const std::string& name);

// Rows of (t, V_T, omega_y, omega_z); linear interpolation between rows.
// Throws SimError(IoError / ParseError / ValidationError).
TargetProfile load_table_profile(const std::string& csv_path);

struct TargetRates {
    Vec3 p_dot;                  // m/s
    double heading_el_dot = 0.0;  // rad/s
    double heading_az_dot = 0.0;  // rad/s
};

// Inertial kinematics: p_dot = V_T (cos g cos c, cos g sin c, sin g),
// gamma_dot = omega_z(t), chi_dot = omega_y(t)/cos(gamma). The cos(gamma)
// denominator is guarded like the engagement cosines.
TargetRates target_derivatives(const TargetState& ts, const TargetProfile& profile, double t,
                               uint32_t* flags = nullptr);

// Target inertial velocity at time t.
Vec3 target_velocity(const TargetState& ts, const TargetProfile& profile, double t);

// Target speed and lead angles as seen in the given LOS frame. Zero target
// speed returns zero lead angles by convention.
ObservedTarget observed_target(const TargetState& ts, const TargetProfile& profile, double t,
                               const LosAngles& los);

}  // namespace pfg
