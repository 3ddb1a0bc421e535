#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfg/engagement.hpp"
#include "pfg/guidance.hpp"
#include "pfg/saturation.hpp"
#include "pfg/targets.hpp"

namespace pfg {

// Everything needed to run one engagement.
struct Scenario {
    std::string name = "custom";
    TargetProfile profile;
    Vec3 target_position;
    LeadAngles target_lead;  // initial target lead angles w.r.t. the initial LOS
    Vec3 uav_position;
    LeadAngles uav_lead;
    SpeedEnvelope envelope;
    double omega_max = 3.0;  // rad/s, both channels
    SatParams sat;
    GuidanceParams guidance;
    double dt = 1e-3;          // s, control period and base integration step
    double t_end = 20.0;       // s
    double r_capture = 0.5;    // m, convergence threshold on range
    double angle_tol = deg2rad(0.5);  // rad, convergence threshold on lead angles
    double converge_hold = 1.0;       // s, persistence window for declarations
    int substeps = 1;          // integration sub-steps per control period

    friend bool operator==(const Scenario&, const Scenario&) = default;

    // Throws SimError(ValidationError) naming the violated invariant.
    void validate() const;
};

// One logged sample (one control period). Guidance values are the ones
// computed from this state at the step start.
struct Sample {
    double t = 0.0;
    double r = 0.0;
    double theta = 0.0;
    double psi = 0.0;
    double theta_u = 0.0;
    double psi_u = 0.0;
    double v_u = 0.0;
    double omega_y = 0.0;
    double omega_z = 0.0;
    double u_cmd = 0.0;
    double omega_y_cmd = 0.0;
    double omega_z_cmd = 0.0;
    Vec3 p_uav;     // reconstructed from target position and (r, theta, psi)
    Vec3 p_target;
    double sigma_u = 0.0;
    double v2 = 0.0;  // r + |x|
    double w2 = 0.0;  // |theta_u| + |z|
    double w4 = 0.0;  // |psi_u| + |y|
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double consistency_err = 0.0;  // |p_uav integrated - p_uav reconstructed|, m
    uint32_t flags = 0;
};

struct Trajectory {
    std::vector<Sample> samples;
};

struct LyapunovReport {
    int violations_v2 = 0;
    int violations_w2 = 0;
    int violations_w4 = 0;
    double max_normalized_violation = 0.0;  // (vdot - bound) / (decrease + 1e-3)

    friend bool operator==(const LyapunovReport&, const LyapunovReport&) = default;
};

struct RunMetrics {
    std::optional<double> t_angle_conv;  // s
    std::optional<double> t_range_conv;  // s
    double v_u_min = 0.0;
    double v_u_max = 0.0;
    double max_abs_omega_y = 0.0;
    double max_abs_omega_z = 0.0;
    std::optional<double> tracking_error;  // m, mean r after t_range_conv
    SettlingBounds bounds;
    LyapunovReport lyapunov;
    int64_t guard_trip_steps = 0;  // steps with any guard flag set
    double consistency_max_err = 0.0;  // m, dual-integration agreement

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

// Combined integration state: 5 engagement + 3 actuator + 3 target position
// + 2 target heading, plus the UAV inertial position co-integrated for the
// dual-route consistency audit (one-way coupling; does not feed back).
struct SimState {
    EngagementState eng;
    ActuatorState act;
    TargetState target;
    Vec3 uav_position;
};

SimState initial_state(const Scenario& sc);

// One control period: guidance command from the step-start state (zero-order
// hold), then `substeps` RK4 sub-steps of the combined field, then angle
// wrapping and state clamps. Returns the sample row for the step START.
// *carry_flags (optional) receives the integration-time guard trips of this
// interval and merges the previous interval's trips into the returned row.
// Throws SimError(NonFiniteState) if the state leaves IEEE-finite range.
Sample step(SimState& state, double t, const Scenario& sc, GuidanceMemory& mem,
            GuidanceCommand& prev_cmd, uint32_t* carry_flags = nullptr);

struct RunResult {
    Trajectory trajectory;
    RunMetrics metrics;
};

// Integrate to t_end and compute metrics. With t_end <= 0 the trajectory is
// empty and metrics are undefined-marked.
RunResult run(const Scenario& sc);

// Central-difference decrease audit of the logged Lyapunov candidates against
// -(Mbar V^alpha + N V^beta) + tau, tau = 0.05 (Mbar V^alpha + N V^beta) + 1e-3,
// starting after a 5-sample warm-up. Requires >= 3 samples.
LyapunovReport lyapunov_audit(const Trajectory& traj, const GuidanceParams& p, double dt);

// Effective-heading rate; used to verify that sigma = +-pi/2 is repelling.
// Picks the boundary-case formula when psi_u or theta_u is at +-pi/2.
// Throws SimError(UndefinedAtZeroSigma) at sigma = 0.
double sigma_dot_audit(const EngagementState& s, const UavInputs& u, const ObservedTarget& t);

// The five scenario families with the reported parameter sets.
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

}  // namespace pfg
