#include "pfg/simulator.hpp"

#include <array>
#include <cmath>
#include <string>

#include "pfg/errors.hpp"

namespace pfg {

namespace {

constexpr double kThetaClamp = 0.5 * kPi - 1e-6;

// Flattened integration state:
// [r, theta, psi, theta_u, psi_u, u, omega_y, omega_z,
//  xT, yT, zT, heading_el, heading_az, xU, yU, zU]
using StateVec = std::array<double, 16>;

StateVec pack(const SimState& s) {
    return {s.eng.r, s.eng.los.theta, s.eng.los.psi, s.eng.lead_u.theta, s.eng.lead_u.psi,
            s.act.u, s.act.omega_y, s.act.omega_z,
            s.target.position.x, s.target.position.y, s.target.position.z,
            s.target.heading_el, s.target.heading_az,
            s.uav_position.x, s.uav_position.y, s.uav_position.z};
}

SimState unpack(const StateVec& v) {
    SimState s;
    s.eng.r = v[0];
    s.eng.los.theta = v[1];
    s.eng.los.psi = v[2];
    s.eng.lead_u.theta = v[3];
    s.eng.lead_u.psi = v[4];
    s.act.u = v[5];
    s.act.omega_y = v[6];
    s.act.omega_z = v[7];
    s.target.position = {v[8], v[9], v[10]};
    s.target.heading_el = v[11];
    s.target.heading_az = v[12];
    s.uav_position = {v[13], v[14], v[15]};
    return s;
}

StateVec derivative_field(const StateVec& v, double t, const Scenario& sc,
                          const GuidanceCommand& cmd, uint32_t* flags) {
    const SimState s = unpack(v);
    const ObservedTarget obs = observed_target(s.target, sc.profile, t, s.eng.los);
    const double v_u = unshift_speed(s.act.u, sc.envelope);
    const UavInputs inputs{v_u, s.act.omega_y, s.act.omega_z};

    const EngagementRates eng = engagement_derivatives(s.eng, inputs, obs, flags);
    const double u_dot = speed_sat_derivative(s.act.u, cmd.u_cmd, sc.sat, sc.envelope);
    const auto [wy_dot, wz_dot] =
        omega_sat_derivative({s.act.omega_y, s.act.omega_z}, {cmd.omega_y_cmd, cmd.omega_z_cmd},
                             sc.sat, sc.omega_max);
    const TargetRates tgt = target_derivatives(s.target, sc.profile, t, flags);
    const Vec3 v_uav = velocity_from_lead_angles(v_u, s.eng.lead_u, s.eng.los);

    return {eng.r_dot, eng.theta_dot, eng.psi_dot, eng.theta_u_dot, eng.psi_u_dot,
            u_dot, wy_dot, wz_dot,
            tgt.p_dot.x, tgt.p_dot.y, tgt.p_dot.z, tgt.heading_el_dot, tgt.heading_az_dot,
            v_uav.x, v_uav.y, v_uav.z};
}

StateVec axpy(const StateVec& a, double h, const StateVec& d) {
    StateVec out;
    for (size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + h * d[i];
    }
    return out;
}

void rk4_substep(StateVec& v, double t, double h, const Scenario& sc, const GuidanceCommand& cmd,
                 uint32_t* flags) {
    const StateVec k1 = derivative_field(v, t, sc, cmd, flags);
    const StateVec k2 = derivative_field(axpy(v, 0.5 * h, k1), t + 0.5 * h, sc, cmd, flags);
    const StateVec k3 = derivative_field(axpy(v, 0.5 * h, k2), t + 0.5 * h, sc, cmd, flags);
    const StateVec k4 = derivative_field(axpy(v, h, k3), t + h, sc, cmd, flags);
    for (size_t i = 0; i < v.size(); ++i) {
        v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

// Wrap angles and clamp states that must stay inside open intervals; applied
// after each sub-step, never inside derivative evaluation.
void normalize_state(StateVec& v, uint32_t* flags) {
    if (v[0] < 0.0) {
        v[0] = 0.0;
    }
    if (std::fabs(v[1]) > kThetaClamp) {
        v[1] = std::copysign(kThetaClamp, v[1]);
        *flags |= guard::kLosElevationClamped;
    }
    v[2] = wrap_pi(v[2]);
    v[3] = wrap_pi(v[3]);
    v[4] = wrap_pi(v[4]);
    if (std::fabs(v[11]) > kThetaClamp) {
        v[11] = std::copysign(kThetaClamp, v[11]);
        *flags |= guard::kVerticalHeading;
    }
    v[12] = wrap_pi(v[12]);
}

Sample make_sample(const SimState& s, double t, const Scenario& sc, const GuidanceCommand& cmd) {
    Sample row;
    row.t = t;
    row.r = s.eng.r;
    row.theta = s.eng.los.theta;
    row.psi = s.eng.los.psi;
    row.theta_u = s.eng.lead_u.theta;
    row.psi_u = s.eng.lead_u.psi;
    row.v_u = unshift_speed(s.act.u, sc.envelope);
    row.omega_y = s.act.omega_y;
    row.omega_z = s.act.omega_z;
    row.u_cmd = cmd.u_cmd;
    row.omega_y_cmd = cmd.omega_y_cmd;
    row.omega_z_cmd = cmd.omega_z_cmd;
    row.p_target = s.target.position;
    row.p_uav = reconstruct_uav_position(s.target.position, s.eng);
    row.sigma_u = cmd.sigma_u;
    row.x = cmd.x;
    row.y = cmd.y;
    row.z = cmd.z;
    row.v2 = std::max(s.eng.r, 0.0) + std::fabs(cmd.x);
    row.w2 = std::fabs(s.eng.lead_u.theta) + std::fabs(cmd.z);
    row.w4 = std::fabs(s.eng.lead_u.psi) + std::fabs(cmd.y);
    row.consistency_err = (s.uav_position - row.p_uav).norm();
    row.flags = cmd.flags;
    return row;
}

bool all_finite(const StateVec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

}  // namespace

void Scenario::validate() const {
    const auto fail = [](const std::string& msg) {
        throw SimError(Err::ValidationError, msg);
    };
    if (!(dt > 0.0)) fail("dt must be positive");
    if (!(t_end >= 0.0)) fail("t_end must be non-negative");
    if (substeps < 1) fail("substeps must be >= 1");
    if (!(envelope.v0 >= 0.0)) fail("v0 must be non-negative");
    if (!(envelope.v0 < envelope.v_max)) fail("v0 must be below v_max");
    if (!(omega_max > 0.0)) fail("omega_max must be positive");
    if (!(sat.k1 > 0.0 && sat.k2 > 0.0 && sat.k3 > 0.0 && sat.k4 > 0.0))
        fail("saturation gains k1..k4 must be positive");
    if (sat.gamma < 2) fail("gamma must be >= 2");
    if (sat.gamma % 2 != 0) fail("gamma must be even");
    const GuidanceParams& g = guidance;
    if (!(g.m1 > 0.0 && g.n1 > 0.0 && g.m2 > 0.0 && g.n2 > 0.0 && g.m3 > 0.0 && g.n3 > 0.0))
        fail("guidance gains m_i, n_i must be positive");
    if (!(g.alpha1 > 1.0)) fail("alpha1 must exceed 1");
    if (!(g.alpha2 > 1.0)) fail("alpha2 must exceed 1");
    if (!(g.alpha3 > 1.0)) fail("alpha3 must exceed 1");
    if (!(g.beta1 > 0.0 && g.beta1 < 1.0)) fail("beta1 must lie in (0, 1)");
    if (!(g.beta2 > 0.0 && g.beta2 < 1.0)) fail("beta2 must lie in (0, 1)");
    if (!(g.beta3 > 0.0 && g.beta3 < 1.0)) fail("beta3 must lie in (0, 1)");
    if (!(g.cmd_limit_speed > 0.0 && g.cmd_limit_omega > 0.0))
        fail("command limits must be positive");
    if (!(r_capture > 0.0)) fail("r_capture must be positive");
    if (!(angle_tol > 0.0)) fail("angle_tol must be positive");
    if (!(converge_hold >= 0.0)) fail("converge_hold must be non-negative");
    if (profile.kind == ProfileKind::Constant && profile.speed < 0.0)
        fail("target speed must be non-negative");
    if ((profile.kind == ProfileKind::Piecewise ||
         profile.kind == ProfileKind::TimevaryingSpeed) &&
        (profile.omega_y_schedule.t_start.empty() || profile.omega_z_schedule.t_start.empty()))
        fail("piecewise profile needs omega schedules");
    if (profile.kind == ProfileKind::Table && profile.table.size() < 2)
        fail("table profile needs >= 2 rows");
}

SimState initial_state(const Scenario& sc) {
    SimState s;
    const RangeLos rl = los_from_positions(sc.uav_position, sc.target_position);
    s.eng.r = rl.r;
    s.eng.los = rl.los;
    s.eng.lead_u.theta = wrap_pi(sc.uav_lead.theta);
    s.eng.lead_u.psi = wrap_pi(sc.uav_lead.psi);
    s.act = ActuatorState{};  // U(0) = 0, Gamma(0) = 0
    s.target.position = sc.target_position;
    // compose the stated initial lead angles with the initial LOS; unit speed
    // so a zero-speed profile start still defines a heading direction
    const Vec3 dir = velocity_from_lead_angles(1.0, sc.target_lead, rl.los);
    s.target.heading_el = std::asin(std::clamp(dir.z, -1.0, 1.0));
    s.target.heading_az = std::atan2(dir.y, dir.x);
    s.uav_position = sc.uav_position;
    return s;
}

Sample step(SimState& state, double t, const Scenario& sc, GuidanceMemory& mem,
            GuidanceCommand& prev_cmd, uint32_t* carry_flags) {
    const ObservedTarget obs = observed_target(state.target, sc.profile, t, state.eng.los);
    GuidanceCommand cmd = compute_command(state.eng, obs, state.act, sc.envelope, sc.sat,
                                          sc.guidance, sc.omega_max, sc.dt, mem, prev_cmd);
    Sample row = make_sample(state, t, sc, cmd);
    if (carry_flags != nullptr) {
        // integration-time guard trips from the previous interval land on
        // this row
        row.flags |= *carry_flags;
        *carry_flags = 0;
    }

    StateVec v = pack(state);
    const double h = sc.dt / sc.substeps;
    uint32_t step_flags = 0;
    for (int k = 0; k < sc.substeps; ++k) {
        rk4_substep(v, t + k * h, h, sc, cmd, &step_flags);
        normalize_state(v, &step_flags);
    }
    if (!all_finite(v)) {
        throw SimError(Err::NonFiniteState,
                       "state became non-finite at t = " + std::to_string(t + sc.dt));
    }
    if (carry_flags != nullptr) {
        *carry_flags = step_flags;
    }
    state = unpack(v);
    prev_cmd = cmd;
    return row;
}

namespace {

// First sample index from which `ok` holds for `hold` seconds (or through the
// end of the run when less than `hold` remains).
std::optional<size_t> first_persistent(const std::vector<char>& ok, double dt, double hold) {
    const size_t n = ok.size();
    if (n == 0) {
        return std::nullopt;
    }
    const size_t w = static_cast<size_t>(std::llround(hold / dt)) + 1;
    std::vector<size_t> run(n + 1, 0);
    for (size_t i = n; i-- > 0;) {
        run[i] = ok[i] ? run[i + 1] + 1 : 0;
    }
    for (size_t i = 0; i < n; ++i) {
        const size_t need = std::min(w, n - i);
        if (run[i] >= need && ok[i]) {
            return i;
        }
    }
    return std::nullopt;
}

}  // namespace

RunResult run(const Scenario& sc) {
    sc.validate();
    RunResult out;
    const long n_steps = std::lround(sc.t_end / sc.dt);
    if (n_steps <= 0) {
        // degenerate horizon: empty trajectory, metrics undefined-marked
        out.metrics.bounds = settling_bounds(sc.guidance);
        return out;
    }
    out.trajectory.samples.reserve(static_cast<size_t>(n_steps) + 1);

    SimState state = initial_state(sc);
    GuidanceMemory mem;
    GuidanceCommand prev_cmd;
    uint32_t carry_flags = 0;
    for (long i = 0; i < n_steps; ++i) {
        out.trajectory.samples.push_back(step(state, i * sc.dt, sc, mem, prev_cmd, &carry_flags));
    }
    // final row at t_end (state sampled, not advanced)
    {
        const double t = n_steps * sc.dt;
        const ObservedTarget obs = observed_target(state.target, sc.profile, t, state.eng.los);
        const GuidanceCommand cmd = compute_command(state.eng, obs, state.act, sc.envelope,
                                                    sc.sat, sc.guidance, sc.omega_max, sc.dt,
                                                    mem, prev_cmd);
        Sample last = make_sample(state, t, sc, cmd);
        last.flags |= carry_flags;
        out.trajectory.samples.push_back(last);
    }

    // metrics
    const auto& samples = out.trajectory.samples;
    RunMetrics& m = out.metrics;
    m.bounds = settling_bounds(sc.guidance);
    m.v_u_min = samples.front().v_u;
    m.v_u_max = samples.front().v_u;
    std::vector<char> ok_angle(samples.size());
    std::vector<char> ok_range(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        m.v_u_min = std::min(m.v_u_min, s.v_u);
        m.v_u_max = std::max(m.v_u_max, s.v_u);
        m.max_abs_omega_y = std::max(m.max_abs_omega_y, std::fabs(s.omega_y));
        m.max_abs_omega_z = std::max(m.max_abs_omega_z, std::fabs(s.omega_z));
        m.consistency_max_err = std::max(m.consistency_max_err, s.consistency_err);
        if (s.flags != 0) {
            ++m.guard_trip_steps;
        }
        ok_angle[i] = std::fabs(s.theta_u) < sc.angle_tol && std::fabs(s.psi_u) < sc.angle_tol;
        ok_range[i] = s.r < sc.r_capture;
    }
    if (const auto i = first_persistent(ok_angle, sc.dt, sc.converge_hold)) {
        m.t_angle_conv = samples[*i].t;
    }
    if (const auto i = first_persistent(ok_range, sc.dt, sc.converge_hold)) {
        m.t_range_conv = samples[*i].t;
        double sum = 0.0;
        size_t count = 0;
        for (size_t k = *i; k < samples.size(); ++k) {
            sum += samples[k].r;
            ++count;
        }
        m.tracking_error = sum / static_cast<double>(count);
    }
    m.lyapunov = lyapunov_audit(out.trajectory, sc.guidance, sc.dt);
    return out;
}

LyapunovReport lyapunov_audit(const Trajectory& traj, const GuidanceParams& p, double dt) {
    LyapunovReport rep;
    const auto& s = traj.samples;
    if (s.size() < 3) {
        return rep;
    }
    struct Channel {
        double Sample::*value;
        double m_bar;
        double n;
        double alpha;
        double beta;
        int* count;
    };
    Channel channels[3] = {
        {&Sample::v2, std::pow(2.0, 1.0 - p.alpha1) * p.m1, p.n1, p.alpha1, p.beta1,
         &rep.violations_v2},
        {&Sample::w2, std::pow(2.0, 1.0 - p.alpha2) * p.m2, p.n2, p.alpha2, p.beta2,
         &rep.violations_w2},
        {&Sample::w4, std::pow(2.0, 1.0 - p.alpha3) * p.m3, p.n3, p.alpha3, p.beta3,
         &rep.violations_w4},
    };
    for (const Channel& ch : channels) {
        for (size_t k = 5; k + 1 < s.size(); ++k) {
            const double v = s[k].*ch.value;
            const double vdot = (s[k + 1].*ch.value - s[k - 1].*ch.value) / (2.0 * dt);
            const double decrease = ch.m_bar * std::pow(v, ch.alpha) + ch.n * std::pow(v, ch.beta);
            const double bound = -decrease + 0.05 * decrease + 1e-3;
            if (vdot > bound) {
                ++(*ch.count);
                const double normalized = (vdot - bound) / (decrease + 1e-3);
                rep.max_normalized_violation = std::max(rep.max_normalized_violation, normalized);
            }
        }
    }
    return rep;
}

double sigma_dot_audit(const EngagementState& s, const UavInputs& u, const ObservedTarget& t) {
    const double rr = std::max(s.r, kRangeMin);
    const double sigma = effective_heading(s.lead_u);
    const double s_tu = std::sin(s.lead_u.theta);
    const double c_tu = std::cos(s.lead_u.theta);
    const double s_pu = std::sin(s.lead_u.psi);
    const double c_pu = std::cos(s.lead_u.psi);
    const double s_tt = std::sin(t.lead_t.theta);
    const double c_tt = std::cos(t.lead_t.theta);
    const double s_pt = std::sin(t.lead_t.psi);

    const bool psi_at_edge = std::fabs(std::fabs(s.lead_u.psi) - 0.5 * kPi) < 1e-12;
    const bool theta_at_edge = std::fabs(std::fabs(s.lead_u.theta) - 0.5 * kPi) < 1e-12;
    if (psi_at_edge && theta_at_edge) {
        return u.v_u / rr - t.v_t * s_tt / rr + u.omega_y;
    }
    if (theta_at_edge) {
        return u.v_u / rr - t.v_t * s_tt / rr + c_pu * u.omega_z + s_pu * u.omega_y;
    }
    if (psi_at_edge) {
        return u.v_u / rr - t.v_t * (c_tt * s_pt * c_tu + s_tu * s_tt) / rr + u.omega_y;
    }
    const double sin_sigma = std::sin(sigma);
    if (sin_sigma < 1e-12) {
        throw SimError(Err::UndefinedAtZeroSigma,
                       "sigma_dot_audit: effective heading rate undefined at sigma = 0 or pi");
    }
    return u.v_u * sin_sigma / rr -
           t.v_t * (c_tt * s_pt * c_tu * s_pu + s_tu * s_tt) / (rr * sin_sigma) +
           s_tu * c_pu * u.omega_z / sin_sigma + s_pu * u.omega_y / sin_sigma;
}

Scenario builtin_scenario(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.profile = builtin_profile(name);  // throws UnknownScenario
    sc.target_position = {40.0, 30.0, 20.0};
    sc.target_lead = {deg2rad(15.0), deg2rad(15.0)};
    if (name == "helix_v3" || name == "helix_v0") {
        sc.uav_position = {0.0, 10.0, 0.0};
        sc.uav_lead = {deg2rad(45.0), deg2rad(30.0)};  // theta_u 45, psi_u 30
        sc.envelope.v0 = (name == "helix_v0") ? 0.0 : 3.0;
    } else if (name == "scurve") {
        sc.uav_position = {100.0, 0.0, 0.0};
        sc.uav_lead = {deg2rad(45.0), deg2rad(45.0)};
    } else if (name == "timevarying") {
        sc.uav_position = {100.0, 0.0, 0.0};
        sc.uav_lead = {deg2rad(45.0), deg2rad(30.0)};  // theta_u 45, psi_u 30
    } else if (name == "straightline") {
        // Table-1 case S1; batch configs override per case
        sc.uav_position = {0.0, 0.0, 0.0};
        sc.uav_lead = {deg2rad(30.0), deg2rad(45.0)};  // theta_u 30, psi_u 45
        sc.t_end = 30.0;  // S3 starts 120 m out and needs ~21 s at the speed gap
    }
    return sc;
}

std::vector<std::string> builtin_scenario_names() {
    return {"helix_v3", "helix_v0", "scurve", "timevarying", "straightline"};
}

}  // namespace pfg
