#include "pfg/guidance.hpp"

#include <cmath>

namespace pfg {

SettlingBounds settling_bounds(const GuidanceParams& p) {
    const auto bound = [](double m, double n, double alpha, double beta) {
        const double m_bar = std::pow(2.0, 1.0 - alpha) * m;
        return 1.0 / (m_bar * (alpha - 1.0)) + 1.0 / (n * (1.0 - beta));
    };
    SettlingBounds out;
    out.t1 = bound(p.m1, p.n1, p.alpha1, p.beta1);
    out.t2 = bound(p.m2, p.n2, p.alpha2, p.beta2);
    out.t3 = bound(p.m3, p.n3, p.alpha3, p.beta3);
    return out;
}

double estimate_aux_derivative(AuxDiff& mem, double current, double dt) {
    double d = 0.0;
    if (mem.warm >= 2) {
        d = (3.0 * current - 4.0 * mem.prev + mem.prev2) / (2.0 * dt);
    } else if (mem.warm == 1) {
        d = (current - mem.prev) / dt;
    }
    mem.prev2 = mem.prev;
    mem.prev = current;
    if (mem.warm < 2) {
        ++mem.warm;
    }
    return d;
}

LosRates los_rates(const EngagementState& s, double v_u, const ObservedTarget& t,
                   uint32_t* flags) {
    const double rr = std::max(s.r, kRangeMin);
    if (s.r < kRangeMin && flags != nullptr) {
        *flags |= guard::kRangeClamped;
    }
    const double c_th = guarded_cos(std::cos(s.los.theta), guard::kLosCosClamped, flags);
    LosRates out;
    out.theta_dot = (t.v_t * std::sin(t.lead_t.theta) - v_u * std::sin(s.lead_u.theta)) / rr;
    out.psi_dot = (t.v_t * std::cos(t.lead_t.theta) * std::sin(t.lead_t.psi) -
                   v_u * std::cos(s.lead_u.theta) * std::sin(s.lead_u.psi)) /
                  (rr * c_th);
    return out;
}

double chi(const EngagementState& s, const ObservedTarget& t, const SpeedEnvelope& env,
           const GuidanceParams& p) {
    const double cc_u = std::cos(s.lead_u.theta) * std::cos(s.lead_u.psi);
    const double r = std::max(s.r, 0.0);
    const double closure = p.m1 * std::pow(r, p.alpha1) + p.n1 * std::pow(r, p.beta1);
    return (t.v_t * std::cos(t.lead_t.theta) * std::cos(t.lead_t.psi) -
            (env.u_max() + env.v0) * cc_u + closure) /
           cc_u;
}

double commanded_speed(double u, double chi_val, double chi_dot, const EngagementState& s,
                       const GuidanceParams& p, const SatParams& sat, const SpeedEnvelope& env) {
    const double x = u - chi_val;
    const double cc_u = std::cos(s.lead_u.theta) * std::cos(s.lead_u.psi);
    const double u_max = env.u_max();
    const double ratio = std::clamp(u, -(u_max - 1e-12), u_max - 1e-12) / u_max;
    const double bracket = 1.0 - int_pow(ratio, sat.gamma);
    const double num = sat.k1 * sat.k2 * u + chi_dot + std::fabs(x) * cc_u -
                       (p.m1 * signed_pow(x, p.alpha1) + p.n1 * signed_pow(x, p.beta1));
    return num / (sat.k1 * bracket);
}

double eta(const EngagementState& s, const LosRates& rates, const GuidanceParams& p) {
    return rates.psi_dot * std::sin(s.los.theta) * std::sin(s.lead_u.psi) +
           rates.theta_dot * std::cos(s.lead_u.psi) -
           (p.m2 * signed_pow(s.lead_u.theta, p.alpha2) +
            p.n2 * signed_pow(s.lead_u.theta, p.beta2));
}

double commanded_pitch_rate(double omega_z, double eta_val, double eta_dot,
                            const EngagementState& s, const GuidanceParams& p,
                            const SatParams& sat, double omega_max) {
    const double z = omega_z - eta_val;
    const double ratio = std::clamp(omega_z, -(omega_max - 1e-12), omega_max - 1e-12) / omega_max;
    const double f_z = int_pow(ratio, sat.gamma);
    const double num = sat.k3 * sat.k4 * omega_z + eta_dot - std::fabs(z) * sgn(s.lead_u.theta) -
                       (p.m2 * signed_pow(z, p.alpha2) + p.n2 * signed_pow(z, p.beta2));
    return num / (sat.k3 * (1.0 - f_z));
}

double lambda_aux(const EngagementState& s, const LosRates& rates, const GuidanceParams& p) {
    const double c_tu = std::cos(s.lead_u.theta);
    const double tan_tu = std::sin(s.lead_u.theta) / c_tu;
    return -c_tu * (rates.psi_dot * tan_tu * std::cos(s.lead_u.psi) * std::sin(s.los.theta) -
                    rates.psi_dot * std::cos(s.los.theta) -
                    rates.theta_dot * tan_tu * std::sin(s.lead_u.psi) +
                    (p.m3 * signed_pow(s.lead_u.psi, p.alpha3) +
                     p.n3 * signed_pow(s.lead_u.psi, p.beta3)));
}

double commanded_yaw_rate(double omega_y, double lambda_val, double lambda_dot,
                          const EngagementState& s, const GuidanceParams& p, const SatParams& sat,
                          double omega_max) {
    const double y = omega_y - lambda_val;
    const double c_tu = std::cos(s.lead_u.theta);
    const double ratio = std::clamp(omega_y, -(omega_max - 1e-12), omega_max - 1e-12) / omega_max;
    const double f_y = int_pow(ratio, sat.gamma);
    const double num = sat.k3 * sat.k4 * omega_y + lambda_dot -
                       std::fabs(y) * sgn(s.lead_u.psi) / c_tu -
                       (p.m3 * signed_pow(y, p.alpha3) + p.n3 * signed_pow(y, p.beta3));
    return num / (sat.k3 * (1.0 - f_y));
}

namespace {

double limit_cmd(double cmd, double limit, uint32_t flag, uint32_t* flags) {
    if (std::fabs(cmd) > limit) {
        *flags |= flag;
        return std::copysign(limit, cmd);
    }
    return cmd;
}

}  // namespace

GuidanceCommand compute_command(const EngagementState& s, const ObservedTarget& t,
                                const ActuatorState& act, const SpeedEnvelope& env,
                                const SatParams& sat, const GuidanceParams& p, double omega_max,
                                double dt, GuidanceMemory& mem, const GuidanceCommand& prev) {
    GuidanceCommand cmd;
    const double v_u = unshift_speed(act.u, env);
    const LosRates rates = los_rates(s, v_u, t, &cmd.flags);

    const double cc_u = std::cos(s.lead_u.theta) * std::cos(s.lead_u.psi);
    cmd.sigma_u = effective_heading(s.lead_u);

    // speed channel
    if (std::fabs(cc_u) <= kEpsSigma) {
        // hold-last-command policy; chi memory is left untouched this step
        cmd.flags |= guard::kSigmaSingularity;
        cmd.u_cmd = prev.u_cmd;
        cmd.chi = prev.chi;
    } else {
        cmd.chi = chi(s, t, env, p);
        const double chi_dot = estimate_aux_derivative(mem.chi, cmd.chi, dt);
        const double u_max = env.u_max();
        const double ratio = std::clamp(act.u, -(u_max - 1e-12), u_max - 1e-12) / u_max;
        if (1.0 - int_pow(ratio, sat.gamma) <= kEpsDen) {
            cmd.flags |= guard::kSpeedSatDen;
            cmd.u_cmd = prev.u_cmd;
        } else {
            cmd.u_cmd = commanded_speed(act.u, cmd.chi, chi_dot, s, p, sat, env);
            cmd.u_cmd = limit_cmd(cmd.u_cmd, p.cmd_limit_speed, guard::kSpeedCmdLimited,
                                  &cmd.flags);
        }
    }
    cmd.x = act.u - cmd.chi;

    // pitch channel (omega_z regulates theta_u)
    cmd.eta = eta(s, rates, p);
    cmd.z = act.omega_z - cmd.eta;
    const double eta_dot = estimate_aux_derivative(mem.eta, cmd.eta, dt);
    {
        const double ratio =
            std::clamp(act.omega_z, -(omega_max - 1e-12), omega_max - 1e-12) / omega_max;
        if (1.0 - int_pow(ratio, sat.gamma) <= kEpsDen) {
            cmd.flags |= guard::kPitchSatDen;
            cmd.omega_z_cmd = prev.omega_z_cmd;
        } else {
            cmd.omega_z_cmd = commanded_pitch_rate(act.omega_z, cmd.eta, eta_dot, s, p, sat,
                                                   omega_max);
            cmd.omega_z_cmd = limit_cmd(cmd.omega_z_cmd, p.cmd_limit_omega,
                                        guard::kPitchCmdLimited, &cmd.flags);
        }
    }

    // yaw channel (omega_y regulates psi_u)
    if (std::fabs(std::cos(s.lead_u.theta)) <= kEpsDen) {
        cmd.flags |= guard::kThetaUSingularity;
        cmd.omega_y_cmd = prev.omega_y_cmd;
        cmd.lambda = prev.lambda;
    } else {
        cmd.lambda = lambda_aux(s, rates, p);
        const double lambda_dot = estimate_aux_derivative(mem.lambda, cmd.lambda, dt);
        const double ratio =
            std::clamp(act.omega_y, -(omega_max - 1e-12), omega_max - 1e-12) / omega_max;
        if (1.0 - int_pow(ratio, sat.gamma) <= kEpsDen) {
            cmd.flags |= guard::kYawSatDen;
            cmd.omega_y_cmd = prev.omega_y_cmd;
        } else {
            cmd.omega_y_cmd = commanded_yaw_rate(act.omega_y, cmd.lambda, lambda_dot, s, p, sat,
                                                 omega_max);
            cmd.omega_y_cmd = limit_cmd(cmd.omega_y_cmd, p.cmd_limit_omega,
                                        guard::kYawCmdLimited, &cmd.flags);
        }
    }
    cmd.y = act.omega_y - cmd.lambda;

    return cmd;
}

}  // namespace pfg
