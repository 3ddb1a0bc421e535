#pragma once

#include <cstdint>

#include "pfg/engagement.hpp"
#include "pfg/saturation.hpp"

namespace pfg {

// Fixed-time design constants of the three channels (range, pitch, yaw).
// Requires m_i, n_i > 0, alpha_i > 1, 0 < beta_i < 1.
//
// cmd_limit_* bound the commanded magnitudes. The commanded laws divide by
// the saturation bracket, so an unbounded command voids the bounded-command
// premise of the confinement guarantee and drives the fixed-step integrator
// out of its stability region when an actuator rides its limit.
struct GuidanceParams {
    double m1 = 0.1;
    double n1 = 0.3;
    double alpha1 = 1.01;
    double beta1 = 0.99;
    double m2 = 10.0;
    double n2 = 2.0;
    double alpha2 = 1.01;
    double beta2 = 0.99;
    double m3 = 10.0;
    double n3 = 2.0;
    double alpha3 = 1.01;
    double beta3 = 0.99;
    double cmd_limit_speed = 5000.0;  // m/s
    double cmd_limit_omega = 1000.0;  // rad/s

    friend bool operator==(const GuidanceParams&, const GuidanceParams&) = default;
};

struct SettlingBounds {
    double t1 = 0.0;  // s, range channel
    double t2 = 0.0;  // s, pitch channel
    double t3 = 0.0;  // s, yaw channel

    friend bool operator==(const SettlingBounds&, const SettlingBounds&) = default;
};

// T_i <= 1/(Mbar_i (alpha_i - 1)) + 1/(N_i (1 - beta_i)), Mbar_i = 2^(1-alpha_i) M_i.
SettlingBounds settling_bounds(const GuidanceParams& p);

// Backward-difference memory for one auxiliary signal. warm counts samples
// seen: 0 -> derivative 0, 1 -> first-order, >=2 -> second-order.
struct AuxDiff {
    double prev = 0.0;
    double prev2 = 0.0;
    int warm = 0;
};

// Second-order backward difference at the control rate; updates the memory.
double estimate_aux_derivative(AuxDiff& mem, double current, double dt);

// Memory for the three auxiliary controls; single-writer per simulation run.
struct GuidanceMemory {
    AuxDiff chi;
    AuxDiff eta;
    AuxDiff lambda;
};

struct LosRates {
    double theta_dot = 0.0;  // rad/s
    double psi_dot = 0.0;    // rad/s
};

// LOS rates from the relative-velocity equations; this (not the target's turn
// rates) is all the guidance sees of the engagement geometry evolution.
LosRates los_rates(const EngagementState& s, double v_u, const ObservedTarget& t,
                   uint32_t* flags = nullptr);

// Auxiliary speed control
// chi = [V_T c_tT c_pT - (U_max + V0) c_tU c_pU + M1 r^a1 + N1 r^b1] / (c_tU c_pU).
// Caller must guard |cos(theta_u) cos(psi_u)| > kEpsSigma.
double chi(const EngagementState& s, const ObservedTarget& t, const SpeedEnvelope& env,
           const GuidanceParams& p);

// Commanded shifted speed, x = u - chi:
// U^c = [K1 K2 u + chi_dot + |x| c_tU c_pU - (M1 x^a1 + N1 x^b1)] / (K1 [1 - (u/u_max)^g]).
// Caller must guard the bracket > kEpsDen; signed powers of x.
double commanded_speed(double u, double chi_val, double chi_dot, const EngagementState& s,
                       const GuidanceParams& p, const SatParams& sat, const SpeedEnvelope& env);

// Auxiliary pitch control
// eta = psi_dot sin(theta) sin(psi_u) + theta_dot cos(psi_u) - (M2 theta_u^a2 + N2 theta_u^b2).
double eta(const EngagementState& s, const LosRates& rates, const GuidanceParams& p);

// Commanded pitch rate, z = omega_z - eta:
// w^zc = [K3 K4 w_z + eta_dot - |z| sign(theta_u) - (M2 z^a2 + N2 z^b2)] / (K3 (1 - f_z)).
double commanded_pitch_rate(double omega_z, double eta_val, double eta_dot,
                            const EngagementState& s, const GuidanceParams& p,
                            const SatParams& sat, double omega_max);

// Auxiliary yaw control
// lambda = -cos(theta_u) [psi_dot tan(theta_u) cos(psi_u) sin(theta) - psi_dot cos(theta)
//                         - theta_dot tan(theta_u) sin(psi_u) + (M3 psi_u^a3 + N3 psi_u^b3)].
// Caller must guard |cos(theta_u)| > kEpsDen.
double lambda_aux(const EngagementState& s, const LosRates& rates, const GuidanceParams& p);

// Commanded yaw rate, y = omega_y - lambda:
// w^yc = [K3 K4 w_y + lambda_dot - |y| sign(psi_u)/cos(theta_u) - (M3 y^a3 + N3 y^b3)] / (K3 (1 - f_y)).
double commanded_yaw_rate(double omega_y, double lambda_val, double lambda_dot,
                          const EngagementState& s, const GuidanceParams& p, const SatParams& sat,
                          double omega_max);

// One guidance-computer cycle: the three commands plus diagnostics.
// On a singularity/denominator guard trip the affected channel holds the
// previous command for this step (zero-order hold) and the trip is flagged.
struct GuidanceCommand {
    double u_cmd = 0.0;        // m/s (shifted-speed command)
    double omega_y_cmd = 0.0;  // rad/s
    double omega_z_cmd = 0.0;  // rad/s
    // diagnostics
    double chi = 0.0;
    double eta = 0.0;
    double lambda = 0.0;
    double x = 0.0;  // u - chi
    double y = 0.0;  // omega_y - lambda
    double z = 0.0;  // omega_z - eta
    double sigma_u = 0.0;
    uint32_t flags = 0;
};

GuidanceCommand compute_command(const EngagementState& s, const ObservedTarget& t,
                                const ActuatorState& act, const SpeedEnvelope& env,
                                const SatParams& sat, const GuidanceParams& p, double omega_max,
                                double dt, GuidanceMemory& mem, const GuidanceCommand& prev);

}  // namespace pfg
