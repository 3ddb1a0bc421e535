#pragma once

#include <utility>

#include "pfg/math3.hpp"

namespace pfg {

// Asymmetric speed limits V0 <= V_U < V_max, handled through the shifted
// coordinate U = V_U - (V0 + V_max)/2 so the saturation model sees a
// symmetric bound U_max = (V_max - V0)/2.
struct SpeedEnvelope {
    double v0 = 3.0;     // m/s, minimum speed
    double v_max = 25.0; // m/s, maximum speed

    friend bool operator==(const SpeedEnvelope&, const SpeedEnvelope&) = default;

    double u_max() const { return 0.5 * (v_max - v0); }
    double shift() const { return 0.5 * (v_max + v0); }
};

// Gains and exponent of the two saturation models. gamma must be a positive
// even integer so (state/max)^gamma is sign-symmetric.
struct SatParams {
    double k1 = 1.0;
    double k2 = 0.5;
    double k3 = 1.0;
    double k4 = 0.5;
    int gamma = 2;

    friend bool operator==(const SatParams&, const SatParams&) = default;
};

// Saturation-model internal states; outputs equal states identically.
struct ActuatorState {
    double u = 0.0;        // m/s, shifted speed
    double omega_y = 0.0;  // rad/s
    double omega_z = 0.0;  // rad/s
};

// udot = K1 [1 - (u/u_max)^gamma] u_cmd - K1 K2 u. The state is clamped to
// +-(u_max - 1e-12) before exponentiation.
double speed_sat_derivative(double u, double u_cmd, const SatParams& p, const SpeedEnvelope& env);

// Per-channel angular-rate model: K3 (1 - (w/w_max)^gamma) w_cmd - K3 K4 w.
double omega_sat_derivative_channel(double omega, double omega_cmd, const SatParams& p,
                                    double omega_max);

// Both channels (y, z) of the diagonal form (I2 - F) K3 cmd - K3 K4 state.
std::pair<double, double> omega_sat_derivative(std::pair<double, double> omega,
                                               std::pair<double, double> omega_cmd,
                                               const SatParams& p, double omega_max);

inline double unshift_speed(double u, const SpeedEnvelope& env) { return u + env.shift(); }
inline double shift_speed(double v_u, const SpeedEnvelope& env) { return v_u - env.shift(); }

// Strict interior bound of the model state for commands bounded by xi:
// delta_M = limit * (xi / (xi + k2 * limit))^(1/gamma) < limit.
double sat_interior_bound(double xi, double k2, double limit, int gamma);

}  // namespace pfg
