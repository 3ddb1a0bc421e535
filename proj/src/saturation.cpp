#include "pfg/saturation.hpp"

#include <cmath>

namespace pfg {

namespace {

// Clamp the model state just inside its bound before exponentiation so the
// bracket 1 - (s/max)^gamma cannot go negative from roundoff.
double clamped_ratio(double state, double limit) {
    const double edge = limit - 1e-12;
    return std::clamp(state, -edge, edge) / limit;
}

}  // namespace

double speed_sat_derivative(double u, double u_cmd, const SatParams& p, const SpeedEnvelope& env) {
    const double ratio = clamped_ratio(u, env.u_max());
    const double bracket = 1.0 - int_pow(ratio, p.gamma);
    return p.k1 * bracket * u_cmd - p.k1 * p.k2 * u;
}

double omega_sat_derivative_channel(double omega, double omega_cmd, const SatParams& p,
                                    double omega_max) {
    const double ratio = clamped_ratio(omega, omega_max);
    const double bracket = 1.0 - int_pow(ratio, p.gamma);
    return p.k3 * bracket * omega_cmd - p.k3 * p.k4 * omega;
}

std::pair<double, double> omega_sat_derivative(std::pair<double, double> omega,
                                               std::pair<double, double> omega_cmd,
                                               const SatParams& p, double omega_max) {
    return {omega_sat_derivative_channel(omega.first, omega_cmd.first, p, omega_max),
            omega_sat_derivative_channel(omega.second, omega_cmd.second, p, omega_max)};
}

double sat_interior_bound(double xi, double k2, double limit, int gamma) {
    return limit * std::pow(xi / (xi + k2 * limit), 1.0 / gamma);
}

}  // namespace pfg
