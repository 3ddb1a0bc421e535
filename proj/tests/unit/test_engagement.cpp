#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "pfg/engagement.hpp"
#include "pfg/errors.hpp"

using namespace pfg;

TEST_CASE("matched pursuit equilibrium") {
    // all lead angles zero, V_T = V_U: relative geometry frozen
    EngagementState s;
    s.r = 100.0;
    s.los = {0.2, -0.4};
    s.lead_u = {0.0, 0.0};
    const UavInputs u{10.0, 0.3, -0.2};
    const ObservedTarget t{10.0, {0.0, 0.0}};
    const EngagementRates d = engagement_derivatives(s, u, t);
    CHECK(d.r_dot == 0.0);
    CHECK(d.theta_dot == 0.0);
    CHECK(d.psi_dot == 0.0);
    CHECK(d.theta_u_dot == doctest::Approx(u.omega_z));
    CHECK(d.psi_u_dot == doctest::Approx(u.omega_y));
}

TEST_CASE("static case") {
    EngagementState s;
    s.r = 50.0;
    s.los = {0.1, 0.7};
    s.lead_u = {deg2rad(40.0), deg2rad(-25.0)};
    const UavInputs u{0.0, 0.5, -0.7};
    const ObservedTarget t{0.0, {0.0, 0.0}};
    const EngagementRates d = engagement_derivatives(s, u, t);
    CHECK(d.r_dot == 0.0);
    CHECK(d.theta_dot == 0.0);
    CHECK(d.psi_dot == 0.0);
    CHECK(d.theta_u_dot == doctest::Approx(u.omega_z));
    CHECK(d.psi_u_dot == doctest::Approx(u.omega_y / std::cos(s.lead_u.theta)));
}

TEST_CASE("helix initial range rate") {
    // V_T=25 at (15,15) deg lead, V_U=14 at (45,30) deg lead:
    // rdot = 25 cos^2(15) - 14 cos(45) cos(30) = +14.7521 m/s
    EngagementState s;
    s.r = 48.98979485566356;
    s.los = {deg2rad(24.094842552110702), deg2rad(26.56505117707799)};
    s.lead_u = {deg2rad(45.0), deg2rad(30.0)};
    const UavInputs u{14.0, 0.0, 0.0};
    const ObservedTarget t{25.0, {deg2rad(15.0), deg2rad(15.0)}};
    const EngagementRates d = engagement_derivatives(s, u, t);
    CHECK(d.r_dot == doctest::Approx(14.75210344756436).epsilon(1e-12));

    // cross-check by finite-differencing the range over a 1e-4 s step of the
    // inertial positions
    const double h = 1e-4;
    const Vec3 p_t{40.0, 30.0, 20.0};
    const Vec3 p_u = reconstruct_uav_position(p_t, s);
    const Vec3 v_t = velocity_from_lead_angles(t.v_t, t.lead_t, s.los);
    const Vec3 v_u = velocity_from_lead_angles(u.v_u, s.lead_u, s.los);
    const double r1 = (p_t + h * v_t - (p_u + h * v_u)).norm();
    CHECK((r1 - s.r) / h == doctest::Approx(d.r_dot).epsilon(1e-4));
}

TEST_CASE("reconstruct uav position") {
    EngagementState s;
    s.r = 0.0;
    s.los = {0.3, 0.9};
    const Vec3 p_t{12.0, -3.0, 7.0};
    const Vec3 p = reconstruct_uav_position(p_t, s);
    CHECK(p.x == doctest::Approx(p_t.x));
    CHECK(p.y == doctest::Approx(p_t.y));
    CHECK(p.z == doctest::Approx(p_t.z));
}

TEST_CASE("reconstruct reproduces the initial geometry") {
    // target (40,30,20), UAV (0,10,0)
    const Vec3 p_u{0.0, 10.0, 0.0};
    const Vec3 p_t{40.0, 30.0, 20.0};
    const RangeLos rl = los_from_positions(p_u, p_t);
    EngagementState s;
    s.r = rl.r;
    s.los = rl.los;
    const Vec3 back = reconstruct_uav_position(p_t, s);
    CHECK(back.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(back.y == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(back.z == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("los_from_positions") {
    const RangeLos a = los_from_positions({0, 0, 0}, {1, 0, 0});
    CHECK(a.r == doctest::Approx(1.0));
    CHECK(a.los.theta == doctest::Approx(0.0));
    CHECK(a.los.psi == doctest::Approx(0.0));

    const RangeLos b = los_from_positions({0, 10, 0}, {40, 30, 20});
    CHECK(b.r == doctest::Approx(48.98979485566356).epsilon(1e-12));
    CHECK(rad2deg(b.los.theta) == doctest::Approx(24.094842552110702).epsilon(1e-12));
    CHECK(rad2deg(b.los.psi) == doctest::Approx(26.56505117707799).epsilon(1e-12));

    // vertical LOS: elevation clamped strictly inside (-pi/2, pi/2)
    const RangeLos c = los_from_positions({0, 0, 0}, {0, 0, 5});
    CHECK(c.r == doctest::Approx(5.0));
    CHECK(c.los.theta < 0.5 * kPi);
    CHECK(c.los.theta == doctest::Approx(0.5 * kPi).epsilon(1e-8));
    CHECK(c.los.psi == doctest::Approx(0.0));

    CHECK_THROWS_AS(los_from_positions({1, 2, 3}, {1, 2, 3}), SimError);
}

TEST_CASE("reconstruct/extract round trip") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        EngagementState s;
        s.r = 0.5 + 200.0 * std::fabs(u(rng));
        s.los = {1.4 * u(rng), kPi * 0.999 * u(rng)};
        const Vec3 p_t{100.0 * u(rng), 100.0 * u(rng), 100.0 * u(rng)};
        const Vec3 p_u = reconstruct_uav_position(p_t, s);
        CHECK((p_t - p_u).norm() == doctest::Approx(s.r).epsilon(1e-9));
        const RangeLos rl = los_from_positions(p_u, p_t);
        CHECK(rl.r == doctest::Approx(s.r).epsilon(1e-9));
        CHECK(rl.los.theta == doctest::Approx(s.los.theta).epsilon(1e-9));
        CHECK(rl.los.psi == doctest::Approx(s.los.psi).epsilon(1e-9));
    }
}

TEST_CASE("denominator guards clamp and flag") {
    EngagementState s;
    s.r = 0.05;  // below kRangeMin
    s.los = {0.5 * kPi - 1e-9, 0.0};
    s.lead_u = {0.5 * kPi - 1e-9, 0.2};
    const UavInputs u{10.0, 1.0, 1.0};
    const ObservedTarget t{5.0, {0.1, 0.1}};
    uint32_t flags = 0;
    const EngagementRates d = engagement_derivatives(s, u, t, &flags);
    CHECK((flags & guard::kRangeClamped) != 0);
    CHECK((flags & guard::kLosCosClamped) != 0);
    CHECK((flags & guard::kLeadCosClamped) != 0);
    CHECK(std::isfinite(d.r_dot));
    CHECK(std::isfinite(d.theta_dot));
    CHECK(std::isfinite(d.psi_dot));
    CHECK(std::isfinite(d.theta_u_dot));
    CHECK(std::isfinite(d.psi_u_dot));
}

namespace {

// Fixed-input dual integration: route A evolves (r, theta, psi, theta_u,
// psi_u) by the relative-motion equations; route B evolves both inertial
// positions plus the same lead-angle equations. The extracted geometry must
// agree.
struct RouteA {
    std::array<double, 5> s;
};
struct RouteB {
    std::array<double, 8> s;  // p_u, p_t, theta_u, psi_u
};

}  // namespace

TEST_CASE("dual-integration consistency, fixed inputs") {
    const UavInputs inputs{14.0, 0.13, -0.21};
    const Vec3 v_target{20.0, 6.0, 4.0};  // constant target velocity

    const Vec3 p_u0{0.0, 10.0, 0.0};
    const Vec3 p_t0{40.0, 30.0, 20.0};
    const RangeLos rl0 = los_from_positions(p_u0, p_t0);

    RouteA a{{rl0.r, rl0.los.theta, rl0.los.psi, deg2rad(45.0), deg2rad(30.0)}};
    RouteB b{{p_u0.x, p_u0.y, p_u0.z, p_t0.x, p_t0.y, p_t0.z, deg2rad(45.0), deg2rad(30.0)}};

    const auto rates_at = [&](double r, const LosAngles& los, const LeadAngles& lead) {
        const LeadDecomposition obs = lead_angles_from_velocity(v_target, los);
        EngagementState st;
        st.r = r;
        st.los = los;
        st.lead_u = lead;
        return engagement_derivatives(st, inputs, {obs.speed, obs.lead}, nullptr);
    };
    const auto fa = [&](const std::array<double, 5>& s) {
        const EngagementRates d = rates_at(s[0], {s[1], s[2]}, {s[3], s[4]});
        return std::array<double, 5>{d.r_dot, d.theta_dot, d.psi_dot, d.theta_u_dot, d.psi_u_dot};
    };
    const auto fb = [&](const std::array<double, 8>& s) {
        const Vec3 p_u{s[0], s[1], s[2]};
        const Vec3 p_t{s[3], s[4], s[5]};
        const RangeLos rl = los_from_positions(p_u, p_t);
        const LeadAngles lead{s[6], s[7]};
        const EngagementRates d = rates_at(rl.r, rl.los, lead);
        const Vec3 v_u = velocity_from_lead_angles(inputs.v_u, lead, rl.los);
        return std::array<double, 8>{v_u.x,      v_u.y,      v_u.z,      v_target.x,
                                     v_target.y, v_target.z, d.theta_u_dot, d.psi_u_dot};
    };
    const auto rk4 = [](auto& state, const auto& f, double h) {
        const auto k1 = f(state);
        auto s2 = state;
        for (size_t i = 0; i < state.size(); ++i) s2[i] = state[i] + 0.5 * h * k1[i];
        const auto k2 = f(s2);
        for (size_t i = 0; i < state.size(); ++i) s2[i] = state[i] + 0.5 * h * k2[i];
        const auto k3 = f(s2);
        for (size_t i = 0; i < state.size(); ++i) s2[i] = state[i] + h * k3[i];
        const auto k4 = f(s2);
        for (size_t i = 0; i < state.size(); ++i) {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    };

    const double dt = 1e-3;
    double max_err = 0.0;
    for (int i = 0; i < 2000; ++i) {
        rk4(a.s, fa, dt);
        rk4(b.s, fb, dt);
        const RangeLos rl = los_from_positions({b.s[0], b.s[1], b.s[2]}, {b.s[3], b.s[4], b.s[5]});
        max_err = std::max(max_err, std::fabs(a.s[0] - rl.r));
        max_err = std::max(max_err, std::fabs(a.s[1] - rl.los.theta));
        max_err = std::max(max_err, std::fabs(a.s[2] - rl.los.psi));
        max_err = std::max(max_err, std::fabs(a.s[3] - b.s[6]));
        max_err = std::max(max_err, std::fabs(a.s[4] - b.s[7]));
    }
    CHECK(max_err < 1e-9);
}
