#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "pfg/engagement.hpp"
#include "pfg/errors.hpp"
#include "pfg/targets.hpp"

using namespace pfg;

TEST_CASE("builtin profiles") {
    const TargetProfile helix = builtin_profile("helix_v3");
    CHECK(helix.speed_at(0.0) == doctest::Approx(25.0));
    CHECK(helix.omega_y_at(1.3) == doctest::Approx(std::sin(1.3)));
    CHECK(helix.omega_z_at(1.3) == doctest::Approx(std::cos(1.3)));
    CHECK(builtin_profile("helix_v0").speed_at(5.0) == doctest::Approx(25.0));

    const TargetProfile sc = builtin_profile("scurve");
    CHECK(sc.speed_at(7.0) == doctest::Approx(15.0));
    CHECK(sc.omega_y_at(0.0) == doctest::Approx(0.2));
    CHECK(sc.omega_y_at(4.999) == doctest::Approx(0.2));
    CHECK(sc.omega_y_at(5.0) == doctest::Approx(-0.2));   // left-closed intervals
    CHECK(sc.omega_z_at(12.0) == doctest::Approx(0.2));
    CHECK(sc.omega_z_at(19.0) == doctest::Approx(-0.2));
    CHECK(sc.omega_z_at(25.0) == doctest::Approx(-0.2));  // last value holds

    const TargetProfile tv = builtin_profile("timevarying");
    CHECK(tv.speed_at(0.0) == doctest::Approx(0.0));
    CHECK(tv.speed_at(1.5) == doctest::Approx(13.147124139259873).epsilon(1e-12));
    CHECK(tv.omega_y_at(2.0) == doctest::Approx(0.2));

    const TargetProfile sl = builtin_profile("straightline");
    CHECK(sl.speed_at(3.0) == doctest::Approx(15.0));
    CHECK(sl.omega_y_at(3.0) == 0.0);
    CHECK(sl.omega_z_at(3.0) == 0.0);

    CHECK_THROWS_AS(builtin_profile("loop_the_loop"), SimError);
}

TEST_CASE("speed consistency |p_dot| = V_T") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const char* name : {"helix_v3", "scurve", "timevarying", "straightline"}) {
        const TargetProfile p = builtin_profile(name);
        for (int i = 0; i < 50; ++i) {
            TargetState ts;
            ts.position = {10.0 * u(rng), 10.0 * u(rng), 10.0 * u(rng)};
            ts.heading_az = kPi * u(rng);
            ts.heading_el = 1.2 * u(rng);
            const double t = 10.0 * std::fabs(u(rng));
            const TargetRates d = target_derivatives(ts, p, t);
            CHECK(d.p_dot.norm() == doctest::Approx(p.speed_at(t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("straight line stays on its initial line") {
    const TargetProfile p = builtin_profile("straightline");
    TargetState ts;
    ts.position = {40.0, 30.0, 20.0};
    ts.heading_az = deg2rad(40.0);
    ts.heading_el = deg2rad(20.0);
    const Vec3 p0 = ts.position;
    const Vec3 dir = target_velocity(ts, p, 0.0) * (1.0 / 15.0);
    const double dt = 1e-3;
    double max_off = 0.0;
    double t = 0.0;
    for (int i = 0; i < 20000; ++i) {
        // RK4 on (position, heading); omegas are zero so heading is constant
        const TargetRates k1 = target_derivatives(ts, p, t);
        TargetState mid = ts;
        mid.position += 0.5 * dt * k1.p_dot;
        const TargetRates k2 = target_derivatives(mid, p, t + 0.5 * dt);
        mid.position = ts.position + 0.5 * dt * k2.p_dot;
        const TargetRates k3 = target_derivatives(mid, p, t + 0.5 * dt);
        mid.position = ts.position + dt * k3.p_dot;
        const TargetRates k4 = target_derivatives(mid, p, t + dt);
        ts.position += dt / 6.0 * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
        t += dt;
        const Vec3 rel = ts.position - p0;
        const Vec3 off = rel - rel.dot(dir) * dir;
        max_off = std::max(max_off, off.norm());
    }
    CHECK(max_off < 1e-6);
}

TEST_CASE("observed target") {
    const TargetProfile p = builtin_profile("straightline");
    TargetState ts;
    ts.position = {100.0, 0.0, 0.0};
    ts.heading_az = deg2rad(30.0);
    ts.heading_el = deg2rad(10.0);
    // LOS aligned with the velocity: zero lead angles
    const Vec3 v = target_velocity(ts, p, 0.0);
    const RangeLos rl = los_from_positions({0, 0, 0}, {v.x, v.y, v.z});
    const ObservedTarget along = observed_target(ts, p, 0.0, rl.los);
    CHECK(along.v_t == doctest::Approx(15.0));
    CHECK(along.lead_t.theta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(along.lead_t.psi == doctest::Approx(0.0).epsilon(1e-12));

    // stationary target: zero speed, zero lead by convention
    TargetProfile stopped;
    stopped.kind = ProfileKind::Constant;
    stopped.speed = 0.0;
    const ObservedTarget none = observed_target(ts, stopped, 0.0, rl.los);
    CHECK(none.v_t == 0.0);
    CHECK(none.lead_t.theta == 0.0);
    CHECK(none.lead_t.psi == 0.0);
}

TEST_CASE("initial heading composition reproduces the stated lead angles") {
    // target at (40,30,20) seen from the UAV at (0,10,0) with lead (15,15) deg
    const RangeLos rl = los_from_positions({0, 10, 0}, {40, 30, 20});
    const LeadAngles want{deg2rad(15.0), deg2rad(15.0)};
    const Vec3 dir = velocity_from_lead_angles(1.0, want, rl.los);
    TargetState ts;
    ts.position = {40, 30, 20};
    ts.heading_el = std::asin(dir.z);
    ts.heading_az = std::atan2(dir.y, dir.x);
    const ObservedTarget obs = observed_target(ts, builtin_profile("helix_v3"), 0.0, rl.los);
    CHECK(obs.v_t == doctest::Approx(25.0));
    CHECK(obs.lead_t.theta == doctest::Approx(want.theta).epsilon(1e-12));
    CHECK(obs.lead_t.psi == doctest::Approx(want.psi).epsilon(1e-12));
}

TEST_CASE("observed lead angles keep cos(sigma) in range") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const TargetProfile p = builtin_profile("helix_v3");
    for (int i = 0; i < 200; ++i) {
        TargetState ts;
        ts.heading_az = kPi * u(rng);
        ts.heading_el = 1.3 * u(rng);
        const LosAngles los{1.4 * u(rng), kPi * u(rng)};
        const ObservedTarget obs = observed_target(ts, p, 5.0 * std::fabs(u(rng)), los);
        const double c = std::cos(obs.lead_t.psi) * std::cos(obs.lead_t.theta);
        CHECK(c <= 1.0 + 1e-12);
        CHECK(c >= -1.0 - 1e-12);
    }
}

TEST_CASE("vertical heading guard") {
    TargetState ts;
    ts.heading_el = 0.5 * kPi - 1e-9;
    uint32_t flags = 0;
    const TargetRates d = target_derivatives(ts, builtin_profile("scurve"), 1.0, &flags);
    CHECK((flags & guard::kVerticalHeading) != 0);
    CHECK(std::isfinite(d.heading_az_dot));
}

TEST_CASE("table profile") {
    const char* path = "pfg_test_table.csv";
    {
        std::ofstream f(path);
        f << "t,V_T,omega_y,omega_z\n";
        f << "0.0, 10.0, 0.1, -0.1\n";
        f << "1.0, 20.0, 0.3, 0.1\n";
        f << "3.0, 20.0, 0.3, 0.1\n";
    }
    const TargetProfile p = load_table_profile(path);
    CHECK(p.kind == ProfileKind::Table);
    CHECK(p.speed_at(0.0) == doctest::Approx(10.0));
    CHECK(p.speed_at(0.5) == doctest::Approx(15.0));  // linear interpolation
    CHECK(p.omega_y_at(0.5) == doctest::Approx(0.2));
    CHECK(p.speed_at(99.0) == doctest::Approx(20.0));  // clamped past the last row
    CHECK(p.omega_z_at(-1.0) == doctest::Approx(-0.1));
    std::remove(path);

    CHECK_THROWS_AS(load_table_profile("no_such_file.csv"), SimError);

    {
        std::ofstream f(path);
        f << "0.0, 10.0, 0.1\n";  // missing column
    }
    CHECK_THROWS_AS(load_table_profile(path), SimError);
    std::remove(path);
}
