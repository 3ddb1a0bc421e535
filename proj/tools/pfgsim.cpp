// pfgsim: bounded-input fixed-time path-following guidance simulator CLI.
//
// Exit codes: 0 ok, 1 runtime error, 2 usage/config error, 3 verification failure.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pfg/errors.hpp"
#include "pfg/scenario_io.hpp"
#include "pfg/simulator.hpp"

namespace fs = std::filesystem;

namespace {

struct CaseResult {
    std::string name;
    pfg::RunMetrics metrics;
    bool bounds_ok = false;
    std::string error;
};

// Platform-stable uniform double in [0, 1) from splitmix64.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

bool input_bounds_ok(const pfg::Trajectory& traj, const pfg::Scenario& sc) {
    for (const pfg::Sample& s : traj.samples) {
        if (!(s.v_u > sc.envelope.v0 && s.v_u < sc.envelope.v_max)) {
            return false;
        }
        if (!(std::fabs(s.omega_y) < sc.omega_max && std::fabs(s.omega_z) < sc.omega_max)) {
            return false;
        }
    }
    return true;
}

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) {
        return "none";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

void write_case_outputs(const pfg::ConfigDocument& cfg, const std::string& name,
                        const pfg::Scenario& sc, const pfg::RunResult& result,
                        const std::string& out_dir) {
    fs::create_directories(out_dir);
    pfg::write_trajectory_csv(result.trajectory, out_dir + "/" + name + ".csv");
    pfg::MetricsDocument doc;
    doc.metrics = result.metrics;
    doc.config_hash = pfg::config_hash(cfg);
    doc.dt = sc.dt;
    doc.code_version = pfg::kCodeVersion;
    pfg::write_metrics_json(doc, out_dir + "/" + name + ".metrics.json");
}

void print_metrics(const std::string& name, const pfg::RunMetrics& m, bool bounds_ok) {
    std::printf("%-12s t_angle=%-8s t_range=%-8s V_U=[%.4f,%.4f] |w_y|max=%.4f |w_z|max=%.4f "
                "track_err=%s bounds=%s\n",
                name.c_str(), fmt_opt(m.t_angle_conv).c_str(), fmt_opt(m.t_range_conv).c_str(),
                m.v_u_min, m.v_u_max, m.max_abs_omega_y, m.max_abs_omega_z,
                fmt_opt(m.tracking_error).c_str(), bounds_ok ? "ok" : "VIOLATED");
}

int cmd_run(const std::string& config_path, const std::string& out_dir_cli) {
    pfg::ConfigDocument cfg = pfg::load_config(config_path);
    const std::string out_dir = out_dir_cli.empty() ? cfg.out_dir : out_dir_cli;
    const pfg::RunResult result = pfg::run(cfg.scenario);
    write_case_outputs(cfg, cfg.scenario.name, cfg.scenario, result, out_dir);
    print_metrics(cfg.scenario.name, result.metrics, input_bounds_ok(result.trajectory,
                                                                     cfg.scenario));
    std::printf("wrote %s/%s.csv (%zu rows)\n", out_dir.c_str(), cfg.scenario.name.c_str(),
                result.trajectory.samples.size());
    return 0;
}

std::vector<std::pair<std::string, pfg::Scenario>> expand_batch(const pfg::ConfigDocument& cfg) {
    std::vector<std::pair<std::string, pfg::Scenario>> cases;
    for (const pfg::BatchCase& bc : cfg.batch_cases) {
        pfg::Scenario sc = cfg.scenario;
        sc.name = bc.name;
        if (bc.uav_position) sc.uav_position = *bc.uav_position;
        if (bc.uav_azimuth_lead) sc.uav_lead.psi = *bc.uav_azimuth_lead;
        if (bc.uav_elevation_lead) sc.uav_lead.theta = *bc.uav_elevation_lead;
        if (bc.t_end) sc.t_end = *bc.t_end;
        cases.emplace_back(bc.name, sc);
    }
    if (cfg.random_sweep) {
        const pfg::RandomSweep& rs = *cfg.random_sweep;
        SplitMix64 rng(cfg.seed);
        for (int i = 0; i < rs.count; ++i) {
            pfg::Scenario sc = cfg.scenario;
            char name[32];
            std::snprintf(name, sizeof name, "rnd%03d", i);
            sc.name = name;
            sc.uav_position = {rng.uniform(rs.position_min.x, rs.position_max.x),
                               rng.uniform(rs.position_min.y, rs.position_max.y),
                               rng.uniform(rs.position_min.z, rs.position_max.z)};
            sc.uav_lead.psi = rng.uniform(-rs.lead_max, rs.lead_max);
            sc.uav_lead.theta = rng.uniform(-rs.lead_max, rs.lead_max);
            if (rs.t_end) sc.t_end = *rs.t_end;
            cases.emplace_back(sc.name, sc);
        }
    }
    return cases;
}

int cmd_batch(const std::string& config_path, const std::string& out_dir_cli, int jobs) {
    pfg::ConfigDocument cfg = pfg::load_config(config_path);
    const std::string out_dir = out_dir_cli.empty() ? cfg.out_dir : out_dir_cli;
    auto cases = expand_batch(cfg);
    if (cases.empty()) {
        std::fprintf(stderr, "error: config has no batch cases\n");
        return 2;
    }
    std::vector<CaseResult> results(cases.size());
    std::atomic<size_t> next{0};
    std::mutex io_mutex;
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(cases.size())));
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cases.size()) {
                return;
            }
            CaseResult& cr = results[i];
            cr.name = cases[i].first;
            try {
                const pfg::RunResult result = pfg::run(cases[i].second);
                cr.metrics = result.metrics;
                cr.bounds_ok = input_bounds_ok(result.trajectory, cases[i].second);
                std::lock_guard<std::mutex> lock(io_mutex);
                write_case_outputs(cfg, cr.name, cases[i].second, result, out_dir);
            } catch (const std::exception& e) {
                cr.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back(worker);
    }
    for (std::thread& th : pool) {
        th.join();
    }
    int failures = 0;
    for (const CaseResult& cr : results) {
        if (!cr.error.empty()) {
            std::printf("%-12s ERROR: %s\n", cr.name.c_str(), cr.error.c_str());
            ++failures;
        } else {
            print_metrics(cr.name, cr.metrics, cr.bounds_ok);
        }
    }
    std::printf("%zu case(s), %d error(s), outputs in %s/\n", cases.size(), failures,
                out_dir.c_str());
    return failures == 0 ? 0 : 1;
}

int cmd_bounds(const std::string& config_path) {
    pfg::ConfigDocument cfg = pfg::load_config(config_path);
    const pfg::SettlingBounds b = pfg::settling_bounds(cfg.scenario.guidance);
    std::printf("T1 <= %.1f s (range channel)\n", b.t1);
    std::printf("T2 <= %.2f s (pitch channel)\n", b.t2);
    std::printf("T3 <= %.2f s (yaw channel)\n", b.t3);
    return 0;
}

int cmd_verify(const std::string& config_path) {
    pfg::ConfigDocument cfg = pfg::load_config(config_path);
    const pfg::Scenario& sc = cfg.scenario;
    int failures = 0;
    const auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        if (!ok) {
            ++failures;
        }
    };

    const pfg::RunResult a = pfg::run(sc);
    const pfg::RunResult b = pfg::run(sc);
    const pfg::RunMetrics& m = a.metrics;
    char buf[256];

    std::snprintf(buf, sizeof buf, "V_U in [%.6f, %.6f], |w| max (%.6f, %.6f)", m.v_u_min,
                  m.v_u_max, m.max_abs_omega_y, m.max_abs_omega_z);
    report("input-bounds", input_bounds_ok(a.trajectory, sc), buf);

    bool ordering = true;
    if (m.t_angle_conv && m.t_range_conv) {
        ordering = *m.t_angle_conv <= *m.t_range_conv;
    }
    std::snprintf(buf, sizeof buf, "t_angle=%s t_range=%s", fmt_opt(m.t_angle_conv).c_str(),
                  fmt_opt(m.t_range_conv).c_str());
    report("pursuit-ordering", ordering, buf);

    bool settle_ok = true;
    if (m.t_angle_conv) {
        settle_ok = *m.t_angle_conv <= std::max(m.bounds.t2, m.bounds.t3);
    }
    if (m.t_range_conv) {
        settle_ok = settle_ok && *m.t_range_conv <= m.bounds.t1;
    }
    std::snprintf(buf, sizeof buf, "bounds T1=%.1f T2=%.2f T3=%.2f", m.bounds.t1, m.bounds.t2,
                  m.bounds.t3);
    report("settling-bounds", settle_ok, buf);

    const double consistency_tol = 1e-6 * std::max(1.0, a.trajectory.samples.empty()
                                                            ? 1.0
                                                            : a.trajectory.samples.front().r);
    std::snprintf(buf, sizeof buf, "max |p_int - p_rec| = %.3e m", m.consistency_max_err);
    report("dual-integration", m.consistency_max_err < consistency_tol, buf);

    bool identical = a.trajectory.samples.size() == b.trajectory.samples.size();
    for (size_t i = 0; identical && i < a.trajectory.samples.size(); ++i) {
        const pfg::Sample& x = a.trajectory.samples[i];
        const pfg::Sample& y = b.trajectory.samples[i];
        identical = x.r == y.r && x.theta == y.theta && x.psi == y.psi &&
                    x.theta_u == y.theta_u && x.psi_u == y.psi_u && x.v_u == y.v_u &&
                    x.omega_y == y.omega_y && x.omega_z == y.omega_z;
    }
    report("determinism", identical, "two runs bit-identical");

    std::snprintf(buf, sizeof buf, "violations V2=%d W2=%d W4=%d max_norm=%.3f",
                  m.lyapunov.violations_v2, m.lyapunov.violations_w2, m.lyapunov.violations_w4,
                  m.lyapunov.max_normalized_violation);
    report("lyapunov-decrease", m.lyapunov.violations_v2 == 0 && m.lyapunov.violations_w2 == 0 &&
                                    m.lyapunov.violations_w4 == 0,
           buf);

    return failures == 0 ? 0 : 3;
}

int cmd_scenarios() {
    for (const std::string& name : pfg::builtin_scenario_names()) {
        const pfg::Scenario sc = pfg::builtin_scenario(name);
        std::printf("%-12s V_T profile %-18s V0=%g V_max=%g t_end=%g s\n", name.c_str(),
                    sc.profile.kind == pfg::ProfileKind::Helix              ? "helix"
                    : sc.profile.kind == pfg::ProfileKind::Piecewise        ? "min-radius s-curve"
                    : sc.profile.kind == pfg::ProfileKind::TimevaryingSpeed ? "time-varying speed"
                                                                            : "constant",
                    sc.envelope.v0, sc.envelope.v_max, sc.t_end);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D bounded-input fixed-time path-following guidance simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) {
        jobs = 1;
    }

    CLI::App* run_cmd = app.add_subcommand("run", "run one scenario, write CSV and metrics");
    run_cmd->add_option("--config", config_path, "JSON config file")->required();
    run_cmd->add_option("--out-dir", out_dir, "output directory (overrides config)");

    CLI::App* batch_cmd = app.add_subcommand("batch", "run the config's batch cases");
    batch_cmd->add_option("--config", config_path, "JSON config file")->required();
    batch_cmd->add_option("--out-dir", out_dir, "output directory (overrides config)");
    batch_cmd->add_option("--jobs", jobs, "concurrent runs");

    CLI::App* bounds_cmd = app.add_subcommand("bounds", "print the settling-time bounds T1-T3");
    bounds_cmd->add_option("--config", config_path, "JSON config file")->required();

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the invariant/audit battery; exit 0 iff clean");
    verify_cmd->add_option("--config", config_path, "JSON config file")->required();

    app.add_subcommand("scenarios", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(config_path, out_dir);
        }
        if (batch_cmd->parsed()) {
            return cmd_batch(config_path, out_dir, jobs);
        }
        if (bounds_cmd->parsed()) {
            return cmd_bounds(config_path);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(config_path);
        }
        return cmd_scenarios();
    } catch (const pfg::SimError& e) {
        std::fprintf(stderr, "error: %s: %s\n", pfg::err_name(e.code()), e.what());
        switch (e.code()) {
            case pfg::Err::ParseError:
            case pfg::Err::ValidationError:
            case pfg::Err::UnknownScenario:
                return 2;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
