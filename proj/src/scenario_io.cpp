#include "pfg/scenario_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pfg/errors.hpp"

namespace pfg {

using nlohmann::json;

const char* const kCodeVersion = "pfgsim 1.0.0";

const char* const kTrajectoryCsvHeader =
    "t,r,theta,psi,theta_u,psi_u,v_u,omega_y,omega_z,u_cmd,omega_y_cmd,omega_z_cmd,"
    "x_u,y_u,z_u,x_t,y_t,z_t,sigma_u,V2,W2,W4,guard_flags";

namespace {

[[noreturn]] void parse_fail(const std::string& msg) {
    throw SimError(Err::ParseError, msg);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (allowed.count(it.key()) == 0) {
            parse_fail("unknown key '" + it.key() + "' in " + ctx);
        }
    }
}

double get_num(const json& obj, const std::string& key, const std::string& ctx) {
    const json& v = obj.at(key);
    if (!v.is_number()) {
        parse_fail("field '" + key + "' in " + ctx + " must be a number");
    }
    return v.get<double>();
}

void set_num(const json& obj, const std::string& key, const std::string& ctx, double* out) {
    if (obj.contains(key)) {
        *out = get_num(obj, key, ctx);
    }
}

void set_angle_deg(const json& obj, const std::string& key, const std::string& ctx, double* out) {
    if (obj.contains(key)) {
        *out = deg2rad(get_num(obj, key, ctx));
    }
}

Vec3 get_vec3(const json& obj, const std::string& key, const std::string& ctx) {
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
        parse_fail("field '" + key + "' in " + ctx + " must be an array of 3 numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

// Emit a degree value whose parse (deg * pi/180) reproduces `rad` bit-exactly,
// so parse(serialize(cfg)) round-trips.
double emit_degrees(double rad) {
    double d = rad2deg(rad);
    if (deg2rad(d) == rad) {
        return d;
    }
    for (double cand : {std::nextafter(d, d + 1.0), std::nextafter(d, d - 1.0)}) {
        if (deg2rad(cand) == rad) {
            return cand;
        }
    }
    return d;
}

PiecewiseSchedule parse_schedule(const json& obj, const std::string& ctx) {
    check_keys(obj, {"t", "value"}, ctx);
    PiecewiseSchedule s;
    for (const json& v : obj.at("t")) {
        s.t_start.push_back(v.get<double>());
    }
    for (const json& v : obj.at("value")) {
        s.value.push_back(v.get<double>());
    }
    if (s.t_start.size() != s.value.size() || s.t_start.empty()) {
        throw SimError(Err::ValidationError,
                       ctx + ": schedule t and value must be non-empty, equal-length");
    }
    for (size_t i = 1; i < s.t_start.size(); ++i) {
        if (s.t_start[i] <= s.t_start[i - 1]) {
            throw SimError(Err::ValidationError, ctx + ": schedule t must be increasing");
        }
    }
    return s;
}

TargetProfile parse_profile(const json& obj) {
    check_keys(obj,
               {"kind", "speed", "omega_y", "omega_z", "omega_y_schedule", "omega_z_schedule",
                "table"},
               "target.profile");
    const std::string kind = obj.at("kind").get<std::string>();
    TargetProfile p;
    if (kind == "table") {
        return load_table_profile(obj.at("table").get<std::string>());
    }
    if (kind == "constant") {
        p.kind = ProfileKind::Constant;
        p.speed = get_num(obj, "speed", "target.profile");
        set_num(obj, "omega_y", "target.profile", &p.omega_y);
        set_num(obj, "omega_z", "target.profile", &p.omega_z);
        return p;
    }
    if (kind == "helix") {
        p.kind = ProfileKind::Helix;
        p.speed = 25.0;
        set_num(obj, "speed", "target.profile", &p.speed);
        return p;
    }
    if (kind == "piecewise" || kind == "timevarying_speed") {
        p.kind = (kind == "piecewise") ? ProfileKind::Piecewise : ProfileKind::TimevaryingSpeed;
        if (p.kind == ProfileKind::Piecewise) {
            p.speed = get_num(obj, "speed", "target.profile");
        }
        p.omega_y_schedule = parse_schedule(obj.at("omega_y_schedule"), "omega_y_schedule");
        p.omega_z_schedule = parse_schedule(obj.at("omega_z_schedule"), "omega_z_schedule");
        return p;
    }
    parse_fail("unknown profile kind '" + kind + "'");
}

json schedule_to_json(const PiecewiseSchedule& s) {
    return json{{"t", s.t_start}, {"value", s.value}};
}

json profile_to_json(const TargetProfile& p) {
    json j;
    switch (p.kind) {
        case ProfileKind::Constant:
            j["kind"] = "constant";
            j["speed"] = p.speed;
            j["omega_y"] = p.omega_y;
            j["omega_z"] = p.omega_z;
            break;
        case ProfileKind::Helix:
            j["kind"] = "helix";
            j["speed"] = p.speed;
            break;
        case ProfileKind::Piecewise:
            j["kind"] = "piecewise";
            j["speed"] = p.speed;
            j["omega_y_schedule"] = schedule_to_json(p.omega_y_schedule);
            j["omega_z_schedule"] = schedule_to_json(p.omega_z_schedule);
            break;
        case ProfileKind::TimevaryingSpeed:
            j["kind"] = "timevarying_speed";
            j["omega_y_schedule"] = schedule_to_json(p.omega_y_schedule);
            j["omega_z_schedule"] = schedule_to_json(p.omega_z_schedule);
            break;
        case ProfileKind::Table:
            j["kind"] = "table";
            j["table"] = p.table_path;
            break;
    }
    return j;
}

void apply_uav_section(const json& obj, const std::string& ctx, Vec3* position,
                       double* azimuth_lead, double* elevation_lead) {
    check_keys(obj, {"position", "azimuth_lead_deg", "elevation_lead_deg"}, ctx);
    if (obj.contains("position")) {
        *position = get_vec3(obj, "position", ctx);
    }
    set_angle_deg(obj, "azimuth_lead_deg", ctx, azimuth_lead);
    set_angle_deg(obj, "elevation_lead_deg", ctx, elevation_lead);
}

}  // namespace

namespace {

ConfigDocument parse_config_checked(const json& j);

}  // namespace

ConfigDocument parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_config_checked(j);
    } catch (const json::exception& e) {
        parse_fail(std::string("malformed config field: ") + e.what());
    }
}

namespace {

ConfigDocument parse_config_checked(const json& j) {
    if (!j.is_object()) {
        parse_fail("config root must be a JSON object");
    }
    check_keys(j,
               {"scenario", "name", "target", "uav", "envelope", "omega_max", "sat", "guidance",
                "sim", "output", "seed", "batch"},
               "config root");

    ConfigDocument cfg;
    if (j.contains("scenario")) {
        cfg.scenario = builtin_scenario(j.at("scenario").get<std::string>());
    } else {
        cfg.scenario = builtin_scenario("straightline");
        cfg.scenario.name = "custom";
    }
    Scenario& sc = cfg.scenario;
    if (j.contains("name")) {
        sc.name = j.at("name").get<std::string>();
    }

    if (j.contains("target")) {
        const json& t = j.at("target");
        check_keys(t, {"position", "lead", "profile"}, "target");
        if (t.contains("position")) {
            sc.target_position = get_vec3(t, "position", "target");
        }
        if (t.contains("lead")) {
            const json& l = t.at("lead");
            check_keys(l, {"azimuth_deg", "elevation_deg"}, "target.lead");
            set_angle_deg(l, "azimuth_deg", "target.lead", &sc.target_lead.psi);
            set_angle_deg(l, "elevation_deg", "target.lead", &sc.target_lead.theta);
        }
        if (t.contains("profile")) {
            sc.profile = parse_profile(t.at("profile"));
        }
    }
    if (j.contains("uav")) {
        apply_uav_section(j.at("uav"), "uav", &sc.uav_position, &sc.uav_lead.psi,
                          &sc.uav_lead.theta);
    }
    if (j.contains("envelope")) {
        const json& e = j.at("envelope");
        check_keys(e, {"v0", "v_max"}, "envelope");
        set_num(e, "v0", "envelope", &sc.envelope.v0);
        set_num(e, "v_max", "envelope", &sc.envelope.v_max);
    }
    if (j.contains("omega_max")) {
        sc.omega_max = get_num(j, "omega_max", "config root");
    }
    if (j.contains("sat")) {
        const json& s = j.at("sat");
        check_keys(s, {"k1", "k2", "k3", "k4", "gamma"}, "sat");
        set_num(s, "k1", "sat", &sc.sat.k1);
        set_num(s, "k2", "sat", &sc.sat.k2);
        set_num(s, "k3", "sat", &sc.sat.k3);
        set_num(s, "k4", "sat", &sc.sat.k4);
        if (s.contains("gamma")) {
            const json& g = s.at("gamma");
            if (!g.is_number_integer()) {
                throw SimError(Err::ValidationError, "gamma must be an (even) integer");
            }
            sc.sat.gamma = g.get<int>();
        }
    }
    if (j.contains("guidance")) {
        const json& g = j.at("guidance");
        check_keys(g,
                   {"m1", "n1", "alpha1", "beta1", "m2", "n2", "alpha2", "beta2", "m3", "n3",
                    "alpha3", "beta3", "cmd_limit_speed", "cmd_limit_omega"},
                   "guidance");
        set_num(g, "m1", "guidance", &sc.guidance.m1);
        set_num(g, "n1", "guidance", &sc.guidance.n1);
        set_num(g, "alpha1", "guidance", &sc.guidance.alpha1);
        set_num(g, "beta1", "guidance", &sc.guidance.beta1);
        set_num(g, "m2", "guidance", &sc.guidance.m2);
        set_num(g, "n2", "guidance", &sc.guidance.n2);
        set_num(g, "alpha2", "guidance", &sc.guidance.alpha2);
        set_num(g, "beta2", "guidance", &sc.guidance.beta2);
        set_num(g, "m3", "guidance", &sc.guidance.m3);
        set_num(g, "n3", "guidance", &sc.guidance.n3);
        set_num(g, "alpha3", "guidance", &sc.guidance.alpha3);
        set_num(g, "beta3", "guidance", &sc.guidance.beta3);
        set_num(g, "cmd_limit_speed", "guidance", &sc.guidance.cmd_limit_speed);
        set_num(g, "cmd_limit_omega", "guidance", &sc.guidance.cmd_limit_omega);
    }
    if (j.contains("sim")) {
        const json& s = j.at("sim");
        check_keys(s, {"dt", "t_end", "r_capture", "angle_tol_deg", "converge_hold", "substeps"},
                   "sim");
        set_num(s, "dt", "sim", &sc.dt);
        set_num(s, "t_end", "sim", &sc.t_end);
        set_num(s, "r_capture", "sim", &sc.r_capture);
        set_angle_deg(s, "angle_tol_deg", "sim", &sc.angle_tol);
        set_num(s, "converge_hold", "sim", &sc.converge_hold);
        if (s.contains("substeps")) {
            sc.substeps = s.at("substeps").get<int>();
        }
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"dir"}, "output");
        if (o.contains("dir")) {
            cfg.out_dir = o.at("dir").get<std::string>();
        }
    }
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<uint64_t>();
    }
    if (j.contains("batch")) {
        const json& b = j.at("batch");
        check_keys(b, {"cases", "random"}, "batch");
        if (b.contains("cases")) {
            for (const json& c : b.at("cases")) {
                check_keys(c, {"name", "uav", "t_end"}, "batch case");
                BatchCase bc;
                bc.name = c.at("name").get<std::string>();
                if (c.contains("uav")) {
                    Vec3 pos = sc.uav_position;
                    double az = sc.uav_lead.psi;
                    double el = sc.uav_lead.theta;
                    apply_uav_section(c.at("uav"), "batch case uav", &pos, &az, &el);
                    if (c.at("uav").contains("position")) bc.uav_position = pos;
                    if (c.at("uav").contains("azimuth_lead_deg")) bc.uav_azimuth_lead = az;
                    if (c.at("uav").contains("elevation_lead_deg")) bc.uav_elevation_lead = el;
                }
                if (c.contains("t_end")) {
                    bc.t_end = get_num(c, "t_end", "batch case");
                }
                cfg.batch_cases.push_back(bc);
            }
        }
        if (b.contains("random")) {
            const json& r = b.at("random");
            check_keys(r, {"count", "position_min", "position_max", "lead_max_deg", "t_end"},
                       "batch.random");
            RandomSweep rs;
            rs.count = r.at("count").get<int>();
            rs.position_min = get_vec3(r, "position_min", "batch.random");
            rs.position_max = get_vec3(r, "position_max", "batch.random");
            rs.lead_max = deg2rad(get_num(r, "lead_max_deg", "batch.random"));
            if (r.contains("t_end")) {
                rs.t_end = get_num(r, "t_end", "batch.random");
            }
            if (rs.count <= 0) {
                throw SimError(Err::ValidationError, "batch.random.count must be positive");
            }
            cfg.random_sweep = rs;
        }
    }

    sc.validate();
    return cfg;
}

}  // namespace

ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SimError(Err::IoError, "cannot open config '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ConfigDocument& cfg) {
    const Scenario& sc = cfg.scenario;
    json j;
    bool is_builtin = false;
    for (const std::string& b : builtin_scenario_names()) {
        is_builtin = is_builtin || b == sc.name;
    }
    if (is_builtin) {
        j["scenario"] = sc.name;
    } else {
        j["name"] = sc.name;
    }
    json target;
    target["position"] = {sc.target_position.x, sc.target_position.y, sc.target_position.z};
    target["lead"] = {{"azimuth_deg", emit_degrees(sc.target_lead.psi)},
                      {"elevation_deg", emit_degrees(sc.target_lead.theta)}};
    target["profile"] = profile_to_json(sc.profile);
    j["target"] = target;
    j["uav"] = {{"position", {sc.uav_position.x, sc.uav_position.y, sc.uav_position.z}},
                {"azimuth_lead_deg", emit_degrees(sc.uav_lead.psi)},
                {"elevation_lead_deg", emit_degrees(sc.uav_lead.theta)}};
    j["envelope"] = {{"v0", sc.envelope.v0}, {"v_max", sc.envelope.v_max}};
    j["omega_max"] = sc.omega_max;
    j["sat"] = {{"k1", sc.sat.k1}, {"k2", sc.sat.k2}, {"k3", sc.sat.k3}, {"k4", sc.sat.k4},
                {"gamma", sc.sat.gamma}};
    j["guidance"] = {{"m1", sc.guidance.m1},
                     {"n1", sc.guidance.n1},
                     {"alpha1", sc.guidance.alpha1},
                     {"beta1", sc.guidance.beta1},
                     {"m2", sc.guidance.m2},
                     {"n2", sc.guidance.n2},
                     {"alpha2", sc.guidance.alpha2},
                     {"beta2", sc.guidance.beta2},
                     {"m3", sc.guidance.m3},
                     {"n3", sc.guidance.n3},
                     {"alpha3", sc.guidance.alpha3},
                     {"beta3", sc.guidance.beta3},
                     {"cmd_limit_speed", sc.guidance.cmd_limit_speed},
                     {"cmd_limit_omega", sc.guidance.cmd_limit_omega}};
    j["sim"] = {{"dt", sc.dt},
                {"t_end", sc.t_end},
                {"r_capture", sc.r_capture},
                {"angle_tol_deg", emit_degrees(sc.angle_tol)},
                {"converge_hold", sc.converge_hold},
                {"substeps", sc.substeps}};
    j["output"] = {{"dir", cfg.out_dir}};
    j["seed"] = cfg.seed;
    if (!cfg.batch_cases.empty() || cfg.random_sweep) {
        json b;
        if (!cfg.batch_cases.empty()) {
            json cases = json::array();
            for (const BatchCase& bc : cfg.batch_cases) {
                json c;
                c["name"] = bc.name;
                json uav;
                if (bc.uav_position) {
                    uav["position"] = {bc.uav_position->x, bc.uav_position->y,
                                       bc.uav_position->z};
                }
                if (bc.uav_azimuth_lead) {
                    uav["azimuth_lead_deg"] = emit_degrees(*bc.uav_azimuth_lead);
                }
                if (bc.uav_elevation_lead) {
                    uav["elevation_lead_deg"] = emit_degrees(*bc.uav_elevation_lead);
                }
                if (!uav.empty()) {
                    c["uav"] = uav;
                }
                if (bc.t_end) {
                    c["t_end"] = *bc.t_end;
                }
                cases.push_back(c);
            }
            b["cases"] = cases;
        }
        if (cfg.random_sweep) {
            const RandomSweep& rs = *cfg.random_sweep;
            json r;
            r["count"] = rs.count;
            r["position_min"] = {rs.position_min.x, rs.position_min.y, rs.position_min.z};
            r["position_max"] = {rs.position_max.x, rs.position_max.y, rs.position_max.z};
            r["lead_max_deg"] = emit_degrees(rs.lead_max);
            if (rs.t_end) {
                r["t_end"] = *rs.t_end;
            }
            b["random"] = r;
        }
        j["batch"] = b;
    }
    return j.dump(2) + "\n";
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) {
        throw SimError(Err::IoError, "cannot open '" + path + "' for writing");
    }
    std::fputs(kTrajectoryCsvHeader, f);
    std::fputc('\n', f);
    for (const Sample& s : traj.samples) {
        std::fprintf(f,
                     "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,"
                     "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%u\n",
                     s.t, s.r, s.theta, s.psi, s.theta_u, s.psi_u, s.v_u, s.omega_y, s.omega_z,
                     s.u_cmd, s.omega_y_cmd, s.omega_z_cmd, s.p_uav.x, s.p_uav.y, s.p_uav.z,
                     s.p_target.x, s.p_target.y, s.p_target.z, s.sigma_u, s.v2, s.w2, s.w4,
                     s.flags);
    }
    if (std::fclose(f) != 0) {
        throw SimError(Err::IoError, "write failed for '" + path + "'");
    }
}

namespace {

json optional_to_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json& v) {
    if (v.is_null()) {
        return std::nullopt;
    }
    return v.get<double>();
}

}  // namespace

std::string metrics_to_json(const MetricsDocument& doc) {
    const RunMetrics& m = doc.metrics;
    json j;
    j["t_angle_conv"] = optional_to_json(m.t_angle_conv);
    j["t_range_conv"] = optional_to_json(m.t_range_conv);
    j["v_u_min"] = m.v_u_min;
    j["v_u_max"] = m.v_u_max;
    j["max_abs_omega_y"] = m.max_abs_omega_y;
    j["max_abs_omega_z"] = m.max_abs_omega_z;
    j["tracking_error"] = optional_to_json(m.tracking_error);
    j["settling_bounds"] = {{"t1", m.bounds.t1}, {"t2", m.bounds.t2}, {"t3", m.bounds.t3}};
    j["lyapunov"] = {{"violations_v2", m.lyapunov.violations_v2},
                     {"violations_w2", m.lyapunov.violations_w2},
                     {"violations_w4", m.lyapunov.violations_w4},
                     {"max_normalized_violation", m.lyapunov.max_normalized_violation}};
    j["guard_trip_steps"] = m.guard_trip_steps;
    j["consistency_max_err"] = m.consistency_max_err;
    j["provenance"] = {{"config_hash", doc.config_hash},
                       {"dt", doc.dt},
                       {"code_version", doc.code_version}};
    return j.dump(2) + "\n";
}

namespace {

MetricsDocument metrics_from_json_checked(const json& j) {
    MetricsDocument doc;
    RunMetrics& m = doc.metrics;
    m.t_angle_conv = optional_from_json(j.at("t_angle_conv"));
    m.t_range_conv = optional_from_json(j.at("t_range_conv"));
    m.v_u_min = j.at("v_u_min").get<double>();
    m.v_u_max = j.at("v_u_max").get<double>();
    m.max_abs_omega_y = j.at("max_abs_omega_y").get<double>();
    m.max_abs_omega_z = j.at("max_abs_omega_z").get<double>();
    m.tracking_error = optional_from_json(j.at("tracking_error"));
    m.bounds.t1 = j.at("settling_bounds").at("t1").get<double>();
    m.bounds.t2 = j.at("settling_bounds").at("t2").get<double>();
    m.bounds.t3 = j.at("settling_bounds").at("t3").get<double>();
    m.lyapunov.violations_v2 = j.at("lyapunov").at("violations_v2").get<int>();
    m.lyapunov.violations_w2 = j.at("lyapunov").at("violations_w2").get<int>();
    m.lyapunov.violations_w4 = j.at("lyapunov").at("violations_w4").get<int>();
    m.lyapunov.max_normalized_violation =
        j.at("lyapunov").at("max_normalized_violation").get<double>();
    m.guard_trip_steps = j.at("guard_trip_steps").get<int64_t>();
    m.consistency_max_err = j.at("consistency_max_err").get<double>();
    doc.config_hash = j.at("provenance").at("config_hash").get<std::string>();
    doc.dt = j.at("provenance").at("dt").get<double>();
    doc.code_version = j.at("provenance").at("code_version").get<std::string>();
    return doc;
}

}  // namespace

MetricsDocument metrics_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(std::string("metrics document is not valid JSON: ") + e.what());
    }
    try {
        return metrics_from_json_checked(j);
    } catch (const json::exception& e) {
        parse_fail(std::string("malformed metrics field: ") + e.what());
    }
}

void write_metrics_json(const MetricsDocument& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw SimError(Err::IoError, "cannot open '" + path + "' for writing");
    }
    out << metrics_to_json(doc);
    if (!out) {
        throw SimError(Err::IoError, "write failed for '" + path + "'");
    }
}

std::string config_hash(const ConfigDocument& cfg) {
    const std::string s = serialize_config(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace pfg
