#include "pfg/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pfg/errors.hpp"

namespace pfg {

double PiecewiseSchedule::at(double t) const {
    if (t_start.empty()) {
        return 0.0;
    }
    // last interval whose start is <= t; before the first start, first value
    auto it = std::upper_bound(t_start.begin(), t_start.end(), t);
    if (it == t_start.begin()) {
        return value.front();
    }
    return value[static_cast<size_t>(std::distance(t_start.begin(), it)) - 1];
}

namespace {

double table_interp(const std::vector<TableRow>& rows, double t, double TableRow::*field) {
    if (t <= rows.front().t) {
        return rows.front().*field;
    }
    if (t >= rows.back().t) {
        return rows.back().*field;
    }
    auto it = std::upper_bound(rows.begin(), rows.end(), t,
                               [](double v, const TableRow& r) { return v < r.t; });
    const TableRow& hi = *it;
    const TableRow& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return lo.*field + w * (hi.*field - lo.*field);
}

double timevarying_speed(double t) {
    return 7.5 * (std::tanh(t * t) + (1.0 - std::exp(-t)) * std::sin(t));
}

PiecewiseSchedule min_radius_schedule() {
    // +-0.2 rad/s alternating every 5 s
    PiecewiseSchedule s;
    s.t_start = {0.0, 5.0, 10.0, 15.0};
    s.value = {0.2, -0.2, 0.2, -0.2};
    return s;
}

}  // namespace

double TargetProfile::speed_at(double t) const {
    switch (kind) {
        case ProfileKind::Constant:
        case ProfileKind::Helix:
        case ProfileKind::Piecewise:
            return speed;
        case ProfileKind::TimevaryingSpeed:
            return timevarying_speed(t);
        case ProfileKind::Table:
            return table_interp(table, t, &TableRow::speed);
    }
    return 0.0;
}

double TargetProfile::omega_y_at(double t) const {
    switch (kind) {
        case ProfileKind::Constant:
            return omega_y;
        case ProfileKind::Helix:
            return std::sin(t);
        case ProfileKind::Piecewise:
        case ProfileKind::TimevaryingSpeed:
            return omega_y_schedule.at(t);
        case ProfileKind::Table:
            return table_interp(table, t, &TableRow::omega_y);
    }
    return 0.0;
}

double TargetProfile::omega_z_at(double t) const {
    switch (kind) {
        case ProfileKind::Constant:
            return omega_z;
        case ProfileKind::Helix:
            return std::cos(t);
        case ProfileKind::Piecewise:
        case ProfileKind::TimevaryingSpeed:
            return omega_z_schedule.at(t);
        case ProfileKind::Table:
            return table_interp(table, t, &TableRow::omega_z);
    }
    return 0.0;
}

TargetProfile builtin_profile(const std::string& name) {
    TargetProfile p;
    if (name == "helix_v3" || name == "helix_v0") {
        p.kind = ProfileKind::Helix;
        p.speed = 25.0;
        return p;
    }
    if (name == "scurve") {
        p.kind = ProfileKind::Piecewise;
        p.speed = 15.0;
        p.omega_y_schedule = min_radius_schedule();
        p.omega_z_schedule = min_radius_schedule();
        return p;
    }
    if (name == "timevarying") {
        p.kind = ProfileKind::TimevaryingSpeed;
        p.omega_y_schedule = min_radius_schedule();
        p.omega_z_schedule = min_radius_schedule();
        return p;
    }
    if (name == "straightline") {
        p.kind = ProfileKind::Constant;
        p.speed = 15.0;
        return p;
    }
    throw SimError(Err::UnknownScenario, "unknown scenario '" + name + "'");
}

TargetProfile load_table_profile(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) {
        throw SimError(Err::IoError, "cannot open table profile '" + csv_path + "'");
    }
    TargetProfile p;
    p.kind = ProfileKind::Table;
    p.table_path = csv_path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        // skip a header row
        if (lineno == 1 && line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos) {
            continue;
        }
        std::istringstream ls(line);
        TableRow row;
        char comma;
        if (!(ls >> row.t >> comma >> row.speed >> comma >> row.omega_y >> comma >> row.omega_z)) {
            throw SimError(Err::ParseError, csv_path + ":" + std::to_string(lineno) +
                                                ": expected t,V_T,omega_y,omega_z");
        }
        if (row.speed < 0.0) {
            throw SimError(Err::ValidationError, csv_path + ":" + std::to_string(lineno) +
                                                     ": target speed must be >= 0");
        }
        p.table.push_back(row);
    }
    if (p.table.size() < 2) {
        throw SimError(Err::ValidationError, csv_path + ": table profile needs >= 2 rows");
    }
    if (!std::is_sorted(p.table.begin(), p.table.end(),
                        [](const TableRow& a, const TableRow& b) { return a.t < b.t; })) {
        throw SimError(Err::ValidationError, csv_path + ": table rows must be sorted by t");
    }
    return p;
}

TargetRates target_derivatives(const TargetState& ts, const TargetProfile& profile, double t,
                               uint32_t* flags) {
    const double v = profile.speed_at(t);
    const double cg = std::cos(ts.heading_el);
    const double sg = std::sin(ts.heading_el);
    const double cg_g = guarded_cos(cg, guard::kVerticalHeading, flags);
    TargetRates out;
    out.p_dot = {v * cg * std::cos(ts.heading_az), v * cg * std::sin(ts.heading_az), v * sg};
    out.heading_el_dot = profile.omega_z_at(t);
    out.heading_az_dot = profile.omega_y_at(t) / cg_g;
    return out;
}

Vec3 target_velocity(const TargetState& ts, const TargetProfile& profile, double t) {
    const double v = profile.speed_at(t);
    const double cg = std::cos(ts.heading_el);
    return {v * cg * std::cos(ts.heading_az), v * cg * std::sin(ts.heading_az),
            v * std::sin(ts.heading_el)};
}

ObservedTarget observed_target(const TargetState& ts, const TargetProfile& profile, double t,
                               const LosAngles& los) {
    ObservedTarget out;
    const Vec3 v = target_velocity(ts, profile, t);
    out.v_t = v.norm();
    if (out.v_t < 1e-12) {
        // stationary target: zero lead angles by convention
        out.v_t = 0.0;
        return out;
    }
    const LeadDecomposition dec = lead_angles_from_velocity(v, los);
    out.lead_t = dec.lead;
    return out;
}

}  // namespace pfg
