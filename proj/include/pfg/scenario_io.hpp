#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfg/simulator.hpp"

namespace pfg {

// One batch case: a name plus overrides of the base scenario's UAV initial
// conditions (and optionally the horizon).
struct BatchCase {
    std::string name;
    std::optional<Vec3> uav_position;
    std::optional<double> uav_azimuth_lead;    // rad
    std::optional<double> uav_elevation_lead;  // rad
    std::optional<double> t_end;               // s

    friend bool operator==(const BatchCase&, const BatchCase&) = default;
};

// Randomized initial-condition sweep (seeded from ConfigDocument::seed).
struct RandomSweep {
    int count = 0;
    Vec3 position_min;
    Vec3 position_max;
    double lead_max = 0.0;  // rad, leads drawn uniform in [-lead_max, lead_max]
    std::optional<double> t_end;

    friend bool operator==(const RandomSweep&, const RandomSweep&) = default;
};

struct ConfigDocument {
    Scenario scenario;
    std::string out_dir = "out";
    uint64_t seed = 1;
    std::vector<BatchCase> batch_cases;
    std::optional<RandomSweep> random_sweep;

    bool operator==(const ConfigDocument&) const = default;
};

// Parse a JSON config. Unknown keys are rejected; omitted parameters take the
// reported defaults; every module invariant is validated before any run.
// Angles in the file are degrees, converted at this boundary only.
// Throws SimError(ParseError) / SimError(ValidationError).
ConfigDocument parse_config(const std::string& text);
ConfigDocument load_config(const std::string& path);

// Inverse of parse_config: parse(serialize(cfg)) == cfg for valid documents.
std::string serialize_config(const ConfigDocument& cfg);

// Fixed 23-column schema, 9 significant digits:
// t,r,theta,psi,theta_u,psi_u,v_u,omega_y,omega_z,u_cmd,omega_y_cmd,
// omega_z_cmd,x_u,y_u,z_u,x_t,y_t,z_t,sigma_u,V2,W2,W4,guard_flags
extern const char* const kTrajectoryCsvHeader;
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// Metrics plus provenance (config hash, dt, code version); round-trips
// losslessly through read_metrics_json.
struct MetricsDocument {
    RunMetrics metrics;
    std::string config_hash;
    double dt = 0.0;
    std::string code_version;

    bool operator==(const MetricsDocument&) const = default;
};

std::string metrics_to_json(const MetricsDocument& doc);
MetricsDocument metrics_from_json(const std::string& text);
void write_metrics_json(const MetricsDocument& doc, const std::string& path);

// FNV-1a over the serialized config, hex string; provenance only.
std::string config_hash(const ConfigDocument& cfg);

extern const char* const kCodeVersion;

}  // namespace pfg
