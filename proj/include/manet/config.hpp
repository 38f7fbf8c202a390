#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "manet/friendshare.hpp"
#include "manet/fsr.hpp"

namespace manet {

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct FlowConfig
{
    NodeId src = 0;
    NodeId dst = 0;
    double rate_pps = 4.0;
    int payload_bits = 512;
    double start_s = 0.0;
    double end_s = -1.0;  // -1 = run to the end of the simulation

    bool operator==(const FlowConfig&) const = default;
};

struct ScenarioConfig
{
    // [topology]
    int nodes = 50;
    double area_x = 1000.0;
    double area_y = 1000.0;
    std::string placement = "grid";  // grid | uniform
    double range_m = 250.0;

    // [mobility]
    std::string mobility_model = "static";  // static | waypoint
    double v_min = 1.0;
    double v_max = 10.0;
    double pause_s = 2.0;

    // [traffic]
    std::vector<FlowConfig> flows;
    int random_pairs = 10;  // used only when no explicit flows are given
    double rate_pps = 4.0;
    int payload_bits = 512;

    // [protocol]
    std::string protocol = "friendshare";  // flooding | gridfsr | friendshare
    double timeout_period = 30.0;
    double ifthres = 4.0;
    double k = 1.0;
    double share_fraction = 0.5;
    int batch_size = 4;
    int ttl_max = 0;  // 0 = auto: grid diameter, resolved at build time
    double e_min = 0.05;
    int q_max = 16;
    int cache_capacity = 64;
    int scope_radius = 2;
    double period_inner = 5.0;
    double period_outer = 15.0;
    bool gateway_filter = true;
    double cell_size = 250.0;

    // [energy]
    double initial_j = 50.0;
    double tx_cost = 1e-6;
    double rx_cost = 5e-7;

    // [sim]
    double duration_s = 200.0;
    std::uint64_t seed = 1;

    bool operator==(const ScenarioConfig&) const = default;
};

// Strict parse: unknown keys, type mismatches and invariant violations raise
// ConfigError naming the offending key and line.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

// Canonical fully-resolved form; parsing it reproduces an identical config.
std::string serialize_config(const ScenarioConfig& cfg);

void validate_config(const ScenarioConfig& cfg);

}  // namespace manet
