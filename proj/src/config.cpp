#include "manet/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace manet {

namespace {

std::string trim(const std::string& s)
{
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& key, int line, const std::string& why)
{
    throw ConfigError("config error at line " + std::to_string(line) + ", key '" +
                      key + "': " + why);
}

double parse_real(const std::string& key, const std::string& v, int line)
{
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size())
            fail(key, line, "not a number: '" + v + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(key, line, "not a number: '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v, int line)
{
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size())
            fail(key, line, "not an integer: '" + v + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(key, line, "not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v, int line)
{
    if (v == "true")
        return true;
    if (v == "false")
        return false;
    fail(key, line, "expected true or false, got '" + v + "'");
}

FlowConfig parse_flow(const std::string& v, int line)
{
    std::vector<std::string> parts;
    std::istringstream ss(v);
    std::string p;
    while (std::getline(ss, p, ','))
        parts.push_back(trim(p));
    if (parts.size() != 6)
        fail("traffic.flow", line,
             "expected src,dst,rate_pps,payload_bits,start_s,end_s");
    FlowConfig f;
    f.src = static_cast<NodeId>(parse_int("traffic.flow", parts[0], line));
    f.dst = static_cast<NodeId>(parse_int("traffic.flow", parts[1], line));
    f.rate_pps = parse_real("traffic.flow", parts[2], line);
    f.payload_bits =
        static_cast<int>(parse_int("traffic.flow", parts[3], line));
    f.start_s = parse_real("traffic.flow", parts[4], line);
    f.end_s = parse_real("traffic.flow", parts[5], line);
    return f;
}

}  // namespace

void validate_config(const ScenarioConfig& cfg)
{
    auto bad = [](const std::string& key, const std::string& why) {
        throw ConfigError("config error, key '" + key + "': " + why);
    };
    if (cfg.nodes < 1)
        bad("topology.nodes", "must be >= 1");
    if (cfg.area_x <= 0 || cfg.area_y <= 0)
        bad("topology.area_x/area_y", "must be positive");
    if (cfg.placement != "grid" && cfg.placement != "uniform")
        bad("topology.placement", "must be grid or uniform");
    if (cfg.range_m <= 0)
        bad("topology.range_m", "must be positive");
    if (cfg.mobility_model != "static" && cfg.mobility_model != "waypoint")
        bad("mobility.model", "must be static or waypoint");
    if (cfg.v_min <= 0 || cfg.v_max < cfg.v_min)
        bad("mobility.v_min/v_max", "need 0 < v_min <= v_max");
    if (cfg.pause_s < 0)
        bad("mobility.pause_s", "must be nonnegative");
    if (cfg.random_pairs < 0)
        bad("traffic.random_pairs", "must be nonnegative");
    if (cfg.rate_pps <= 0)
        bad("traffic.rate_pps", "must be positive");
    if (cfg.payload_bits <= 0)
        bad("traffic.payload_bits", "must be positive");
    for (const auto& f : cfg.flows) {
        if (f.src >= static_cast<NodeId>(cfg.nodes))
            bad("traffic.flow", "src out of range");
        if (f.dst >= static_cast<NodeId>(cfg.nodes))
            bad("traffic.flow", "dst out of range");
        if (f.src == f.dst)
            bad("traffic.flow", "src equals dst");
        if (f.rate_pps <= 0 || f.payload_bits <= 0)
            bad("traffic.flow", "rate and payload must be positive");
    }
    if (cfg.protocol != "flooding" && cfg.protocol != "gridfsr" &&
        cfg.protocol != "friendshare")
        bad("protocol.name", "must be flooding, gridfsr or friendshare");
    if (cfg.timeout_period <= 0)
        bad("protocol.timeout_period", "must be positive");
    if (cfg.ifthres <= 0)
        bad("protocol.ifthres", "must be positive");
    if (cfg.k <= 0)
        bad("protocol.k", "must be positive");
    if (cfg.share_fraction <= 0 || cfg.share_fraction > 1)
        bad("protocol.share_fraction", "must lie in (0,1]");
    if (cfg.batch_size < 1)
        bad("protocol.batch_size", "must be >= 1");
    if (cfg.ttl_max < 0)
        bad("protocol.ttl_max", "must be >= 0 (0 = auto)");
    if (cfg.e_min <= 0)
        bad("protocol.e_min", "must be positive");
    if (cfg.q_max < 1)
        bad("protocol.q_max", "must be >= 1");
    if (cfg.cache_capacity < 1)
        bad("protocol.cache_capacity", "must be >= 1");
    if (cfg.scope_radius < 1)
        bad("protocol.scope_radius", "must be >= 1");
    if (cfg.period_inner <= 0 || cfg.period_outer <= cfg.period_inner)
        bad("protocol.period_inner/period_outer",
            "need 0 < period_inner < period_outer");
    if (cfg.cell_size <= 0)
        bad("protocol.cell_size", "must be positive");
    if (cfg.initial_j <= 0)
        bad("energy.initial_j", "must be positive");
    if (cfg.tx_cost < 0 || cfg.rx_cost < 0)
        bad("energy.tx_cost/rx_cost", "must be nonnegative");
    if (cfg.duration_s <= 0)
        bad("sim.duration_s", "must be positive");
}

ScenarioConfig parse_config(const std::string& text)
{
    ScenarioConfig cfg;
    cfg.flows.clear();
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    bool flows_given = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[' && s.back() == ']') {
            section = s.substr(1, s.size() - 2);
            if (section != "topology" && section != "mobility" &&
                section != "traffic" && section != "protocol" &&
                section != "energy" && section != "sim")
                fail(section, line_no, "unknown section");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            fail(s, line_no, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        std::string full = section + "." + key;
        if (section == "topology") {
            if (key == "nodes")
                cfg.nodes = static_cast<int>(parse_int(full, value, line_no));
            else if (key == "area_x")
                cfg.area_x = parse_real(full, value, line_no);
            else if (key == "area_y")
                cfg.area_y = parse_real(full, value, line_no);
            else if (key == "placement")
                cfg.placement = value;
            else if (key == "range_m")
                cfg.range_m = parse_real(full, value, line_no);
            else
                fail(full, line_no, "unknown key");
        } else if (section == "mobility") {
            if (key == "model")
                cfg.mobility_model = value;
            else if (key == "v_min")
                cfg.v_min = parse_real(full, value, line_no);
            else if (key == "v_max")
                cfg.v_max = parse_real(full, value, line_no);
            else if (key == "pause_s")
                cfg.pause_s = parse_real(full, value, line_no);
            else
                fail(full, line_no, "unknown key");
        } else if (section == "traffic") {
            if (key == "flow") {
                cfg.flows.push_back(parse_flow(value, line_no));
                flows_given = true;
            } else if (key == "random_pairs")
                cfg.random_pairs =
                    static_cast<int>(parse_int(full, value, line_no));
            else if (key == "rate_pps")
                cfg.rate_pps = parse_real(full, value, line_no);
            else if (key == "payload_bits")
                cfg.payload_bits =
                    static_cast<int>(parse_int(full, value, line_no));
            else
                fail(full, line_no, "unknown key");
        } else if (section == "protocol") {
            if (key == "name")
                cfg.protocol = value;
            else if (key == "timeout_period")
                cfg.timeout_period = parse_real(full, value, line_no);
            else if (key == "ifthres")
                cfg.ifthres = parse_real(full, value, line_no);
            else if (key == "k")
                cfg.k = parse_real(full, value, line_no);
            else if (key == "share_fraction")
                cfg.share_fraction = parse_real(full, value, line_no);
            else if (key == "batch_size")
                cfg.batch_size =
                    static_cast<int>(parse_int(full, value, line_no));
            else if (key == "ttl_max")
                cfg.ttl_max = static_cast<int>(parse_int(full, value, line_no));
            else if (key == "e_min")
                cfg.e_min = parse_real(full, value, line_no);
            else if (key == "q_max")
                cfg.q_max = static_cast<int>(parse_int(full, value, line_no));
            else if (key == "cache_capacity")
                cfg.cache_capacity =
                    static_cast<int>(parse_int(full, value, line_no));
            else if (key == "scope_radius")
                cfg.scope_radius =
                    static_cast<int>(parse_int(full, value, line_no));
            else if (key == "period_inner")
                cfg.period_inner = parse_real(full, value, line_no);
            else if (key == "period_outer")
                cfg.period_outer = parse_real(full, value, line_no);
            else if (key == "gateway_filter")
                cfg.gateway_filter = parse_bool(full, value, line_no);
            else if (key == "cell_size")
                cfg.cell_size = parse_real(full, value, line_no);
            else
                fail(full, line_no, "unknown key");
        } else if (section == "energy") {
            if (key == "initial_j")
                cfg.initial_j = parse_real(full, value, line_no);
            else if (key == "tx_cost")
                cfg.tx_cost = parse_real(full, value, line_no);
            else if (key == "rx_cost")
                cfg.rx_cost = parse_real(full, value, line_no);
            else
                fail(full, line_no, "unknown key");
        } else if (section == "sim") {
            if (key == "duration_s")
                cfg.duration_s = parse_real(full, value, line_no);
            else if (key == "seed")
                cfg.seed =
                    static_cast<std::uint64_t>(parse_int(full, value, line_no));
            else
                fail(full, line_no, "unknown key");
        } else {
            fail(full, line_no, "key outside any section");
        }
    }
    if (flows_given)
        cfg.random_pairs = 0;
    validate_config(cfg);
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string fmt_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string serialize_config(const ScenarioConfig& cfg)
{
    std::ostringstream out;
    out << "[topology]\n"
        << "nodes = " << cfg.nodes << "\n"
        << "area_x = " << fmt_real(cfg.area_x) << "\n"
        << "area_y = " << fmt_real(cfg.area_y) << "\n"
        << "placement = " << cfg.placement << "\n"
        << "range_m = " << fmt_real(cfg.range_m) << "\n\n"
        << "[mobility]\n"
        << "model = " << cfg.mobility_model << "\n"
        << "v_min = " << fmt_real(cfg.v_min) << "\n"
        << "v_max = " << fmt_real(cfg.v_max) << "\n"
        << "pause_s = " << fmt_real(cfg.pause_s) << "\n\n"
        << "[traffic]\n";
    if (cfg.flows.empty())
        out << "random_pairs = " << cfg.random_pairs << "\n";
    out << "rate_pps = " << fmt_real(cfg.rate_pps) << "\n"
        << "payload_bits = " << cfg.payload_bits << "\n";
    for (const auto& f : cfg.flows)
        out << "flow = " << f.src << "," << f.dst << "," << fmt_real(f.rate_pps)
            << "," << f.payload_bits << "," << fmt_real(f.start_s) << ","
            << fmt_real(f.end_s) << "\n";
    out << "\n[protocol]\n"
        << "name = " << cfg.protocol << "\n"
        << "timeout_period = " << fmt_real(cfg.timeout_period) << "\n"
        << "ifthres = " << fmt_real(cfg.ifthres) << "\n"
        << "k = " << fmt_real(cfg.k) << "\n"
        << "share_fraction = " << fmt_real(cfg.share_fraction) << "\n"
        << "batch_size = " << cfg.batch_size << "\n"
        << "ttl_max = " << cfg.ttl_max << "\n"
        << "e_min = " << fmt_real(cfg.e_min) << "\n"
        << "q_max = " << cfg.q_max << "\n"
        << "cache_capacity = " << cfg.cache_capacity << "\n"
        << "scope_radius = " << cfg.scope_radius << "\n"
        << "period_inner = " << fmt_real(cfg.period_inner) << "\n"
        << "period_outer = " << fmt_real(cfg.period_outer) << "\n"
        << "gateway_filter = " << (cfg.gateway_filter ? "true" : "false")
        << "\n"
        << "cell_size = " << fmt_real(cfg.cell_size) << "\n\n"
        << "[energy]\n"
        << "initial_j = " << fmt_real(cfg.initial_j) << "\n"
        << "tx_cost = " << fmt_real(cfg.tx_cost) << "\n"
        << "rx_cost = " << fmt_real(cfg.rx_cost) << "\n\n"
        << "[sim]\n"
        << "duration_s = " << fmt_real(cfg.duration_s) << "\n"
        << "seed = " << cfg.seed << "\n";
    return out.str();
}

}  // namespace manet
