#include "manet/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace manet {

ScenarioConfig resolve_config(ScenarioConfig cfg)
{
    validate_config(cfg);
    if (cfg.ttl_max == 0) {
        int side = static_cast<int>(
            std::ceil(std::sqrt(static_cast<double>(cfg.nodes))));
        cfg.ttl_max = std::max(2, 2 * side);
    }
    if (cfg.flows.empty() && cfg.random_pairs > 0) {
        // Traffic-pair draws use their own stream so that protocol choice
        // never shifts them.
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_int_distribution<int> pick(0, cfg.nodes - 1);
        for (int i = 0; i < cfg.random_pairs; ++i) {
            int src = pick(rng);
            int dst = pick(rng);
            while (dst == src)
                dst = pick(rng);
            FlowConfig f;
            f.src = static_cast<NodeId>(src);
            f.dst = static_cast<NodeId>(dst);
            f.rate_pps = cfg.rate_pps;
            f.payload_bits = cfg.payload_bits;
            f.start_s = 0.0;
            f.end_s = cfg.duration_s;
            cfg.flows.push_back(f);
        }
        cfg.random_pairs = 0;
    }
    for (auto& f : cfg.flows)
        if (f.end_s < 0.0)
            f.end_s = cfg.duration_s;
    validate_config(cfg);
    return cfg;
}

Scenario::Scenario(ScenarioConfig cfg) : cfg_(resolve_config(std::move(cfg)))
{
    std::mt19937_64 placement_rng(cfg_.seed);
    std::vector<Position> positions =
        cfg_.placement == "uniform"
            ? place_uniform(cfg_.nodes, cfg_.area_x, cfg_.area_y, placement_rng)
            : place_grid(cfg_.nodes, cfg_.area_x, cfg_.area_y);

    EngineParams ep;
    ep.positions = positions;
    ep.area_x = cfg_.area_x;
    ep.area_y = cfg_.area_y;
    ep.range_m = cfg_.range_m;
    ep.initial_energy_j = cfg_.initial_j;
    ep.tx_cost_per_bit = cfg_.tx_cost;
    ep.rx_cost_per_bit = cfg_.rx_cost;
    ep.seed = cfg_.seed;
    ep.t_ref = cfg_.duration_s;
    if (cfg_.mobility_model == "waypoint") {
        ep.mobility.model = MobilityModel::Waypoint;
        ep.mobility.v_min = cfg_.v_min;
        ep.mobility.v_max = cfg_.v_max;
        ep.mobility.pause_s = cfg_.pause_s;
    }
    engine_ = std::make_unique<Engine>(ep);

    if (cfg_.protocol == "gridfsr") {
        FsrConfig fc;
        fc.scope.scope_radius = cfg_.scope_radius;
        fc.scope.period_inner = cfg_.period_inner;
        fc.scope.period_outer = cfg_.period_outer;
        fc.gateway_filter = cfg_.gateway_filter;
        fc.cell_size = cfg_.cell_size;
        CellAssignment cells = assign_cells(positions, cfg_.cell_size);
        for (int n = 0; n < cfg_.nodes; ++n)
            engine_->add_node(std::make_unique<FsrNode>(
                static_cast<NodeId>(n), fc, cells));
    } else {
        ProtocolParams pp = cfg_.protocol == "flooding"
                                ? ProtocolParams::flooding()
                                : ProtocolParams{};
        pp.timeout_period = cfg_.timeout_period;
        pp.ifthres = cfg_.ifthres;
        pp.k = cfg_.k;
        pp.share_fraction = cfg_.share_fraction;
        pp.batch_size = cfg_.batch_size;
        pp.ttl_max = cfg_.ttl_max;
        pp.e_min = cfg_.e_min;
        pp.q_max = cfg_.q_max;
        pp.cache_capacity = static_cast<std::size_t>(cfg_.cache_capacity);
        for (int n = 0; n < cfg_.nodes; ++n)
            engine_->add_node(std::make_unique<FriendshareNode>(
                static_cast<NodeId>(n), pp));
    }

    std::int64_t flow_id = 0;
    for (const auto& f : cfg_.flows) {
        FlowSpec spec;
        spec.flow_id = flow_id++;
        spec.src = f.src;
        spec.dst = f.dst;
        spec.rate_pps = f.rate_pps;
        spec.payload_bits = f.payload_bits;
        spec.start_s = f.start_s;
        spec.end_s = f.end_s;
        engine_->add_flow(spec);
    }
}

void Scenario::run()
{
    engine_->run_until(cfg_.duration_s);
}

MetricReport Scenario::report() const
{
    return compute_report(engine_->trace(), cfg_.duration_s, cfg_.initial_j,
                          cfg_.nodes, cfg_.tx_cost, cfg_.rx_cost);
}

MetricReport run_to_dir(const ScenarioConfig& cfg, const std::string& out_dir)
{
    std::filesystem::create_directories(out_dir);
    Scenario scenario(cfg);
    scenario.run();
    MetricReport report = scenario.report();

    scenario.engine().trace().write_csv_file(out_dir + "/trace.csv");
    std::vector<ReportRow> rows{{scenario.resolved().protocol,
                                 scenario.resolved().nodes,
                                 scenario.resolved().seed, report}};
    export_csv_file(rows, out_dir + "/report.csv");

    std::ofstream echo(out_dir + "/config.echo", std::ios::binary);
    if (!echo)
        throw std::runtime_error("cannot write " + out_dir + "/config.echo");
    echo << serialize_config(scenario.resolved());
    if (!echo)
        throw std::runtime_error("error writing " + out_dir + "/config.echo");
    return report;
}

std::vector<ReportRow> sweep(const ScenarioConfig& base,
                             const std::vector<int>& node_counts,
                             const std::vector<std::string>& protocols,
                             int trials)
{
    if (node_counts.empty() || protocols.empty() || trials < 1)
        throw std::invalid_argument("sweep: empty axis");
    std::vector<ReportRow> rows;
    for (int n : node_counts) {
        for (const auto& proto : protocols) {
            for (int trial = 0; trial < trials; ++trial) {
                ScenarioConfig cfg = base;
                cfg.nodes = n;
                cfg.protocol = proto;
                cfg.seed = base.seed + static_cast<std::uint64_t>(trial);
                try {
                    Scenario scenario(std::move(cfg));
                    scenario.run();
                    rows.push_back({proto, n, scenario.resolved().seed,
                                    scenario.report()});
                } catch (const std::exception&) {
                    // A failed run keeps its row; metrics stay absent.
                    ReportRow row;
                    row.protocol = proto + ":error";
                    row.n_nodes = n;
                    row.seed = base.seed + static_cast<std::uint64_t>(trial);
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

std::vector<ReportRow> compare(const ScenarioConfig& base,
                               const std::vector<std::string>& protocols)
{
    if (protocols.size() < 2)
        throw std::invalid_argument("compare: need at least two protocols");
    std::vector<ReportRow> rows;
    for (const auto& proto : protocols) {
        ScenarioConfig cfg = base;
        cfg.protocol = proto;
        Scenario scenario(std::move(cfg));
        scenario.run();
        rows.push_back({proto, scenario.resolved().nodes,
                        scenario.resolved().seed, scenario.report()});
    }
    return rows;
}

}  // namespace manet
