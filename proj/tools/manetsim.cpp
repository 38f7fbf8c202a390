// manetsim: scenario runner and model explorer for the friend-node
// rebroadcast-reduction protocol suite.
//
// Commands: run, sweep, analyze, oracle, compare. Exit codes: 0 success,
// 2 usage error, 3 config parse error, 4 runtime error, 5 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manet/analytics.hpp"
#include "manet/config.hpp"
#include "manet/metrics.hpp"
#include "manet/scenario.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitRuntime = 4;
constexpr int kExitIo = 5;

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::vector<int> split_ints(const std::string& s)
{
    std::vector<int> out;
    for (const auto& item : split_list(s))
        out.push_back(std::stoi(item));
    return out;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

int classify_error(const std::exception& e)
{
    if (dynamic_cast<const manet::ConfigError*>(&e))
        return kExitParse;
    if (dynamic_cast<const std::invalid_argument*>(&e) ||
        dynamic_cast<const std::domain_error*>(&e))
        return kExitUsage;
    std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("error writing") != std::string::npos ||
        what.find("cannot write") != std::string::npos)
        return kExitIo;
    return kExitRuntime;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            long seed_override)
{
    manet::ScenarioConfig cfg = manet::parse_config_file(config_path);
    if (seed_override >= 0)
        cfg.seed = static_cast<std::uint64_t>(seed_override);
    manet::MetricReport report = manet::run_to_dir(cfg, out_dir);
    std::cout << "run complete: " << out_dir << "/trace.csv, report.csv, "
              << "config.echo\n";
    std::cout << "pdr=" << (report.pdr ? fmt(*report.pdr) : "n/a")
              << " nco=" << (report.nco ? fmt(*report.nco) : "n/a")
              << " delivered=" << report.data_delivered << "/"
              << report.data_originated << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& nodes_list,
              const std::string& protocols_list, int trials,
              const std::string& out_dir)
{
    auto nodes = split_ints(nodes_list);
    auto protocols = split_list(protocols_list);
    if (nodes.empty() || protocols.empty() || trials < 1)
        throw std::invalid_argument("sweep: --nodes, --protocols and --trials "
                                    "must be nonempty/positive");
    manet::ScenarioConfig base = manet::parse_config_file(config_path);
    auto rows = manet::sweep(base, nodes, protocols, trials);
    std::filesystem::create_directories(out_dir);
    manet::export_csv_file(rows, out_dir + "/sweep.csv");
    std::cout << "sweep complete: " << rows.size() << " rows -> " << out_dir
              << "/sweep.csv\n";
    return 0;
}

int cmd_analyze(long tn, long kn, long un, long en, double tout, double tavg)
{
    using namespace manet::analytics;
    AnalyticsInput inp{tn, kn, un, en, tout, tavg};
    validate(inp);
    long tc = calls_before_expiry(tout, tavg);
    ModelResult pu = p_unknown(inp);
    ModelResult pe = p_exposed(inp);
    ModelResult p = p_contact_exposed(pu, pe);
    double lambda = static_cast<double>(tn) * p.value;
    double px0 = p_none(tn, p.value);
    double te = expected_exposed_contacts(p.value, en);

    auto row = [](const std::string& name, double value, bool valid,
                  const std::string& note) {
        std::cout << (valid ? "  " : "! ") << name << " = " << fmt(value);
        if (!note.empty())
            std::cout << "   (" << note << ")";
        std::cout << "\n";
    };
    std::cout << "inputs: T_n=" << tn << " K_n=" << kn << " U_n=" << un
              << " E_n=" << en << " T_out=" << fmt(tout)
              << " T_avg=" << fmt(tavg) << "\n";
    std::cout << "  T_c = " << tc << "\n";
    std::cout << "  RGR inputs: sender cache K_n=" << kn
              << " (RGR proportional to efficiency; constant unknown)\n";
    row("P_u", pu.value, pu.valid, pu.note);
    row("P_e", pe.value, pe.valid, pe.note);
    row("P", p.value, p.valid, p.note);
    row("lambda = T_n*P", lambda, p.valid, "");
    row("P(X=0)", px0, p.valid, "");
    row("T_e", te, p.valid, "");
    return 0;
}

int cmd_oracle(long tn, long un, long en, double tout, double tavg,
               long trials, std::uint64_t seed)
{
    using namespace manet::analytics;
    AnalyticsInput inp{tn, 0, un, en, tout, tavg};
    validate(inp);
    ModelResult pu = p_unknown(inp);
    ModelResult pe = p_exposed(inp);
    ModelResult p = p_contact_exposed(pu, pe);
    OracleResult oracle = oracle_contact_model(inp, trials, seed);

    std::cout << "quantity,printed_model,exact_oracle,monte_carlo,mc_stderr,"
                 "divergence\n";
    std::cout << "p_any_exposed," << fmt(p.value) << ","
              << fmt(oracle.exact_p_any) << "," << fmt(oracle.p_any_exposed)
              << "," << fmt(oracle.p_any_stderr) << ","
              << fmt(std::abs(p.value - oracle.exact_p_any)) << "\n";
    double printed_te = expected_exposed_contacts(p.value, en);
    std::cout << "mean_exposed_contacts," << fmt(printed_te) << ","
              << fmt(oracle.exact_mean) << "," << fmt(oracle.mean_exposed)
              << "," << fmt(oracle.mean_stderr) << ","
              << fmt(std::abs(printed_te - oracle.exact_mean)) << "\n";
    if (!p.valid)
        std::cerr << "note: printed model flagged invalid ("
                  << (p.note.empty() ? pu.note + " " + pe.note : p.note)
                  << ")\n";
    return 0;
}

int cmd_compare(const std::string& config_path,
                const std::string& protocols_list)
{
    auto protocols = split_list(protocols_list);
    manet::ScenarioConfig base = manet::parse_config_file(config_path);
    auto rows = manet::compare(base, protocols);

    auto value = [](const std::optional<double>& v) {
        return v ? *v : 0.0;
    };
    struct Metric
    {
        const char* name;
        double (*get)(const manet::MetricReport&);
    };
    static const Metric metrics[] = {
        {"pdr", [](const manet::MetricReport& r) { return r.pdr.value_or(0.0); }},
        {"mean_delay_s",
         [](const manet::MetricReport& r) { return r.mean_delay_s.value_or(0.0); }},
        {"throughput_bps",
         [](const manet::MetricReport& r) { return r.throughput_bps; }},
        {"jitter_s",
         [](const manet::MetricReport& r) { return r.jitter_s.value_or(0.0); }},
        {"mean_energy_j",
         [](const manet::MetricReport& r) { return r.mean_energy_consumed_j; }},
        {"nco", [](const manet::MetricReport& r) { return r.nco.value_or(0.0); }},
    };
    (void)value;
    std::cout << "metric,baseline(" << rows[0].protocol << ")";
    for (std::size_t i = 1; i < rows.size(); ++i)
        std::cout << "," << rows[i].protocol << ",delta,delta_pct";
    std::cout << "\n";
    for (const auto& m : metrics) {
        double base_v = m.get(rows[0].report);
        std::cout << m.name << "," << fmt(base_v);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            double v = m.get(rows[i].report);
            double delta = v - base_v;
            double pct = base_v != 0.0 ? 100.0 * delta / base_v : 0.0;
            std::cout << "," << fmt(v) << "," << fmt(delta) << "," << fmt(pct);
        }
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"MANET friend-node route sharing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    long seed_override = -1;
    std::string nodes_list = "50,75,100,125,150";
    std::string protocols_list = "flooding,gridfsr,friendshare";
    int trials = 1;
    long tn = 0, kn = 0, un = 0, en = 0;
    double tout = 0.0, tavg = 1.0;
    long mc_trials = 100000;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--config", config_path, "scenario config file")
        ->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed_override, "override [sim] seed");

    auto* sw = app.add_subcommand("sweep", "node-count x protocol sweep");
    sw->add_option("--config", config_path, "base config file")->required();
    sw->add_option("--nodes", nodes_list, "comma list of node counts");
    sw->add_option("--protocols", protocols_list, "comma list of protocols");
    sw->add_option("--trials", trials, "trials per cell (seeds base..base+K-1)");
    sw->add_option("--out", out_dir, "output directory");

    auto* an = app.add_subcommand("analyze", "evaluate the probability model");
    an->add_option("--tn", tn, "total nodes T_n")->required();
    an->add_option("--kn", kn, "cache size K_n")->required();
    an->add_option("--un", un, "unknown nodes U_n")->required();
    an->add_option("--en", en, "exposed nodes E_n")->required();
    an->add_option("--tout", tout, "route lifetime T_out (s)")->required();
    an->add_option("--tavg", tavg, "mean contact time T_avg (s)")->required();

    auto* orc = app.add_subcommand("oracle", "model vs contact-model oracle");
    orc->add_option("--tn", tn, "total nodes T_n")->required();
    orc->add_option("--un", un, "unknown nodes U_n")->required();
    orc->add_option("--en", en, "exposed nodes E_n")->required();
    orc->add_option("--tout", tout, "route lifetime T_out (s)")->required();
    orc->add_option("--tavg", tavg, "mean contact time T_avg (s)")->required();
    orc->add_option("--trials", mc_trials, "Monte-Carlo trials");
    orc->add_option("--seed", seed, "Monte-Carlo seed");

    auto* cmp = app.add_subcommand("compare", "protocols on one seeded scenario");
    cmp->add_option("--config", config_path, "scenario config file")
        ->required();
    cmp->add_option("--protocols", protocols_list, "comma list, first = baseline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, out_dir, seed_override);
        if (sw->parsed())
            return cmd_sweep(config_path, nodes_list, protocols_list, trials,
                             out_dir);
        if (an->parsed())
            return cmd_analyze(tn, kn, un, en, tout, tavg);
        if (orc->parsed())
            return cmd_oracle(tn, un, en, tout, tavg, mc_trials, seed);
        if (cmp->parsed())
            return cmd_compare(config_path, protocols_list);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_error(e);
    }
    return kExitUsage;
}
