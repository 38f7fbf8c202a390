#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "manet/trace.hpp"

namespace manet {

inline constexpr std::size_t kMessageKindCount = 9;

struct MetricReport
{
    std::optional<double> pdr;           // in [0,1]
    std::optional<double> mean_delay_s;
    double throughput_bps = 0.0;
    std::optional<double> jitter_s;
    double mean_energy_consumed_j = 0.0;
    std::optional<double> nco;
    std::array<long, kMessageKindCount> tx_counts{};  // per-hop Tx by kind
    long data_originated = 0;
    long data_delivered = 0;  // unique pkt_ids at final destination
};

// Unique delivered data packets over data originations (dedup by pkt_id).
std::optional<double> pdr(const TraceLog& trace);

// Mean of (first destination Rx - origination time) over delivered packets.
std::optional<double> mean_delay(const TraceLog& trace);

// Bits of unique delivered data packets per second of simulated time.
double throughput(const TraceLog& trace, double duration_s);

// Per flow with >= 3 deliveries: mean |delta delay| between consecutive
// arrivals; reported as the mean across qualifying flows.
std::optional<double> jitter(const TraceLog& trace);

// Mean joules consumed per node, reconstructed from Tx/Rx rows and the
// per-bit costs. Matches the engine's residual accounting exactly.
double energy_report(const TraceLog& trace, double initial_energy_j,
                     int n_nodes, double tx_cost_per_bit,
                     double rx_cost_per_bit);

// Control (non-Data) per-hop transmissions per unique delivered data packet.
std::optional<double> nco(const TraceLog& trace);

MetricReport compute_report(const TraceLog& trace, double duration_s,
                            double initial_energy_j, int n_nodes,
                            double tx_cost_per_bit, double rx_cost_per_bit);

struct ReportRow
{
    std::string protocol;
    int n_nodes = 0;
    std::uint64_t seed = 0;
    MetricReport report;
};

// One header row plus one row per entry; 6-decimal reals, deterministic.
void export_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void export_csv_file(const std::vector<ReportRow>& rows,
                     const std::string& path);

}  // namespace manet
