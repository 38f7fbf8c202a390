#include "manet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace manet {

namespace {

struct DataBook
{
    // pkt_id -> origination time (StateChange/Data rows)
    std::unordered_map<std::uint64_t, double> originated;
    // pkt_id -> first Rx time at the final destination
    std::unordered_map<std::uint64_t, double> first_delivery;
    // pkt_id -> flow id
    std::unordered_map<std::uint64_t, std::int64_t> flow_of;
};

DataBook scan_data(const TraceLog& trace)
{
    DataBook book;
    for (const auto& ev : trace.events()) {
        if (ev.pkt_kind != MessageKind::Data)
            continue;
        if (ev.kind == TraceKind::StateChange) {
            book.originated.emplace(ev.pkt_id, ev.t);
            book.flow_of.emplace(ev.pkt_id, ev.flow_id);
        } else if (ev.kind == TraceKind::Rx && ev.node == ev.dst) {
            book.first_delivery.emplace(ev.pkt_id, ev.t);  // first wins
        }
    }
    return book;
}

}  // namespace

std::optional<double> pdr(const TraceLog& trace)
{
    auto book = scan_data(trace);
    if (book.originated.empty())
        return std::nullopt;
    long delivered = 0;
    for (const auto& [id, t] : book.first_delivery)
        if (book.originated.count(id))
            ++delivered;
    return static_cast<double>(delivered) /
           static_cast<double>(book.originated.size());
}

std::optional<double> mean_delay(const TraceLog& trace)
{
    auto book = scan_data(trace);
    double sum = 0.0;
    long n = 0;
    for (const auto& [id, rx_t] : book.first_delivery) {
        auto it = book.originated.find(id);
        if (it == book.originated.end())
            continue;
        sum += rx_t - it->second;
        ++n;
    }
    if (n == 0)
        return std::nullopt;
    return sum / static_cast<double>(n);
}

double throughput(const TraceLog& trace, double duration_s)
{
    if (duration_s <= 0.0)
        throw std::invalid_argument("throughput: duration must be positive");
    auto book = scan_data(trace);
    std::unordered_map<std::uint64_t, int> size_of;
    for (const auto& ev : trace.events())
        if (ev.pkt_kind == MessageKind::Data && ev.kind == TraceKind::Rx &&
            ev.node == ev.dst)
            size_of.emplace(ev.pkt_id, ev.size_bits);
    double bits = 0.0;
    for (const auto& [id, sz] : size_of)
        bits += sz;
    return bits / duration_s;
}

std::optional<double> jitter(const TraceLog& trace)
{
    auto book = scan_data(trace);
    // flow -> (arrival time, delay), ordered by arrival
    std::map<std::int64_t, std::vector<std::pair<double, double>>> per_flow;
    for (const auto& [id, rx_t] : book.first_delivery) {
        auto ot = book.originated.find(id);
        if (ot == book.originated.end())
            continue;
        per_flow[book.flow_of[id]].emplace_back(rx_t, rx_t - ot->second);
    }
    double sum = 0.0;
    long flows = 0;
    for (auto& [flow, arrivals] : per_flow) {
        if (arrivals.size() < 3)
            continue;
        std::sort(arrivals.begin(), arrivals.end());
        double acc = 0.0;
        for (std::size_t i = 1; i < arrivals.size(); ++i)
            acc += std::abs(arrivals[i].second - arrivals[i - 1].second);
        sum += acc / static_cast<double>(arrivals.size() - 1);
        ++flows;
    }
    if (flows == 0)
        return std::nullopt;
    return sum / static_cast<double>(flows);
}

double energy_report(const TraceLog& trace, double initial_energy_j,
                     int n_nodes, double tx_cost_per_bit,
                     double rx_cost_per_bit)
{
    if (n_nodes <= 0)
        throw std::invalid_argument("energy_report: n_nodes must be positive");
    // Per-node, floored at the initial budget exactly as the engine floors
    // residuals at zero.
    std::vector<double> consumed(static_cast<std::size_t>(n_nodes), 0.0);
    for (const auto& ev : trace.events()) {
        double cost = 0.0;
        if (ev.kind == TraceKind::Tx)
            cost = tx_cost_per_bit * ev.size_bits;
        else if (ev.kind == TraceKind::Rx)
            cost = rx_cost_per_bit * ev.size_bits;
        else
            continue;
        if (ev.node < static_cast<NodeId>(n_nodes)) {
            auto& c = consumed[ev.node];
            c = std::min(initial_energy_j, c + cost);
        }
    }
    double total = 0.0;
    for (double c : consumed)
        total += c;
    return total / static_cast<double>(n_nodes);
}

std::optional<double> nco(const TraceLog& trace)
{
    auto book = scan_data(trace);
    long delivered = 0;
    for (const auto& [id, t] : book.first_delivery)
        if (book.originated.count(id))
            ++delivered;
    if (delivered == 0)
        return std::nullopt;
    long control = 0;
    for (const auto& ev : trace.events())
        if (ev.kind == TraceKind::Tx && ev.pkt_kind != MessageKind::Data)
            ++control;
    return static_cast<double>(control) / static_cast<double>(delivered);
}

MetricReport compute_report(const TraceLog& trace, double duration_s,
                            double initial_energy_j, int n_nodes,
                            double tx_cost_per_bit, double rx_cost_per_bit)
{
    MetricReport r;
    r.pdr = pdr(trace);
    r.mean_delay_s = mean_delay(trace);
    r.throughput_bps = throughput(trace, duration_s);
    r.jitter_s = jitter(trace);
    r.mean_energy_consumed_j = energy_report(trace, initial_energy_j, n_nodes,
                                             tx_cost_per_bit, rx_cost_per_bit);
    r.nco = nco(trace);
    for (const auto& ev : trace.events())
        if (ev.kind == TraceKind::Tx)
            ++r.tx_counts[static_cast<std::size_t>(ev.pkt_kind)];
    auto book = scan_data(trace);
    r.data_originated = static_cast<long>(book.originated.size());
    for (const auto& [id, t] : book.first_delivery)
        if (book.originated.count(id))
            ++r.data_delivered;
    return r;
}

namespace {

void put_real(std::ostream& out, std::optional<double> v)
{
    if (!v) {
        return;  // absent value -> empty field
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    out << buf;
}

}  // namespace

void export_csv(const std::vector<ReportRow>& rows, std::ostream& out)
{
    out << "protocol,n_nodes,seed,pdr,mean_delay_s,throughput_bps,jitter_s,"
           "mean_energy_consumed_j,nco,data_originated,data_delivered";
    for (std::size_t k = 0; k < kMessageKindCount; ++k)
        out << ",tx_" << to_string(static_cast<MessageKind>(k));
    out << '\n';
    for (const auto& row : rows) {
        out << row.protocol << ',' << row.n_nodes << ',' << row.seed << ',';
        put_real(out, row.report.pdr);
        out << ',';
        put_real(out, row.report.mean_delay_s);
        out << ',';
        put_real(out, row.report.throughput_bps);
        out << ',';
        put_real(out, row.report.jitter_s);
        out << ',';
        put_real(out, row.report.mean_energy_consumed_j);
        out << ',';
        put_real(out, row.report.nco);
        out << ',' << row.report.data_originated << ','
            << row.report.data_delivered;
        for (long c : row.report.tx_counts)
            out << ',' << c;
        out << '\n';
    }
}

void export_csv_file(const std::vector<ReportRow>& rows,
                     const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open report file for writing: " + path);
    export_csv(rows, out);
    if (!out)
        throw std::runtime_error("error writing report file: " + path);
}

}  // namespace manet
