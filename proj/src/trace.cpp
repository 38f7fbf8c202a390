#include "manet/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace manet {

const char* to_string(TraceKind kind)
{
    switch (kind) {
        case TraceKind::Tx: return "Tx";
        case TraceKind::Rx: return "Rx";
        case TraceKind::Drop: return "Drop";
        case TraceKind::Expire: return "Expire";
        case TraceKind::StateChange: return "StateChange";
        case TraceKind::EnergyDead: return "EnergyDead";
    }
    return "?";
}

std::optional<TraceKind> trace_kind_from_string(const std::string& s)
{
    static const std::pair<const char*, TraceKind> table[] = {
        {"Tx", TraceKind::Tx},           {"Rx", TraceKind::Rx},
        {"Drop", TraceKind::Drop},       {"Expire", TraceKind::Expire},
        {"StateChange", TraceKind::StateChange},
        {"EnergyDead", TraceKind::EnergyDead},
    };
    for (const auto& [name, kind] : table)
        if (s == name)
            return kind;
    return std::nullopt;
}

void TraceLog::append(const TraceEvent& ev)
{
    if (!events_.empty() && ev.t < events_.back().t)
        throw std::logic_error("trace timestamps must be nondecreasing");
    events_.push_back(ev);
}

void TraceLog::write_csv(std::ostream& out) const
{
    out << "t,kind,node,pkt_id,pkt_kind,src,dst,ttl,size_bits,flow_id\n";
    char buf[64];
    for (const auto& ev : events_) {
        std::snprintf(buf, sizeof buf, "%.6f", ev.t);
        out << buf << ',' << to_string(ev.kind) << ',' << ev.node << ','
            << ev.pkt_id << ',' << to_string(ev.pkt_kind) << ',' << ev.src
            << ',' << ev.dst << ',' << ev.ttl << ',' << ev.size_bits << ',';
        if (ev.flow_id >= 0)
            out << ev.flow_id;
        out << '\n';
    }
}

void TraceLog::write_csv_file(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open trace file for writing: " + path);
    write_csv(out);
    if (!out)
        throw std::runtime_error("error writing trace file: " + path);
}

static std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

TraceLog TraceLog::read_csv(std::istream& in)
{
    TraceLog log;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty trace file");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto f = split_csv_line(line);
        if (f.size() != 10)
            throw std::runtime_error("malformed trace line: " + line);
        TraceEvent ev;
        ev.t = std::stod(f[0]);
        auto kind = trace_kind_from_string(f[1]);
        auto pkind = message_kind_from_string(f[4]);
        if (!kind || !pkind)
            throw std::runtime_error("malformed trace line: " + line);
        ev.kind = *kind;
        ev.node = static_cast<NodeId>(std::stoul(f[2]));
        ev.pkt_id = std::stoull(f[3]);
        ev.pkt_kind = *pkind;
        ev.src = static_cast<NodeId>(std::stoul(f[5]));
        ev.dst = static_cast<NodeId>(std::stoul(f[6]));
        ev.ttl = std::stoi(f[7]);
        ev.size_bits = std::stoi(f[8]);
        ev.flow_id = f[9].empty() ? -1 : std::stoll(f[9]);
        log.append(ev);
    }
    return log;
}

TraceLog TraceLog::read_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open trace file: " + path);
    return read_csv(in);
}

}  // namespace manet
