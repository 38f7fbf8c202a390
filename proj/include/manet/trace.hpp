#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "manet/core.hpp"

namespace manet {

enum class TraceKind
{
    Tx,
    Rx,
    Drop,
    Expire,
    StateChange,
    EnergyDead
};

const char* to_string(TraceKind kind);
std::optional<TraceKind> trace_kind_from_string(const std::string& s);

// One append-only record per send/receive/drop/expire/state event. A
// StateChange row with pkt_kind == Data marks a data-packet origination at
// its source (the instant the traffic generator hands it to the protocol);
// other StateChange rows mark friend promotions.
struct TraceEvent
{
    SimTime t = 0.0;
    TraceKind kind = TraceKind::Tx;
    NodeId node = 0;
    std::uint64_t pkt_id = 0;
    MessageKind pkt_kind = MessageKind::Data;
    NodeId src = 0;
    NodeId dst = 0;
    int ttl = 0;
    int size_bits = 0;
    std::int64_t flow_id = -1;  // -1 = none
};

class TraceLog
{
  public:
    void append(const TraceEvent& ev);

    const std::vector<TraceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

    void write_csv(std::ostream& out) const;
    void write_csv_file(const std::string& path) const;
    static TraceLog read_csv(std::istream& in);
    static TraceLog read_csv_file(const std::string& path);

  private:
    std::vector<TraceEvent> events_;
};

}  // namespace manet
