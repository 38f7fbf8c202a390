#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "manet/core.hpp"
#include "manet/engine.hpp"

namespace manet {

struct ScopeConfig
{
    int scope_radius = 2;        // hops
    double period_inner = 5.0;   // s
    double period_outer = 15.0;  // s
};

enum class Scope
{
    Inner,
    Outer
};

// Inner iff distance_hops <= scope_radius (boundary inclusive).
inline Scope scope_of(int distance_hops, const ScopeConfig& cfg)
{
    if (distance_hops < 0)
        throw std::invalid_argument("scope_of: negative hop distance");
    return distance_hops <= cfg.scope_radius ? Scope::Inner : Scope::Outer;
}

struct Cell
{
    int x = 0;
    int y = 0;
    auto operator<=>(const Cell&) const = default;
};

struct CellAssignment
{
    double cell_size = 0.0;
    std::map<NodeId, Cell> cell_of;
    std::map<Cell, NodeId> gateway_of;  // min-id member per nonempty cell
};

CellAssignment assign_cells(const std::vector<Position>& positions,
                            double cell_size);

// Breadth-first hop-count routes over the merged neighbor-set graph.
// Equal-cost ties resolve to the smallest feasible next-hop id; unreachable
// destinations are absent. Also fills hop distances for scope decisions.
struct RouteTable
{
    std::map<NodeId, std::pair<NodeId, int>> routes;  // dest -> (next_hop, hops)
    std::map<NodeId, int> distance;                   // dest -> hops (incl. self=0)
};

RouteTable compute_routes(NodeId self,
                          const std::map<NodeId, LinkStateEntry>& topology);

struct FsrConfig
{
    ScopeConfig scope;
    bool gateway_filter = true;
    double cell_size = 250.0;
};

struct FsrStats
{
    // entry-emissions per origin, split by the origin's scope at emission time
    std::map<NodeId, long> inner_entry_emissions;
    std::map<NodeId, long> outer_entry_emissions;
    long link_state_packets = 0;
    long malformed_dropped = 0;
};

// Fisheye State Routing over a grid-cell gateway overlay. Inner-scope
// entries go out every period_inner (gateway-filtered), the full table every
// period_outer (unfiltered).
class FsrNode : public ProtocolNode
{
  public:
    FsrNode(NodeId id, FsrConfig cfg, const CellAssignment& cells);

    void start(Engine& engine, SimTime now) override;
    void on_packet(Engine& engine, const Packet& pkt, NodeId from,
                   SimTime now) override;
    void on_timer(Engine& engine, const TimerMsg& msg, SimTime now) override;
    void send_data(Engine& engine, Packet pkt, SimTime now) override;

    void on_link_state(Engine& engine, const std::vector<LinkStateEntry>& entries,
                       SimTime now);

    const RouteTable& table() const { return table_; }
    const std::map<NodeId, LinkStateEntry>& topology() const { return topology_; }
    const FsrStats& stats() const { return stats_; }

  private:
    void periodic_update(Engine& engine, SimTime now, bool full_table);
    void refresh_own_entry(Engine& engine, SimTime now);

    FsrConfig cfg_;
    Cell my_cell_;
    bool is_gateway_ = false;
    std::map<NodeId, Cell> cell_of_;
    std::map<NodeId, LinkStateEntry> topology_;
    RouteTable table_;
    std::uint64_t own_seq_ = 0;
    long tick_ = 0;
    FsrStats stats_;
};

inline constexpr int kLinkStateHeaderBits = 64;
inline constexpr int kLinkStateEntryBits = 128;

}  // namespace manet
