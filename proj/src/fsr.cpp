#include "manet/fsr.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace manet {

namespace {

constexpr int kTimerInner = 1;
constexpr int kTimerOuter = 2;

}  // namespace

CellAssignment assign_cells(const std::vector<Position>& positions,
                            double cell_size)
{
    if (cell_size <= 0.0)
        throw std::invalid_argument("assign_cells: cell_size must be positive");
    CellAssignment out;
    out.cell_size = cell_size;
    for (NodeId n = 0; n < positions.size(); ++n) {
        Cell c{static_cast<int>(std::floor(positions[n].x / cell_size)),
               static_cast<int>(std::floor(positions[n].y / cell_size))};
        out.cell_of[n] = c;
        auto it = out.gateway_of.find(c);
        if (it == out.gateway_of.end() || n < it->second)
            out.gateway_of[c] = n;
    }
    return out;
}

RouteTable compute_routes(NodeId self,
                          const std::map<NodeId, LinkStateEntry>& topology)
{
    // Undirected adjacency from the merged link-state entries.
    std::map<NodeId, std::set<NodeId>> adj;
    for (const auto& [origin, entry] : topology) {
        for (NodeId nbr : entry.neighbor_set) {
            adj[origin].insert(nbr);
            adj[nbr].insert(origin);
        }
    }
    RouteTable table;
    table.distance[self] = 0;
    std::deque<NodeId> queue{self};
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        int du = table.distance[u];
        auto it = adj.find(u);
        if (it == adj.end())
            continue;
        for (NodeId v : it->second) {
            if (!table.distance.count(v)) {
                table.distance[v] = du + 1;
                queue.push_back(v);
            }
        }
    }
    // Level order guarantees next_hop of all predecessors is already final.
    std::vector<NodeId> by_level;
    for (const auto& [n, d] : table.distance)
        if (n != self)
            by_level.push_back(n);
    std::sort(by_level.begin(), by_level.end(), [&](NodeId a, NodeId b) {
        if (table.distance[a] != table.distance[b])
            return table.distance[a] < table.distance[b];
        return a < b;
    });
    std::map<NodeId, NodeId> next_hop;
    for (NodeId v : by_level) {
        int dv = table.distance[v];
        NodeId best = kBroadcast;
        for (NodeId u : adj[v]) {
            auto du = table.distance.find(u);
            if (du == table.distance.end() || du->second != dv - 1)
                continue;
            NodeId cand = (u == self) ? v : next_hop[u];
            if (cand < best)
                best = cand;
        }
        next_hop[v] = best;
        table.routes[v] = {best, dv};
    }
    return table;
}

FsrNode::FsrNode(NodeId id, FsrConfig cfg, const CellAssignment& cells)
    : ProtocolNode(id), cfg_(cfg), cell_of_(cells.cell_of)
{
    my_cell_ = cell_of_.at(id);
    is_gateway_ = cells.gateway_of.at(my_cell_) == id;
}

void FsrNode::start(Engine& engine, SimTime now)
{
    refresh_own_entry(engine, now);
    table_ = compute_routes(id(), topology_);
    engine.schedule_timer(id(), cfg_.scope.period_inner,
                          TimerMsg{kTimerInner, 0, 0});
    engine.schedule_timer(id(), cfg_.scope.period_outer,
                          TimerMsg{kTimerOuter, 0, 0});
}

void FsrNode::refresh_own_entry(Engine& engine, SimTime now)
{
    LinkStateEntry own;
    own.origin = id();
    own.neighbor_set = engine.neighbors_of(id());
    own.seq_no = ++own_seq_;
    own.received_at = now;
    topology_[id()] = own;
}

void FsrNode::periodic_update(Engine& engine, SimTime now, bool full_table)
{
    refresh_own_entry(engine, now);
    table_ = compute_routes(id(), topology_);
    std::vector<LinkStateEntry> emit;
    for (const auto& [origin, entry] : topology_) {
        if (!full_table) {
            auto dit = table_.distance.find(origin);
            bool inner = dit != table_.distance.end() &&
                         scope_of(dit->second, cfg_.scope) == Scope::Inner;
            if (!inner)
                continue;
            if (cfg_.gateway_filter && !is_gateway_ &&
                cell_of_.at(origin) != my_cell_)
                continue;
        }
        emit.push_back(entry);
        auto dit = table_.distance.find(origin);
        bool inner = dit != table_.distance.end() &&
                     scope_of(dit->second, cfg_.scope) == Scope::Inner;
        if (inner)
            ++stats_.inner_entry_emissions[origin];
        else
            ++stats_.outer_entry_emissions[origin];
    }
    if (emit.empty())
        return;
    Packet pkt;
    pkt.pkt_id = engine.next_pkt_id();
    pkt.kind = MessageKind::LinkState;
    pkt.src = id();
    pkt.dst = kBroadcast;
    pkt.ttl = 1;  // link-state entries travel one hop per exchange
    pkt.size_bits = kLinkStateHeaderBits +
                    kLinkStateEntryBits * static_cast<int>(emit.size());
    pkt.created_at = now;
    pkt.payload = LinkStatePayload{std::move(emit)};
    engine.transmit(id(), pkt, kBroadcast);
    ++stats_.link_state_packets;
}

void FsrNode::on_timer(Engine& engine, const TimerMsg& msg, SimTime now)
{
    if (msg.kind == kTimerInner) {
        // Skip the inner round when a full-table round fires at this instant.
        double r = std::fmod(now, cfg_.scope.period_outer);
        bool outer_due = r < 1e-9 || cfg_.scope.period_outer - r < 1e-9;
        if (!outer_due)
            periodic_update(engine, now, false);
        engine.schedule_timer(id(), cfg_.scope.period_inner,
                              TimerMsg{kTimerInner, 0, 0});
    } else if (msg.kind == kTimerOuter) {
        periodic_update(engine, now, true);
        engine.schedule_timer(id(), cfg_.scope.period_outer,
                              TimerMsg{kTimerOuter, 0, 0});
    }
}

void FsrNode::on_link_state(Engine& /*engine*/,
                            const std::vector<LinkStateEntry>& entries,
                            SimTime now)
{
    bool merged = false;
    for (const auto& entry : entries) {
        auto it = topology_.find(entry.origin);
        if (it != topology_.end() && it->second.seq_no >= entry.seq_no)
            continue;  // stale or equal: no regression
        LinkStateEntry stored = entry;
        stored.received_at = now;
        topology_[entry.origin] = std::move(stored);
        merged = true;
    }
    if (merged)
        table_ = compute_routes(id(), topology_);
}

void FsrNode::on_packet(Engine& engine, const Packet& pkt, NodeId /*from*/,
                        SimTime now)
{
    if (pkt.kind == MessageKind::LinkState) {
        const auto& p = std::get<LinkStatePayload>(pkt.payload);
        std::vector<LinkStateEntry> good;
        for (const auto& entry : p.entries) {
            if (entry.origin >= engine.node_count()) {
                engine.log_drop(now, id(), pkt);
                ++stats_.malformed_dropped;
                continue;
            }
            good.push_back(entry);
        }
        on_link_state(engine, good, now);
        return;
    }
    if (pkt.kind != MessageKind::Data)
        return;
    if (pkt.dst == id())
        return;  // delivered
    Packet fwd = pkt;
    fwd.ttl -= 1;
    fwd.hops_traversed += 1;
    if (fwd.ttl <= 0) {
        engine.log_drop(now, id(), pkt);
        return;
    }
    auto it = table_.routes.find(fwd.dst);
    if (it == table_.routes.end()) {
        engine.log_drop(now, id(), pkt);
        return;
    }
    engine.transmit(id(), fwd, it->second.first);
}

void FsrNode::send_data(Engine& engine, Packet pkt, SimTime now)
{
    auto it = table_.routes.find(pkt.dst);
    if (it == table_.routes.end()) {
        engine.log_drop(now, id(), pkt);
        return;
    }
    engine.transmit(id(), pkt, it->second.first);
}

}  // namespace manet
