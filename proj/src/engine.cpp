#include "manet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace manet {

std::vector<Position> place_grid(int n, double area_x, double area_y)
{
    if (n < 1)
        throw std::invalid_argument("place_grid: n must be >= 1");
    if (area_x <= 0.0 || area_y <= 0.0)
        throw std::invalid_argument("place_grid: area must be positive");
    int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    double sx = area_x / m;
    double sy = area_y / m;
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int col = i % m;
        int row = i / m;
        out.push_back({(col + 0.5) * sx, (row + 0.5) * sy});
    }
    return out;
}

std::vector<Position> place_uniform(int n, double area_x, double area_y,
                                    std::mt19937_64& rng)
{
    if (n < 1)
        throw std::invalid_argument("place_uniform: n must be >= 1");
    if (area_x <= 0.0 || area_y <= 0.0)
        throw std::invalid_argument("place_uniform: area must be positive");
    std::uniform_real_distribution<double> ux(0.0, area_x);
    std::uniform_real_distribution<double> uy(0.0, area_y);
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = ux(rng);
        double y = uy(rng);
        out.push_back({x, y});
    }
    return out;
}

static double dist(const Position& a, const Position& b)
{
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<NodeId> neighbors(NodeId node, const std::vector<Position>& positions,
                              double range)
{
    if (range <= 0.0)
        throw std::invalid_argument("neighbors: range must be positive");
    std::vector<NodeId> out;
    for (NodeId other = 0; other < positions.size(); ++other) {
        if (other == node)
            continue;
        if (dist(positions[node], positions[other]) <= range)
            out.push_back(other);
    }
    return out;
}

Engine::Engine(EngineParams params)
    : params_(std::move(params)),
      positions_(params_.positions),
      rng_(params_.seed)
{
    residual_.assign(positions_.size(), params_.initial_energy_j);
    dead_logged_.assign(positions_.size(), false);
}

void Engine::add_node(std::unique_ptr<ProtocolNode> node)
{
    if (node->id() != nodes_.size())
        throw std::logic_error("nodes must be added in id order");
    if (nodes_.size() >= positions_.size())
        throw std::logic_error("more nodes than positions");
    nodes_.push_back(std::move(node));
}

void Engine::add_flow(const FlowSpec& flow)
{
    if (flow.src >= positions_.size() || flow.dst >= positions_.size())
        throw std::invalid_argument("flow endpoints out of range");
    for (long k = 0;; ++k) {
        double t = flow.start_s + static_cast<double>(k) / flow.rate_pps;
        if (t > flow.end_s + 1e-9)
            break;
        Event ev;
        ev.fire_at = t;
        ev.action = EventAction::FlowPacket;
        ev.target = flow.src;
        ev.flow = flow;
        push_event(std::move(ev));
    }
}

void Engine::push_event(Event ev)
{
    if (ev.fire_at < clock_)
        throw std::logic_error("cannot schedule an event in the past");
    ev.seq = ++event_seq_;
    queue_.push(std::move(ev));
}

void Engine::run_until(SimTime t_end)
{
    if (!started_) {
        started_ = true;
        if (params_.mobility.model == MobilityModel::Waypoint) {
            waypoints_.resize(positions_.size());
            std::uniform_real_distribution<double> ux(0.0, params_.area_x);
            std::uniform_real_distribution<double> uy(0.0, params_.area_y);
            std::uniform_real_distribution<double> uv(params_.mobility.v_min,
                                                      params_.mobility.v_max);
            for (NodeId n = 0; n < positions_.size(); ++n) {
                waypoints_[n].target = {ux(rng_), uy(rng_)};
                waypoints_[n].speed = uv(rng_);
                Event ev;
                ev.fire_at = params_.mobility.step_s;
                ev.action = EventAction::MobilityStep;
                ev.target = n;
                push_event(std::move(ev));
            }
        }
        for (auto& node : nodes_)
            node->start(*this, clock_);
    }
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        clock_ = ev.fire_at;
        fire(ev);
    }
    clock_ = std::max(clock_, t_end);
}

void Engine::fire(const Event& ev)
{
    switch (ev.action) {
        case EventAction::Deliver:
            deliver(ev);
            break;
        case EventAction::Timer:
            nodes_[ev.target]->on_timer(*this, ev.timer, clock_);
            break;
        case EventAction::MobilityStep:
            mobility_step(ev.target);
            break;
        case EventAction::FlowPacket: {
            Packet pkt;
            pkt.pkt_id = next_pkt_id();
            pkt.kind = MessageKind::Data;
            pkt.src = ev.flow.src;
            pkt.dst = ev.flow.dst;
            pkt.ttl = 255;
            pkt.size_bits = ev.flow.payload_bits;
            pkt.created_at = clock_;
            pkt.flow_id = ev.flow.flow_id;
            // Origination marker: the denominator of PDR and the zero point
            // of the delay metric, independent of any buffering that follows.
            log_state_change(clock_, ev.flow.src, pkt);
            nodes_[ev.flow.src]->send_data(*this, pkt, clock_);
            break;
        }
    }
}

TraceEvent Engine::trace_row(SimTime t, TraceKind kind, NodeId node,
                             const Packet& pkt) const
{
    TraceEvent ev;
    ev.t = t;
    ev.kind = kind;
    ev.node = node;
    ev.pkt_id = pkt.pkt_id;
    ev.pkt_kind = pkt.kind;
    ev.src = pkt.src;
    ev.dst = pkt.dst;
    ev.ttl = pkt.ttl;
    ev.size_bits = pkt.size_bits;
    ev.flow_id = pkt.kind == MessageKind::Data ? pkt.flow_id : -1;
    return ev;
}

void Engine::log_drop(SimTime t, NodeId node, const Packet& pkt)
{
    trace_.append(trace_row(t, TraceKind::Drop, node, pkt));
}

void Engine::log_expire(SimTime t, NodeId node, NodeId dest, int count)
{
    TraceEvent ev;
    ev.t = t;
    ev.kind = TraceKind::Expire;
    ev.node = node;
    ev.src = node;
    ev.dst = dest;
    ev.size_bits = count;
    trace_.append(ev);
}

void Engine::log_state_change(SimTime t, NodeId node, const Packet& pkt)
{
    trace_.append(trace_row(t, TraceKind::StateChange, node, pkt));
}

void Engine::charge(NodeId node, int bits, double cost_per_bit)
{
    double& r = residual_[node];
    r = std::max(0.0, r - bits * cost_per_bit);
    if (r <= 0.0 && !dead_logged_[node]) {
        dead_logged_[node] = true;
        TraceEvent ev;
        ev.t = clock_;
        ev.kind = TraceKind::EnergyDead;
        ev.node = node;
        ev.src = node;
        ev.dst = node;
        trace_.append(ev);
    }
}

TxResult Engine::transmit(NodeId from, const Packet& pkt, NodeId radio_dst)
{
    TxResult result;
    if (!alive(from)) {
        log_drop(clock_, from, pkt);
        return result;
    }
    trace_.append(trace_row(clock_, TraceKind::Tx, from, pkt));
    charge(from, pkt.size_bits, params_.tx_cost_per_bit);
    std::uniform_real_distribution<double> jitter(0.0, params_.latency_jitter_s);
    auto schedule_delivery = [&](NodeId to) {
        Event ev;
        ev.fire_at = clock_ + params_.latency_base_s + jitter(rng_);
        ev.action = EventAction::Deliver;
        ev.target = to;
        ev.from = from;
        ev.packet = pkt;
        push_event(std::move(ev));
    };
    if (radio_dst == kBroadcast) {
        for (NodeId nbr : neighbors(from, positions_, params_.range_m)) {
            schedule_delivery(nbr);
            ++result.fanout;
        }
    } else {
        if (radio_dst < positions_.size() &&
            dist(positions_[from], positions_[radio_dst]) <= params_.range_m) {
            schedule_delivery(radio_dst);
            result.delivered = true;
            result.fanout = 1;
        } else {
            // Stale route: the addressed next hop is out of range.
            log_drop(clock_, from, pkt);
        }
    }
    return result;
}

void Engine::deliver(const Event& ev)
{
    NodeId to = ev.target;
    if (!alive(to)) {
        log_drop(clock_, to, ev.packet);
        return;
    }
    charge(to, ev.packet.size_bits, params_.rx_cost_per_bit);
    trace_.append(trace_row(clock_, TraceKind::Rx, to, ev.packet));
    nodes_[to]->on_packet(*this, ev.packet, ev.from, clock_);
}

void Engine::schedule_timer(NodeId node, double delay, const TimerMsg& msg)
{
    Event ev;
    ev.fire_at = clock_ + delay;
    ev.action = EventAction::Timer;
    ev.target = node;
    ev.timer = msg;
    push_event(std::move(ev));
}

std::vector<NodeId> Engine::neighbors_of(NodeId node) const
{
    return neighbors(node, positions_, params_.range_m);
}

void Engine::mobility_step(NodeId node)
{
    auto& wp = waypoints_[node];
    const auto& cfg = params_.mobility;
    if (clock_ >= wp.pause_until) {
        Position& pos = positions_[node];
        double dx = wp.target.x - pos.x;
        double dy = wp.target.y - pos.y;
        double d = std::sqrt(dx * dx + dy * dy);
        double step = wp.speed * cfg.step_s;
        if (d <= step) {
            pos = wp.target;
            wp.pause_until = clock_ + cfg.pause_s;
            std::uniform_real_distribution<double> ux(0.0, params_.area_x);
            std::uniform_real_distribution<double> uy(0.0, params_.area_y);
            std::uniform_real_distribution<double> uv(cfg.v_min, cfg.v_max);
            wp.target = {ux(rng_), uy(rng_)};
            wp.speed = uv(rng_);
        } else {
            pos.x += dx / d * step;
            pos.y += dy / d * step;
        }
    }
    Event ev;
    ev.fire_at = clock_ + cfg.step_s;
    ev.action = EventAction::MobilityStep;
    ev.target = node;
    push_event(std::move(ev));
}

}  // namespace manet
