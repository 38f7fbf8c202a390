#pragma once

#include <cstdint>
#include <memory>
#include <queue>
#include <random>
#include <vector>

#include "manet/core.hpp"
#include "manet/trace.hpp"

namespace manet {

struct Position
{
    double x = 0.0;
    double y = 0.0;
};

// Row-major ceil(sqrt(n)) x ceil(sqrt(n)) lattice with half-spacing margins;
// the first n lattice points are used.
std::vector<Position> place_grid(int n, double area_x, double area_y);

std::vector<Position> place_uniform(int n, double area_x, double area_y,
                                    std::mt19937_64& rng);

// All nodes other than `node` within Euclidean distance <= range (inclusive).
std::vector<NodeId> neighbors(NodeId node, const std::vector<Position>& positions,
                              double range);

enum class MobilityModel
{
    Static,
    Waypoint
};

struct MobilityConfig
{
    MobilityModel model = MobilityModel::Static;
    double v_min = 1.0;   // m/s
    double v_max = 10.0;  // m/s
    double pause_s = 2.0;
    double step_s = 0.5;  // position-update granularity
};

struct EngineParams
{
    std::vector<Position> positions;
    double area_x = 1000.0;
    double area_y = 1000.0;
    double range_m = 250.0;
    double latency_base_s = 0.002;    // L0
    double latency_jitter_s = 0.003;  // J, uniform [0, J)
    double initial_energy_j = 50.0;
    double tx_cost_per_bit = 1e-6;
    double rx_cost_per_bit = 0.5e-6;
    MobilityConfig mobility;
    std::uint64_t seed = 1;
    double t_ref = 0.0;  // scenario-wide earmark reference (simulation end)
};

struct TimerMsg
{
    int kind = 0;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
};

class Engine;

class ProtocolNode
{
  public:
    explicit ProtocolNode(NodeId id) : id_(id) {}
    virtual ~ProtocolNode() = default;

    virtual void start(Engine& /*engine*/, SimTime /*now*/) {}
    virtual void on_packet(Engine& engine, const Packet& pkt, NodeId from,
                           SimTime now) = 0;
    virtual void on_timer(Engine& /*engine*/, const TimerMsg& /*msg*/,
                          SimTime /*now*/) {}
    // Origination of a data packet at this node (the traffic source).
    virtual void send_data(Engine& engine, Packet pkt, SimTime now) = 0;

    NodeId id() const { return id_; }

  private:
    NodeId id_;
};

struct FlowSpec
{
    std::int64_t flow_id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double rate_pps = 1.0;
    int payload_bits = 512;
    double start_s = 0.0;
    double end_s = 0.0;
};

struct TxResult
{
    bool delivered = false;  // unicast: scheduled to the addressed neighbor
    int fanout = 0;          // broadcast: number of scheduled deliveries
};

// Single-threaded deterministic event scheduler with unit-disk radio,
// per-packet energy accounting and optional random-waypoint mobility.
// Draw order from the shared generator: uniform placement (if any), initial
// waypoints in node-id order, then strictly event order (mobility redraws
// and per-delivery jitter as events fire).
class Engine
{
  public:
    explicit Engine(EngineParams params);

    void add_node(std::unique_ptr<ProtocolNode> node);
    void add_flow(const FlowSpec& flow);

    void run_until(SimTime t_end);

    SimTime now() const { return clock_; }
    double t_ref() const { return params_.t_ref; }
    std::uint64_t next_pkt_id() { return ++pkt_id_counter_; }

    // Sends pkt from `from` at the current time. radio_dst is the link-layer
    // target: kBroadcast schedules one delivery per in-range neighbor;
    // otherwise one delivery to radio_dst, or a Drop trace when it is out of
    // range. The sender is charged tx energy in every case.
    TxResult transmit(NodeId from, const Packet& pkt, NodeId radio_dst);

    void schedule_timer(NodeId node, double delay, const TimerMsg& msg);

    std::vector<NodeId> neighbors_of(NodeId node) const;
    const Position& position_of(NodeId node) const { return positions_[node]; }
    double residual_energy(NodeId node) const { return residual_[node]; }
    bool alive(NodeId node) const { return residual_[node] > 0.0; }
    std::size_t node_count() const { return nodes_.size(); }
    ProtocolNode& node(NodeId id) { return *nodes_[id]; }

    TraceLog& trace() { return trace_; }
    const TraceLog& trace() const { return trace_; }
    const EngineParams& params() const { return params_; }
    std::mt19937_64& rng() { return rng_; }

    // Protocol-visible trace helpers.
    void log_drop(SimTime t, NodeId node, const Packet& pkt);
    void log_expire(SimTime t, NodeId node, NodeId dest, int count);
    void log_state_change(SimTime t, NodeId node, const Packet& pkt);

  private:
    enum class EventAction
    {
        Deliver,
        Timer,
        MobilityStep,
        FlowPacket
    };

    struct Event
    {
        SimTime fire_at = 0.0;
        std::uint64_t seq = 0;
        EventAction action = EventAction::Timer;
        NodeId target = 0;
        NodeId from = 0;  // Deliver: transmitting node
        Packet packet;
        TimerMsg timer;
        FlowSpec flow;  // FlowPacket

        bool operator>(const Event& other) const
        {
            if (fire_at != other.fire_at)
                return fire_at > other.fire_at;
            return seq > other.seq;
        }
    };

    void push_event(Event ev);
    void fire(const Event& ev);
    void deliver(const Event& ev);
    void mobility_step(NodeId node);
    void charge(NodeId node, int bits, double cost_per_bit);
    TraceEvent trace_row(SimTime t, TraceKind kind, NodeId node,
                         const Packet& pkt) const;

    EngineParams params_;
    std::vector<Position> positions_;
    std::vector<double> residual_;
    std::vector<bool> dead_logged_;
    std::vector<std::unique_ptr<ProtocolNode>> nodes_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::uint64_t event_seq_ = 0;
    std::uint64_t pkt_id_counter_ = 0;
    SimTime clock_ = 0.0;
    std::mt19937_64 rng_;
    TraceLog trace_;
    bool started_ = false;

    struct WaypointState
    {
        Position target;
        double speed = 0.0;
        double pause_until = 0.0;
    };
    std::vector<WaypointState> waypoints_;
};

}  // namespace manet
