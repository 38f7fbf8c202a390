#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "manet/core.hpp"
#include "manet/engine.hpp"

namespace manet {

struct ProtocolParams
{
    double timeout_period = 30.0;
    double ifthres = 4.0;
    double k = 1.0;
    double share_fraction = 0.5;
    int batch_size = 4;
    int ttl_max = 16;
    double e_min = 0.05;  // joules: consent floor
    int q_max = 16;       // consent ceiling on pending tx queue
    std::size_t cache_capacity = 64;
    std::size_t buffer_capacity = 32;
    double burst_gap_s = 0.5;       // flow-gap that ends "ongoing transactions"
    double batch_interval_s = 0.02;
    double purge_interval_s = 1.0;

    // Mode switches. Blind flooding = single full-ttl floods, no cached
    // replies, no sharing; friendshare enables all three.
    bool expanding_ring = true;
    bool cached_replies = true;
    bool sharing_enabled = true;

    static ProtocolParams flooding()
    {
        ProtocolParams p;
        p.expanding_ring = false;
        p.cached_replies = false;
        p.sharing_enabled = false;
        return p;
    }
};

// Next expanding-ring TTL: doubles, capped at ttl_max.
inline int next_ring_ttl(int prev_ttl, int ttl_max)
{
    if (prev_ttl < 1)
        throw std::invalid_argument("next_ring_ttl: prev_ttl must be >= 1");
    return std::min(2 * prev_ttl, ttl_max);
}

struct DiscoveryState
{
    NodeId target = 0;
    int current_ttl = 1;
    int round = 1;
    std::uint64_t outstanding_req_id = 0;
    SimTime started_at = 0.0;
};

enum class SharePhase
{
    Requested,
    Consented,
    Streaming,
    Satiated,
    Done,
    Rejected
};

struct ShareSession
{
    NodeId receiver = 0;  // route exposer
    NodeId sender = 0;    // route acquirer
    SharePhase phase = SharePhase::Requested;
    long routes_sent = 0;
    long quota = 0;
    std::vector<SharedRoute> pending;  // exposer side: stream in order
    std::size_t cursor = 0;
    bool satiated_sent = false;  // acquirer side
};

struct NodeStats
{
    // (forward time, expires_at of the justifying entry) per Data forward.
    std::vector<std::pair<SimTime, SimTime>> data_forward_audit;
    long purge_removed = 0;
    long exposed_routes = 0;  // E_n: routes streamed out as exposer
    long gratis_sent = 0;
    long giveups = 0;
};

enum class RequestOutcome
{
    CacheHit,
    DiscoveryStarted,
    DiscoveryPending
};

// On-demand routing with route cache + timeout. In friendshare mode adds
// expanding-ring discovery, cached "destination is my friend" replies,
// intimacy-gated neighborhood sharing, satiation and Gratis-Reply/earmark
// reconciliation. In flooding mode it degenerates to blind network-wide
// request floods over the same cache machinery.
class FriendshareNode : public ProtocolNode
{
  public:
    FriendshareNode(NodeId id, ProtocolParams params);

    void start(Engine& engine, SimTime now) override;
    void on_packet(Engine& engine, const Packet& pkt, NodeId from,
                   SimTime now) override;
    void on_timer(Engine& engine, const TimerMsg& msg, SimTime now) override;
    void send_data(Engine& engine, Packet pkt, SimTime now) override;

    RequestOutcome request_route(Engine& engine, NodeId dst, SimTime now);

    RouteCache& cache() { return cache_; }
    const RouteCache& cache() const { return cache_; }
    const ProtocolParams& params() const { return params_; }
    const NodeStats& stats() const { return stats_; }
    const std::map<NodeId, IntimacyRecord>& intimacy() const { return intimacy_; }
    const std::map<std::uint64_t, ShareSession>& exposer_sessions() const
    {
        return exposer_sessions_;
    }
    const std::map<std::uint64_t, ShareSession>& acquirer_sessions() const
    {
        return acquirer_sessions_;
    }
    const std::map<NodeId, DiscoveryState>& discoveries() const
    {
        return discoveries_;
    }
    std::size_t buffered() const { return buffer_.size(); }

  private:
    void on_route_request(Engine& engine, const Packet& pkt, NodeId from,
                          SimTime now);
    void on_route_reply(Engine& engine, const Packet& pkt, NodeId from,
                        SimTime now);
    void on_data(Engine& engine, const Packet& pkt, NodeId from, SimTime now);
    void on_share_request(Engine& engine, const Packet& pkt, SimTime now);
    void on_share_consent(Engine& engine, const Packet& pkt, SimTime now);
    void on_share_batch(Engine& engine, const Packet& pkt, SimTime now);
    void on_satiated(const Packet& pkt);
    void on_gratis_reply(Engine& engine, const Packet& pkt, SimTime now);
    void on_discovery_timeout(Engine& engine, NodeId target,
                              std::uint64_t req_id, SimTime now);

    void forward_data(Engine& engine, const Packet& pkt, SimTime now);
    bool forward_control(Engine& engine, Packet pkt, SimTime now);
    void broadcast_request(Engine& engine, NodeId target, int ttl, SimTime now);
    void install_reconciled(const Route& candidate, SimTime now);
    void flush_buffer(Engine& engine, NodeId dest, SimTime now);
    void buffer_packet(Engine& engine, const Packet& pkt, SimTime now);
    void start_share(Engine& engine, NodeId peer, SimTime now);
    void send_next_batch(Engine& engine, std::uint64_t session_id, SimTime now);
    double retry_timeout(Engine& engine, int ttl) const;
    std::uint64_t make_session_id();

    ProtocolParams params_;
    RouteCache cache_;
    std::set<std::pair<NodeId, std::uint64_t>> seen_requests_;
    std::map<NodeId, DiscoveryState> discoveries_;
    std::deque<Packet> buffer_;
    std::map<NodeId, IntimacyRecord> intimacy_;
    std::map<NodeId, std::uint64_t> burst_gen_;  // pending-share timer guard
    std::map<std::uint64_t, ShareSession> exposer_sessions_;
    std::map<std::uint64_t, ShareSession> acquirer_sessions_;
    std::uint64_t req_counter_ = 0;
    std::uint64_t session_counter_ = 0;
    NodeStats stats_;
};

// Control-packet sizes on the simulated wire, in bits.
inline constexpr int kRouteRequestBits = 256;
inline constexpr int kRouteReplyBits = 320;
inline constexpr int kShareRequestBits = 128;
inline constexpr int kShareConsentBits = 128;
inline constexpr int kSatiatedBits = 64;
inline constexpr int kGratisReplyBits = 224;
inline constexpr int kShareBatchHeaderBits = 64;
inline constexpr int kShareBatchRouteBits = 96;

}  // namespace manet
