#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace manet {

using NodeId = std::uint32_t;
using SimTime = double;  // seconds

// Reserved broadcast destination; never a valid NodeId.
inline constexpr NodeId kBroadcast = 0xffffffffu;

// Freshness stamp: reference time minus discovery time. Smaller = fresher.
inline double make_earmark(SimTime t_ref, SimTime discovered_at)
{
    return t_ref - discovered_at;
}

struct Route
{
    NodeId dest = 0;
    NodeId next_hop = 0;
    int hop_count = 1;
    SimTime discovered_at = 0.0;
    double earmark = 0.0;  // always t_ref - discovered_at
};

inline Route make_route(NodeId dest, NodeId next_hop, int hop_count,
                        SimTime discovered_at, SimTime t_ref)
{
    if (hop_count < 1)
        throw std::invalid_argument("route hop_count must be >= 1");
    return Route{dest, next_hop, hop_count, discovered_at,
                 make_earmark(t_ref, discovered_at)};
}

// Selects the fresher of two routes to the same destination: smaller
// earmark, then fewer hops, then smaller next_hop id.
const Route& fresher(const Route& a, const Route& b);

struct CacheEntry
{
    Route route;
    SimTime installed_at = 0.0;
    SimTime expires_at = 0.0;
};

// Expiry boundary is inclusive: now == expires_at means expired.
inline bool is_expired(const CacheEntry& entry, SimTime now)
{
    return now >= entry.expires_at;
}

// Per-destination route store with a timeout on every entry. Lookups never
// return expired entries; overflow evicts the entry closest to expiry.
class RouteCache
{
  public:
    explicit RouteCache(std::size_t capacity = 64);

    std::optional<CacheEntry> lookup(NodeId dest, SimTime now) const;
    void install(const Route& route, SimTime now, double timeout_period);
    void erase(NodeId dest);
    std::size_t purge_expired(SimTime now);

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::map<NodeId, CacheEntry>& entries() const { return entries_; }

  private:
    std::map<NodeId, CacheEntry> entries_;
    std::size_t capacity_;
};

enum class PeerState
{
    Stranger,
    Friend
};

// Per-peer trust state. intimacy == k * packets_received at all times;
// Friend never regresses to Stranger within a scenario.
struct IntimacyRecord
{
    NodeId peer = 0;
    long packets_received = 0;
    double intimacy = 0.0;
    PeerState state = PeerState::Stranger;
    bool share_done = false;
};

// Counts one received packet; returns true exactly when the record crosses
// IFTHRES (strictly) and is promoted Stranger -> Friend.
bool record_packet_from_peer(IntimacyRecord& rec, double k, double ifthres);

enum class MessageKind
{
    Data,
    RouteRequest,
    RouteReply,
    LinkState,
    ShareRequest,
    ShareConsent,
    ShareBatch,
    Satiated,
    GratisReply
};

const char* to_string(MessageKind kind);
std::optional<MessageKind> message_kind_from_string(const std::string& s);

struct DataPayload
{
};

struct RouteRequestPayload
{
    NodeId target = 0;
    std::uint64_t req_id = 0;
};

struct RouteReplyPayload
{
    NodeId target = 0;
    std::uint64_t req_id = 0;
    NodeId requester = 0;
    int hops_to_target = 0;   // from the current forwarder to target
    SimTime discovered_at = 0.0;
    bool from_cache = false;  // cached "destination is my friend" reply
};

struct LinkStateEntry
{
    NodeId origin = 0;
    std::vector<NodeId> neighbor_set;
    std::uint64_t seq_no = 0;
    SimTime received_at = 0.0;
};

struct LinkStatePayload
{
    std::vector<LinkStateEntry> entries;
};

struct SharedRoute
{
    NodeId dest = 0;
    int hop_count = 0;  // from the exposing node
    SimTime discovered_at = 0.0;
};

struct ShareRequestPayload
{
    std::uint64_t session_id = 0;
};

struct ShareConsentPayload
{
    std::uint64_t session_id = 0;
    bool accept = false;
};

struct ShareBatchPayload
{
    std::uint64_t session_id = 0;
    std::vector<SharedRoute> routes;
    bool final_batch = false;
};

struct SatiatedPayload
{
    std::uint64_t session_id = 0;
};

struct GratisReplyPayload
{
    NodeId dest = 0;
    SharedRoute corrected;
};

using PacketPayload =
    std::variant<DataPayload, RouteRequestPayload, RouteReplyPayload,
                 LinkStatePayload, ShareRequestPayload, ShareConsentPayload,
                 ShareBatchPayload, SatiatedPayload, GratisReplyPayload>;

struct Packet
{
    std::uint64_t pkt_id = 0;
    MessageKind kind = MessageKind::Data;
    NodeId src = 0;
    NodeId dst = kBroadcast;
    int ttl = 0;
    int hops_traversed = 0;
    int size_bits = 0;
    SimTime created_at = 0.0;
    std::int64_t flow_id = -1;  // Data only, -1 otherwise
    PacketPayload payload;
};

}  // namespace manet
