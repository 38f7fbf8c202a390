#include "manet/core.hpp"

#include <algorithm>

namespace manet {

const Route& fresher(const Route& a, const Route& b)
{
    if (a.dest != b.dest)
        throw std::invalid_argument("fresher: routes have different destinations");
    if (a.earmark != b.earmark)
        return a.earmark < b.earmark ? a : b;
    if (a.hop_count != b.hop_count)
        return a.hop_count < b.hop_count ? a : b;
    if (a.next_hop != b.next_hop)
        return a.next_hop < b.next_hop ? a : b;
    return a;
}

RouteCache::RouteCache(std::size_t capacity) : capacity_(capacity)
{
    if (capacity_ < 1)
        throw std::invalid_argument("cache capacity must be >= 1");
}

std::optional<CacheEntry> RouteCache::lookup(NodeId dest, SimTime now) const
{
    auto it = entries_.find(dest);
    if (it == entries_.end() || is_expired(it->second, now))
        return std::nullopt;
    return it->second;
}

void RouteCache::install(const Route& route, SimTime now, double timeout_period)
{
    auto it = entries_.find(route.dest);
    if (it == entries_.end() && entries_.size() >= capacity_) {
        // Evict the entry closest to expiry.
        auto victim = std::min_element(
            entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
                return a.second.expires_at < b.second.expires_at;
            });
        entries_.erase(victim);
    }
    entries_[route.dest] = CacheEntry{route, now, now + timeout_period};
}

void RouteCache::erase(NodeId dest)
{
    entries_.erase(dest);
}

std::size_t RouteCache::purge_expired(SimTime now)
{
    std::size_t removed = 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (is_expired(it->second, now)) {
            it = entries_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

bool record_packet_from_peer(IntimacyRecord& rec, double k, double ifthres)
{
    rec.packets_received += 1;
    rec.intimacy = k * static_cast<double>(rec.packets_received);
    if (rec.state == PeerState::Stranger && rec.intimacy > ifthres) {
        rec.state = PeerState::Friend;
        return true;
    }
    return false;
}

const char* to_string(MessageKind kind)
{
    switch (kind) {
        case MessageKind::Data: return "Data";
        case MessageKind::RouteRequest: return "RouteRequest";
        case MessageKind::RouteReply: return "RouteReply";
        case MessageKind::LinkState: return "LinkState";
        case MessageKind::ShareRequest: return "ShareRequest";
        case MessageKind::ShareConsent: return "ShareConsent";
        case MessageKind::ShareBatch: return "ShareBatch";
        case MessageKind::Satiated: return "Satiated";
        case MessageKind::GratisReply: return "GratisReply";
    }
    return "?";
}

std::optional<MessageKind> message_kind_from_string(const std::string& s)
{
    static const std::pair<const char*, MessageKind> table[] = {
        {"Data", MessageKind::Data},
        {"RouteRequest", MessageKind::RouteRequest},
        {"RouteReply", MessageKind::RouteReply},
        {"LinkState", MessageKind::LinkState},
        {"ShareRequest", MessageKind::ShareRequest},
        {"ShareConsent", MessageKind::ShareConsent},
        {"ShareBatch", MessageKind::ShareBatch},
        {"Satiated", MessageKind::Satiated},
        {"GratisReply", MessageKind::GratisReply},
    };
    for (const auto& [name, kind] : table)
        if (s == name)
            return kind;
    return std::nullopt;
}

}  // namespace manet
