#include "manet/friendshare.hpp"

#include <algorithm>
#include <cmath>

namespace manet {

namespace {

constexpr int kTimerDiscovery = 1;
constexpr int kTimerBurstGap = 2;
constexpr int kTimerShareBatch = 3;
constexpr int kTimerPurge = 4;

constexpr int kControlTtl = 64;

}  // namespace

FriendshareNode::FriendshareNode(NodeId id, ProtocolParams params)
    : ProtocolNode(id), params_(params), cache_(params.cache_capacity)
{
}

void FriendshareNode::start(Engine& engine, SimTime)
{
    engine.schedule_timer(id(), params_.purge_interval_s,
                          TimerMsg{kTimerPurge, 0, 0});
}

double FriendshareNode::retry_timeout(Engine& engine, int ttl) const
{
    const auto& p = engine.params();
    return 2.0 * ttl * (p.latency_base_s + p.latency_jitter_s);
}

std::uint64_t FriendshareNode::make_session_id()
{
    // Unique across nodes: high bits carry the node id.
    return (static_cast<std::uint64_t>(id()) << 32) | ++session_counter_;
}

void FriendshareNode::send_data(Engine& engine, Packet pkt, SimTime now)
{
    forward_data(engine, pkt, now);
}

void FriendshareNode::install_reconciled(const Route& candidate, SimTime now)
{
    auto existing = cache_.lookup(candidate.dest, now);
    if (!existing) {
        cache_.install(candidate, now, params_.timeout_period);
        return;
    }
    const Route& kept = fresher(existing->route, candidate);
    cache_.install(kept, now, params_.timeout_period);
}

RequestOutcome FriendshareNode::request_route(Engine& engine, NodeId dst,
                                              SimTime now)
{
    if (dst == id())
        throw std::logic_error("request_route: source equals destination");
    if (cache_.lookup(dst, now))
        return RequestOutcome::CacheHit;
    cache_.erase(dst);  // drop an expired leftover, if any
    if (discoveries_.count(dst))
        return RequestOutcome::DiscoveryPending;
    int ttl = params_.expanding_ring ? 1 : params_.ttl_max;
    DiscoveryState state;
    state.target = dst;
    state.current_ttl = ttl;
    state.round = 1;
    state.outstanding_req_id = ++req_counter_;
    state.started_at = now;
    discoveries_[dst] = state;
    broadcast_request(engine, dst, ttl, now);
    return RequestOutcome::DiscoveryStarted;
}

void FriendshareNode::broadcast_request(Engine& engine, NodeId target, int ttl,
                                        SimTime now)
{
    const auto& state = discoveries_.at(target);
    Packet pkt;
    pkt.pkt_id = engine.next_pkt_id();
    pkt.kind = MessageKind::RouteRequest;
    pkt.src = id();
    pkt.dst = kBroadcast;
    pkt.ttl = ttl;
    pkt.size_bits = kRouteRequestBits;
    pkt.created_at = now;
    pkt.payload = RouteRequestPayload{target, state.outstanding_req_id};
    seen_requests_.insert({id(), state.outstanding_req_id});
    engine.transmit(id(), pkt, kBroadcast);
    engine.schedule_timer(id(), retry_timeout(engine, ttl),
                          TimerMsg{kTimerDiscovery, target,
                                   state.outstanding_req_id});
}

void FriendshareNode::on_packet(Engine& engine, const Packet& pkt, NodeId from,
                                SimTime now)
{
    switch (pkt.kind) {
        case MessageKind::RouteRequest:
            on_route_request(engine, pkt, from, now);
            return;
        case MessageKind::RouteReply:
            on_route_reply(engine, pkt, from, now);
            return;
        case MessageKind::Data:
            on_data(engine, pkt, from, now);
            return;
        default:
            break;
    }
    if (pkt.dst != id()) {
        // Relay duty for unicast control traffic passing through.
        Packet fwd = pkt;
        fwd.ttl -= 1;
        fwd.hops_traversed += 1;
        if (fwd.ttl <= 0) {
            engine.log_drop(now, id(), pkt);
            return;
        }
        forward_control(engine, fwd, now);
        return;
    }
    switch (pkt.kind) {
        case MessageKind::ShareRequest:
            on_share_request(engine, pkt, now);
            break;
        case MessageKind::ShareConsent:
            on_share_consent(engine, pkt, now);
            break;
        case MessageKind::ShareBatch:
            on_share_batch(engine, pkt, now);
            break;
        case MessageKind::Satiated:
            on_satiated(pkt);
            break;
        case MessageKind::GratisReply:
            on_gratis_reply(engine, pkt, now);
            break;
        default:
            break;
    }
}

bool FriendshareNode::forward_control(Engine& engine, Packet pkt, SimTime now)
{
    auto entry = cache_.lookup(pkt.dst, now);
    if (!entry) {
        engine.log_drop(now, id(), pkt);
        return false;
    }
    auto result = engine.transmit(id(), pkt, entry->route.next_hop);
    if (!result.delivered) {
        cache_.erase(pkt.dst);
        return false;
    }
    return true;
}

void FriendshareNode::on_route_request(Engine& engine, const Packet& pkt,
                                       NodeId from, SimTime now)
{
    const auto& p = std::get<RouteRequestPayload>(pkt.payload);
    if (!seen_requests_.insert({pkt.src, p.req_id}).second)
        return;  // duplicate (src, req_id)
    // Reverse path back to the requester.
    install_reconciled(make_route(pkt.src, from, pkt.hops_traversed + 1, now,
                                  engine.t_ref()),
                       now);
    auto send_reply = [&](int hops_to_target, SimTime discovered_at,
                          bool from_cache) {
        Packet reply;
        reply.pkt_id = engine.next_pkt_id();
        reply.kind = MessageKind::RouteReply;
        reply.src = id();
        reply.dst = pkt.src;
        reply.ttl = kControlTtl;
        reply.size_bits = kRouteReplyBits;
        reply.created_at = now;
        reply.payload = RouteReplyPayload{p.target, p.req_id, pkt.src,
                                          hops_to_target, discovered_at,
                                          from_cache};
        forward_control(engine, reply, now);
    };
    if (p.target == id()) {
        send_reply(0, now, false);
        return;
    }
    if (params_.cached_replies && p.target != pkt.src) {
        if (auto entry = cache_.lookup(p.target, now)) {
            // "The destination is my friend": this node becomes the relay
            // next hop for the requester.
            send_reply(entry->route.hop_count, entry->route.discovered_at,
                       true);
            return;
        }
    }
    if (pkt.ttl > 1) {
        Packet fwd = pkt;
        fwd.ttl -= 1;
        fwd.hops_traversed += 1;
        engine.transmit(id(), fwd, kBroadcast);
    }
}

void FriendshareNode::on_route_reply(Engine& engine, const Packet& pkt,
                                     NodeId from, SimTime now)
{
    const auto& p = std::get<RouteReplyPayload>(pkt.payload);
    install_reconciled(make_route(p.target, from, p.hops_to_target + 1,
                                  p.discovered_at, engine.t_ref()),
                       now);
    if (p.requester == id()) {
        discoveries_.erase(p.target);  // late replies accepted too
        flush_buffer(engine, p.target, now);
        return;
    }
    Packet fwd = pkt;
    fwd.ttl -= 1;
    fwd.hops_traversed += 1;
    auto& fp = std::get<RouteReplyPayload>(fwd.payload);
    fp.hops_to_target += 1;
    if (fwd.ttl <= 0) {
        engine.log_drop(now, id(), pkt);
        return;
    }
    forward_control(engine, fwd, now);
}

void FriendshareNode::on_discovery_timeout(Engine& engine, NodeId target,
                                           std::uint64_t req_id, SimTime now)
{
    auto it = discoveries_.find(target);
    if (it == discoveries_.end() || it->second.outstanding_req_id != req_id)
        return;  // resolved or superseded
    auto& state = it->second;
    if (state.current_ttl < params_.ttl_max) {
        state.current_ttl = next_ring_ttl(state.current_ttl, params_.ttl_max);
        state.round += 1;
        state.outstanding_req_id = ++req_counter_;
        broadcast_request(engine, target, state.current_ttl, now);
        return;
    }
    // Give up this attempt; drop anything queued for the target.
    ++stats_.giveups;
    Packet marker;
    marker.pkt_id = 0;
    marker.kind = MessageKind::RouteRequest;
    marker.src = id();
    marker.dst = target;
    marker.ttl = state.current_ttl;
    engine.log_drop(now, id(), marker);
    for (auto bit = buffer_.begin(); bit != buffer_.end();) {
        if (bit->dst == target) {
            engine.log_drop(now, id(), *bit);
            bit = buffer_.erase(bit);
        } else {
            ++bit;
        }
    }
    discoveries_.erase(it);
}

void FriendshareNode::buffer_packet(Engine& engine, const Packet& pkt,
                                    SimTime now)
{
    if (buffer_.size() >= params_.buffer_capacity) {
        engine.log_drop(now, id(), buffer_.front());
        buffer_.pop_front();
    }
    buffer_.push_back(pkt);
}

void FriendshareNode::flush_buffer(Engine& engine, NodeId dest, SimTime now)
{
    std::vector<Packet> ready;
    for (auto it = buffer_.begin(); it != buffer_.end();) {
        if (it->dst == dest) {
            ready.push_back(*it);
            it = buffer_.erase(it);
        } else {
            ++it;
        }
    }
    for (const auto& pkt : ready)
        forward_data(engine, pkt, now);
}

void FriendshareNode::forward_data(Engine& engine, const Packet& pkt,
                                   SimTime now)
{
    auto entry = cache_.lookup(pkt.dst, now);
    if (!entry) {
        buffer_packet(engine, pkt, now);
        request_route(engine, pkt.dst, now);
        return;
    }
    stats_.data_forward_audit.emplace_back(now, entry->expires_at);
    auto result = engine.transmit(id(), pkt, entry->route.next_hop);
    if (!result.delivered) {
        // Next hop unreachable: invalidate and rediscover.
        cache_.erase(pkt.dst);
        buffer_packet(engine, pkt, now);
        request_route(engine, pkt.dst, now);
    }
}

void FriendshareNode::on_data(Engine& engine, const Packet& pkt, NodeId from,
                              SimTime now)
{
    // Path tracing: remember how to reach the data source.
    install_reconciled(make_route(pkt.src, from, pkt.hops_traversed + 1, now,
                                  engine.t_ref()),
                       now);
    if (pkt.dst != id()) {
        Packet fwd = pkt;
        fwd.ttl -= 1;
        fwd.hops_traversed += 1;
        if (fwd.ttl <= 0) {
            engine.log_drop(now, id(), pkt);
            return;
        }
        forward_data(engine, fwd, now);
        return;
    }
    if (!params_.sharing_enabled)
        return;
    auto& rec = intimacy_[pkt.src];
    rec.peer = pkt.src;
    bool promoted = record_packet_from_peer(rec, params_.k, params_.ifthres);
    if (promoted) {
        Packet marker;
        marker.pkt_id = engine.next_pkt_id();
        marker.kind = MessageKind::ShareRequest;
        marker.src = pkt.src;
        marker.dst = id();
        engine.log_state_change(now, id(), marker);
    }
    if (rec.state == PeerState::Friend && !rec.share_done) {
        // Share at the end of the ongoing burst: rearm a gap timer on every
        // packet; it fires only once the flow pauses.
        std::uint64_t gen = ++burst_gen_[pkt.src];
        engine.schedule_timer(id(), params_.burst_gap_s,
                              TimerMsg{kTimerBurstGap, pkt.src, gen});
    }
}

void FriendshareNode::start_share(Engine& engine, NodeId peer, SimTime now)
{
    auto& rec = intimacy_[peer];
    if (rec.state != PeerState::Friend || rec.share_done)
        return;
    rec.share_done = true;
    std::uint64_t sid = make_session_id();
    ShareSession session;
    session.receiver = id();
    session.sender = peer;
    session.phase = SharePhase::Requested;
    exposer_sessions_[sid] = session;
    Packet pkt;
    pkt.pkt_id = engine.next_pkt_id();
    pkt.kind = MessageKind::ShareRequest;
    pkt.src = id();
    pkt.dst = peer;
    pkt.ttl = kControlTtl;
    pkt.size_bits = kShareRequestBits;
    pkt.created_at = now;
    pkt.payload = ShareRequestPayload{sid};
    if (!forward_control(engine, pkt, now))
        exposer_sessions_[sid].phase = SharePhase::Rejected;
}

void FriendshareNode::on_share_request(Engine& engine, const Packet& pkt,
                                       SimTime now)
{
    const auto& p = std::get<ShareRequestPayload>(pkt.payload);
    bool accept = engine.residual_energy(id()) >= params_.e_min &&
                  buffer_.size() <= static_cast<std::size_t>(params_.q_max);
    ShareSession session;
    session.receiver = pkt.src;
    session.sender = id();
    session.phase = accept ? SharePhase::Consented : SharePhase::Rejected;
    acquirer_sessions_[p.session_id] = session;
    Packet reply;
    reply.pkt_id = engine.next_pkt_id();
    reply.kind = MessageKind::ShareConsent;
    reply.src = id();
    reply.dst = pkt.src;
    reply.ttl = kControlTtl;
    reply.size_bits = kShareConsentBits;
    reply.created_at = now;
    reply.payload = ShareConsentPayload{p.session_id, accept};
    forward_control(engine, reply, now);
}

void FriendshareNode::on_share_consent(Engine& engine, const Packet& pkt,
                                       SimTime now)
{
    const auto& p = std::get<ShareConsentPayload>(pkt.payload);
    auto it = exposer_sessions_.find(p.session_id);
    if (it == exposer_sessions_.end()) {
        engine.log_drop(now, id(), pkt);
        return;
    }
    auto& session = it->second;
    if (session.phase != SharePhase::Requested)
        return;
    if (!p.accept) {
        session.phase = SharePhase::Rejected;
        return;
    }
    session.phase = SharePhase::Consented;
    // Distance-priority exposure: closest contacts first.
    std::vector<SharedRoute> eligible;
    for (const auto& [dest, entry] : cache_.entries()) {
        if (is_expired(entry, now) || dest == session.sender || dest == id())
            continue;
        eligible.push_back({dest, entry.route.hop_count,
                            entry.route.discovered_at});
    }
    std::sort(eligible.begin(), eligible.end(),
              [](const SharedRoute& a, const SharedRoute& b) {
                  if (a.hop_count != b.hop_count)
                      return a.hop_count < b.hop_count;
                  return a.dest < b.dest;
              });
    long quota = static_cast<long>(
        std::ceil(params_.share_fraction * static_cast<double>(cache_.size())));
    if (quota > static_cast<long>(eligible.size()))
        quota = static_cast<long>(eligible.size());
    session.quota = quota;
    eligible.resize(static_cast<std::size_t>(quota));
    session.pending = std::move(eligible);
    session.cursor = 0;
    if (session.pending.empty()) {
        session.phase = SharePhase::Done;
        return;
    }
    session.phase = SharePhase::Streaming;
    send_next_batch(engine, p.session_id, now);
}

void FriendshareNode::send_next_batch(Engine& engine, std::uint64_t session_id,
                                      SimTime now)
{
    auto it = exposer_sessions_.find(session_id);
    if (it == exposer_sessions_.end())
        return;
    auto& session = it->second;
    if (session.phase != SharePhase::Streaming)
        return;  // satiated or torn down in the meantime
    std::size_t take = std::min<std::size_t>(
        static_cast<std::size_t>(params_.batch_size),
        session.pending.size() - session.cursor);
    std::vector<SharedRoute> routes(
        session.pending.begin() + static_cast<std::ptrdiff_t>(session.cursor),
        session.pending.begin() +
            static_cast<std::ptrdiff_t>(session.cursor + take));
    session.cursor += take;
    bool final_batch = session.cursor >= session.pending.size();
    Packet pkt;
    pkt.pkt_id = engine.next_pkt_id();
    pkt.kind = MessageKind::ShareBatch;
    pkt.src = id();
    pkt.dst = session.sender;
    pkt.ttl = kControlTtl;
    pkt.size_bits = kShareBatchHeaderBits +
                    kShareBatchRouteBits * static_cast<int>(routes.size());
    pkt.created_at = now;
    pkt.payload = ShareBatchPayload{session_id, std::move(routes), final_batch};
    forward_control(engine, pkt, now);
    session.routes_sent += static_cast<long>(take);
    stats_.exposed_routes += static_cast<long>(take);
    if (final_batch)
        session.phase = SharePhase::Done;
    else
        engine.schedule_timer(id(), params_.batch_interval_s,
                              TimerMsg{kTimerShareBatch, session_id, 0});
}

void FriendshareNode::on_share_batch(Engine& engine, const Packet& pkt,
                                     SimTime now)
{
    const auto& p = std::get<ShareBatchPayload>(pkt.payload);
    auto it = acquirer_sessions_.find(p.session_id);
    if (it == acquirer_sessions_.end() ||
        (it->second.phase != SharePhase::Consented &&
         it->second.phase != SharePhase::Streaming)) {
        engine.log_drop(now, id(), pkt);
        return;
    }
    auto& session = it->second;
    session.phase = SharePhase::Streaming;
    NodeId exposer = pkt.src;
    // Shared routes are reached via the exposer.
    auto to_exposer = cache_.lookup(exposer, now);
    for (const auto& r : p.routes) {
        if (r.dest == id())
            continue;
        int hops_to_exposer;
        NodeId via;
        if (to_exposer) {
            hops_to_exposer = to_exposer->route.hop_count;
            via = to_exposer->route.next_hop;
        } else {
            hops_to_exposer = 1;
            via = exposer;
        }
        Route candidate = make_route(r.dest, via, hops_to_exposer + r.hop_count,
                                     r.discovered_at, engine.t_ref());
        auto existing = cache_.lookup(r.dest, now);
        if (!existing) {
            cache_.install(candidate, now, params_.timeout_period);
            flush_buffer(engine, r.dest, now);
            continue;
        }
        const Route& kept = fresher(existing->route, candidate);
        if (&kept == &existing->route &&
            existing->route.earmark < candidate.earmark) {
            // Our copy is strictly fresher: correct the exposer.
            Packet gratis;
            gratis.pkt_id = engine.next_pkt_id();
            gratis.kind = MessageKind::GratisReply;
            gratis.src = id();
            gratis.dst = exposer;
            gratis.ttl = kControlTtl;
            gratis.size_bits = kGratisReplyBits;
            gratis.created_at = now;
            gratis.payload = GratisReplyPayload{
                r.dest,
                SharedRoute{r.dest, existing->route.hop_count,
                            existing->route.discovered_at}};
            forward_control(engine, gratis, now);
            ++stats_.gratis_sent;
        } else {
            cache_.install(kept, now, params_.timeout_period);
        }
    }
    session.routes_sent += static_cast<long>(p.routes.size());
    if (p.final_batch) {
        session.phase = SharePhase::Done;
        return;
    }
    if (cache_.size() >= cache_.capacity() && !session.satiated_sent) {
        session.satiated_sent = true;
        session.phase = SharePhase::Satiated;
        Packet stop;
        stop.pkt_id = engine.next_pkt_id();
        stop.kind = MessageKind::Satiated;
        stop.src = id();
        stop.dst = exposer;
        stop.ttl = kControlTtl;
        stop.size_bits = kSatiatedBits;
        stop.created_at = now;
        stop.payload = SatiatedPayload{p.session_id};
        forward_control(engine, stop, now);
    }
}

void FriendshareNode::on_satiated(const Packet& pkt)
{
    const auto& p = std::get<SatiatedPayload>(pkt.payload);
    auto it = exposer_sessions_.find(p.session_id);
    if (it == exposer_sessions_.end())
        return;
    if (it->second.phase == SharePhase::Streaming)
        it->second.phase = SharePhase::Satiated;
}

void FriendshareNode::on_gratis_reply(Engine& engine, const Packet& pkt,
                                      SimTime now)
{
    const auto& p = std::get<GratisReplyPayload>(pkt.payload);
    NodeId corrector = pkt.src;
    auto to_corrector = cache_.lookup(corrector, now);
    int hops;
    NodeId via;
    if (to_corrector) {
        hops = to_corrector->route.hop_count;
        via = to_corrector->route.next_hop;
    } else {
        hops = 1;
        via = corrector;
    }
    // Replace unconditionally; install even when no entry is held.
    Route corrected = make_route(p.dest, via, hops + p.corrected.hop_count,
                                 p.corrected.discovered_at, engine.t_ref());
    cache_.install(corrected, now, params_.timeout_period);
}

void FriendshareNode::on_timer(Engine& engine, const TimerMsg& msg, SimTime now)
{
    switch (msg.kind) {
        case kTimerDiscovery:
            on_discovery_timeout(engine, static_cast<NodeId>(msg.a), msg.b,
                                 now);
            break;
        case kTimerBurstGap: {
            NodeId peer = static_cast<NodeId>(msg.a);
            auto it = burst_gen_.find(peer);
            if (it != burst_gen_.end() && it->second == msg.b)
                start_share(engine, peer, now);
            break;
        }
        case kTimerShareBatch:
            send_next_batch(engine, msg.a, now);
            break;
        case kTimerPurge: {
            std::size_t removed = cache_.purge_expired(now);
            if (removed > 0) {
                stats_.purge_removed += static_cast<long>(removed);
                engine.log_expire(now, id(), kBroadcast,
                                  static_cast<int>(removed));
            }
            engine.schedule_timer(id(), params_.purge_interval_s,
                                  TimerMsg{kTimerPurge, 0, 0});
            break;
        }
        default:
            break;
    }
}

}  // namespace manet
