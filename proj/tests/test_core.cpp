#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "manet/core.hpp"

using namespace manet;

TEST_CASE("is_expired: boundary inclusive")
{
    CacheEntry e;
    e.expires_at = 50.0;
    CHECK_FALSE(is_expired(e, 49.9));
    CHECK(is_expired(e, 50.0));
    CHECK(is_expired(e, 60.0));
}

TEST_CASE("make_earmark subtracts discovery from reference")
{
    CHECK(make_earmark(1000.0, 100.0) == doctest::Approx(900.0));
    CHECK(make_earmark(1000.0, 1000.0) == doctest::Approx(0.0));
    // Fresher discovery -> strictly smaller earmark at fixed t_ref.
    CHECK(make_earmark(1000.0, 999.0) < make_earmark(1000.0, 10.0));
}

TEST_CASE("make_earmark strictly decreasing in discovered_at")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int i = 0; i < 200; ++i) {
        double a = u(rng);
        double b = u(rng);
        if (a == b)
            continue;
        if (a < b)
            CHECK(make_earmark(1000.0, a) > make_earmark(1000.0, b));
        else
            CHECK(make_earmark(1000.0, a) < make_earmark(1000.0, b));
    }
}

TEST_CASE("fresher: earmark, then hops, then next hop id")
{
    Route a = make_route(9, 1, 3, 995.0, 1000.0);  // earmark 5
    Route b = make_route(9, 2, 3, 991.0, 1000.0);  // earmark 9
    CHECK(fresher(a, b).next_hop == a.next_hop);

    Route c = make_route(9, 1, 3, 995.0, 1000.0);
    Route d = make_route(9, 2, 2, 995.0, 1000.0);  // tie: fewer hops wins
    CHECK(fresher(c, d).next_hop == d.next_hop);

    Route e = make_route(9, 1, 3, 995.0, 1000.0);
    CHECK(&fresher(e, e) == &e);  // full tie: first argument

    Route other = make_route(8, 1, 3, 995.0, 1000.0);
    CHECK_THROWS_AS(fresher(a, other), std::invalid_argument);
}

TEST_CASE("fresher is symmetric for distinct routes")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t(0.0, 100.0);
    std::uniform_int_distribution<int> hops(1, 8);
    std::uniform_int_distribution<NodeId> nh(0, 5);
    for (int i = 0; i < 500; ++i) {
        Route a = make_route(3, nh(rng), hops(rng), t(rng), 100.0);
        Route b = make_route(3, nh(rng), hops(rng), t(rng), 100.0);
        const Route& ab = fresher(a, b);
        const Route& ba = fresher(b, a);
        CHECK(ab.earmark == ba.earmark);
        CHECK(ab.hop_count == ba.hop_count);
        CHECK(ab.next_hop == ba.next_hop);
    }
}

TEST_CASE("route cache: lookup never returns expired entries")
{
    RouteCache cache(8);
    cache.install(make_route(1, 2, 1, 0.0, 100.0), 0.0, 30.0);
    CHECK(cache.lookup(1, 29.9).has_value());
    CHECK_FALSE(cache.lookup(1, 30.0).has_value());
    CHECK_FALSE(cache.lookup(1, 31.0).has_value());
    CHECK_FALSE(cache.lookup(7, 1.0).has_value());
}

TEST_CASE("route cache: property - no expired entry survives a lookup sweep")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t(0.0, 50.0);
    RouteCache cache(16);
    for (NodeId d = 0; d < 30; ++d)
        cache.install(make_route(d, 0, 1, 0.0, 100.0), t(rng), 10.0);
    for (double now : {0.0, 5.0, 10.0, 25.0, 60.0, 70.0}) {
        for (NodeId d = 0; d < 30; ++d) {
            auto entry = cache.lookup(d, now);
            if (entry)
                CHECK_FALSE(is_expired(*entry, now));
        }
    }
}

TEST_CASE("route cache: overflow evicts the entry closest to expiry")
{
    RouteCache cache(2);
    cache.install(make_route(1, 0, 1, 0.0, 100.0), 0.0, 10.0);  // expires 10
    cache.install(make_route(2, 0, 1, 0.0, 100.0), 0.0, 30.0);  // expires 30
    cache.install(make_route(3, 0, 1, 0.0, 100.0), 1.0, 30.0);  // evicts dest 1
    CHECK(cache.size() == 2);
    CHECK_FALSE(cache.lookup(1, 2.0).has_value());
    CHECK(cache.lookup(2, 2.0).has_value());
    CHECK(cache.lookup(3, 2.0).has_value());
}

TEST_CASE("route cache: purge removes exactly the expired entries")
{
    RouteCache cache(8);
    cache.install(make_route(1, 0, 1, 0.0, 100.0), 0.0, 5.0);
    cache.install(make_route(2, 0, 1, 0.0, 100.0), 0.0, 6.0);
    cache.install(make_route(3, 0, 1, 0.0, 100.0), 0.0, 50.0);
    cache.install(make_route(4, 0, 1, 0.0, 100.0), 0.0, 4.0);
    cache.install(make_route(5, 0, 1, 0.0, 100.0), 0.0, 6.0);
    CHECK(cache.purge_expired(6.0) == 4);  // boundary inclusive
    CHECK(cache.size() == 1);
    RouteCache empty(4);
    CHECK(empty.purge_expired(1.0) == 0);
}

TEST_CASE("intimacy: invariant holds over any update sequence")
{
    std::mt19937_64 rng(5);
    for (double k : {1.0, 0.5, 2.5}) {
        IntimacyRecord rec;
        std::uniform_int_distribution<int> steps(1, 40);
        int n = steps(rng);
        for (int i = 0; i < n; ++i) {
            record_packet_from_peer(rec, k, 4.0);
            CHECK(rec.intimacy ==
                  doctest::Approx(k * static_cast<double>(rec.packets_received)));
            if (rec.state == PeerState::Friend)
                CHECK(rec.intimacy > 4.0);
        }
    }
}

TEST_CASE("intimacy: strict threshold and single promotion")
{
    IntimacyRecord rec;
    for (int i = 0; i < 4; ++i)
        CHECK_FALSE(record_packet_from_peer(rec, 1.0, 4.0));
    CHECK(rec.state == PeerState::Stranger);  // intimacy 4, not > 4
    CHECK(record_packet_from_peer(rec, 1.0, 4.0));
    CHECK(rec.state == PeerState::Friend);
    CHECK_FALSE(record_packet_from_peer(rec, 1.0, 4.0));  // no second promotion
    CHECK(rec.state == PeerState::Friend);

    IntimacyRecord half;
    int promoted_at = 0;
    for (int i = 1; i <= 12; ++i)
        if (record_packet_from_peer(half, 0.5, 4.0))
            promoted_at = i;
    CHECK(promoted_at == 9);  // 0.5 * 9 = 4.5 > 4
}
