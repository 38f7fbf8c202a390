#include "manet/analytics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace manet::analytics {

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_50;

double big_ratio(const BigInt& num, const BigInt& den)
{
    BigFloat q = BigFloat(num) / BigFloat(den);
    return q.convert_to<double>();
}

}  // namespace

void validate(const AnalyticsInput& inp)
{
    if (inp.exposed_nodes < 0 || inp.exposed_nodes > inp.unknown_nodes ||
        inp.unknown_nodes > inp.total_nodes)
        throw std::invalid_argument(
            "analytics input requires 0 <= E_n <= U_n <= T_n");
    if (inp.mean_contact_time_s <= 0.0)
        throw std::invalid_argument("T_avg must be positive");
    if (inp.route_lifetime_s < 0.0)
        throw std::invalid_argument("T_out must be nonnegative");
    if (inp.cache_size < 0)
        throw std::invalid_argument("K_n must be nonnegative");
}

BigInt comb(long n, long k)
{
    if (n < 0)
        throw std::domain_error("comb: n must be nonnegative");
    if (k < 0 || k > n)
        return 0;
    if (k > n - k)
        k = n - k;
    BigInt result = 1;
    for (long i = 1; i <= k; ++i) {
        result *= (n - k + i);
        result /= i;
    }
    return result;
}

long calls_before_expiry(double t_out, double t_avg)
{
    if (t_avg <= 0.0)
        throw std::domain_error("calls_before_expiry: T_avg must be positive");
    if (t_out < 0.0)
        throw std::domain_error("calls_before_expiry: T_out must be nonnegative");
    return static_cast<long>(std::floor(t_out / t_avg));
}

double route_gain_ratio(long sender_cache, long receiver_cache)
{
    if (receiver_cache < 1)
        throw std::domain_error("route_gain_ratio: receiver cache must be >= 1");
    return static_cast<double>(sender_cache) /
           static_cast<double>(receiver_cache);
}

namespace {

ModelResult printed_ratio(const BigInt& num, const BigInt& den,
                          const char* what)
{
    ModelResult r;
    if (den == 0) {
        r.value = std::numeric_limits<double>::infinity();
        r.valid = false;
        r.note = std::string(what) + ": denominator combination is zero";
        return r;
    }
    r.value = big_ratio(num, den);
    if (r.value >= 0.0 && r.value <= 1.0) {
        r.valid = true;
    } else {
        r.valid = false;
        r.note = std::string(what) + ": printed formula leaves [0,1]";
    }
    return r;
}

}  // namespace

ModelResult p_unknown(const AnalyticsInput& inp)
{
    validate(inp);
    long t_c = calls_before_expiry(inp.route_lifetime_s,
                                   inp.mean_contact_time_s);
    return printed_ratio(comb(inp.unknown_nodes, t_c),
                         comb(inp.total_nodes, inp.unknown_nodes), "P_u");
}

ModelResult p_exposed(const AnalyticsInput& inp)
{
    validate(inp);
    long t_c = calls_before_expiry(inp.route_lifetime_s,
                                   inp.mean_contact_time_s);
    return printed_ratio(comb(inp.exposed_nodes, t_c),
                         comb(inp.unknown_nodes, inp.exposed_nodes), "P_e");
}

ModelResult p_contact_exposed(const ModelResult& pu, const ModelResult& pe)
{
    ModelResult r;
    r.value = pu.value * pe.value;
    r.valid = pu.valid && pe.valid;
    if (std::isnan(r.value))
        r.value = 0.0;
    if (r.value > 1.0) {
        r.value = 1.0;
        r.valid = false;
        r.note = "P: product clamped to 1";
    } else if (r.value < 0.0) {
        r.value = 0.0;
        r.valid = false;
        r.note = "P: product clamped to 0";
    }
    return r;
}

double poisson_pmf(long x, double lam)
{
    if (x < 0 || lam < 0.0 || std::isnan(lam))
        throw std::domain_error("poisson_pmf: x and lambda must be nonnegative");
    if (lam == 0.0)
        return x == 0 ? 1.0 : 0.0;
    if (x <= 20) {
        double fact = 1.0;
        for (long i = 2; i <= x; ++i)
            fact *= static_cast<double>(i);
        return std::exp(-lam) * std::pow(lam, static_cast<double>(x)) / fact;
    }
    double lx = static_cast<double>(x);
    return std::exp(lx * std::log(lam) - lam - std::lgamma(lx + 1.0));
}

double p_none(long n, double p)
{
    if (n < 0)
        throw std::domain_error("p_none: n must be nonnegative");
    if (p < 0.0 || p > 1.0)
        throw std::domain_error("p_none: P must lie in [0,1]");
    return std::exp(-static_cast<double>(n) * p);
}

double expected_exposed_contacts(double p, long exposed_nodes)
{
    if (p < 0.0 || p > 1.0)
        throw std::domain_error("expected_exposed_contacts: P must lie in [0,1]");
    if (exposed_nodes < 0)
        throw std::domain_error("expected_exposed_contacts: E_n must be >= 0");
    return p * static_cast<double>(exposed_nodes);
}

OracleResult oracle_contact_model(const AnalyticsInput& inp, long trials,
                                  std::uint64_t seed)
{
    validate(inp);
    long t_c = calls_before_expiry(inp.route_lifetime_s,
                                   inp.mean_contact_time_s);
    long pool = inp.total_nodes - 1;
    if (t_c > pool)
        throw std::domain_error("oracle: T_c exceeds the contactable pool");
    if (trials < 1)
        throw std::domain_error("oracle: trials must be >= 1");

    OracleResult out;
    out.trials = trials;
    out.exact_p_any =
        1.0 - big_ratio(comb(pool - inp.exposed_nodes, t_c), comb(pool, t_c));
    out.exact_mean = pool > 0 ? static_cast<double>(t_c) *
                                    static_cast<double>(inp.exposed_nodes) /
                                    static_cast<double>(pool)
                              : 0.0;

    // Sampling without replacement: partial Fisher-Yates over the pool, the
    // first E_n indices standing for the exposed nodes.
    std::mt19937_64 rng(seed);
    std::vector<long> idx(static_cast<std::size_t>(pool));
    long any_count = 0;
    double hit_sum = 0.0;
    double hit_sq_sum = 0.0;
    for (long t = 0; t < trials; ++t) {
        for (long i = 0; i < pool; ++i)
            idx[static_cast<std::size_t>(i)] = i;
        long hits = 0;
        for (long i = 0; i < t_c; ++i) {
            std::uniform_int_distribution<long> pick(i, pool - 1);
            long j = pick(rng);
            std::swap(idx[static_cast<std::size_t>(i)],
                      idx[static_cast<std::size_t>(j)]);
            if (idx[static_cast<std::size_t>(i)] < inp.exposed_nodes)
                ++hits;
        }
        if (hits > 0)
            ++any_count;
        hit_sum += static_cast<double>(hits);
        hit_sq_sum += static_cast<double>(hits) * static_cast<double>(hits);
    }
    double nt = static_cast<double>(trials);
    out.p_any_exposed = static_cast<double>(any_count) / nt;
    out.p_any_stderr =
        std::sqrt(out.p_any_exposed * (1.0 - out.p_any_exposed) / nt);
    out.mean_exposed = hit_sum / nt;
    double var = hit_sq_sum / nt - out.mean_exposed * out.mean_exposed;
    out.mean_stderr = std::sqrt(std::max(0.0, var) / nt);
    return out;
}

}  // namespace manet::analytics
