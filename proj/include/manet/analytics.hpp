#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace manet::analytics {

using BigInt = boost::multiprecision::cpp_int;

struct AnalyticsInput
{
    long total_nodes = 0;    // T_n
    long cache_size = 0;     // K_n
    long unknown_nodes = 0;  // U_n
    long exposed_nodes = 0;  // E_n
    double route_lifetime_s = 0.0;    // T_out
    double mean_contact_time_s = 1.0; // T_avg
};

// Throws std::invalid_argument when 0 <= E_n <= U_n <= T_n, T_avg > 0,
// T_out >= 0 or K_n >= 0 is violated.
void validate(const AnalyticsInput& inp);

struct ModelResult
{
    double value = 0.0;
    bool valid = false;  // value in [0,1] and all ratios well-defined
    std::string note;
};

// Exact binomial coefficient; 0 when k < 0 or k > n; n < 0 is a domain error.
BigInt comb(long n, long k);

// T_c = floor(T_out / T_avg): completed contacts before the routes expire.
long calls_before_expiry(double t_out, double t_avg);

// Sender cache size over receiver cache size; proportional to protocol
// efficiency with an unknown constant.
double route_gain_ratio(long sender_cache, long receiver_cache);

// The model as printed: C(U_n, T_c) / C(T_n, U_n). Flagged invalid whenever
// the ratio is undefined or leaves [0,1].
ModelResult p_unknown(const AnalyticsInput& inp);

// As printed: C(E_n, T_c) / C(U_n, E_n).
ModelResult p_exposed(const AnalyticsInput& inp);

// P = P_u * P_e, clamped into [0,1]; clamping clears the valid flag.
ModelResult p_contact_exposed(const ModelResult& pu, const ModelResult& pe);

// e^-lam lam^x / x!; log-space above x = 20.
double poisson_pmf(long x, double lam);

// P(X = 0) = e^{-nP}; strictly positive for finite inputs.
double p_none(long n, double p);

// T_e = P * E_n.
double expected_exposed_contacts(double p, long exposed_nodes);

struct OracleResult
{
    double p_any_exposed = 0.0;
    double p_any_stderr = 0.0;
    double mean_exposed = 0.0;
    double mean_stderr = 0.0;
    double exact_p_any = 0.0;
    double exact_mean = 0.0;
    long trials = 0;
};

// Independent contact-model oracle: the sender makes T_c distinct uniform
// contacts among the other T_n - 1 nodes, E_n of which are exposed.
// Closed forms: p_any = 1 - C(T_n-1-E_n, T_c)/C(T_n-1, T_c);
// mean = T_c * E_n / (T_n - 1). Monte-Carlo sampling cross-checks both.
OracleResult oracle_contact_model(const AnalyticsInput& inp, long trials,
                                  std::uint64_t seed);

}  // namespace manet::analytics
