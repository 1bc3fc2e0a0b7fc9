// bit_stats.cpp — closed forms and seeded Monte-Carlo validators
#include "oumap/bit_stats.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "oumap/parallel.hpp"

namespace oumap::stats {

namespace mp = boost::multiprecision;

namespace {

constexpr std::size_t kExactLimit = 60;

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
}

/// Exact rational value of a finite double.
mp::cpp_rational to_rational(double x) {
    if (x == 0.0) return 0;
    int exp = 0;
    const double mant = std::frexp(x, &exp);  // x = mant · 2^exp, mant in [0.5, 1)
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
    mp::cpp_rational r(scaled);
    const int shift = exp - 53;
    if (shift >= 0) {
        r *= mp::cpp_int(1) << shift;
    } else {
        r /= mp::cpp_int(1) << (-shift);
    }
    return r;
}

double to_double(const mp::cpp_rational& r) {
    using big = mp::cpp_bin_float_50;
    return static_cast<double>(big(mp::numerator(r)) / big(mp::denominator(r)));
}

/// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

struct ChunkTally {
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;
};

/// Runs `trial(gen)` over fixed seeded chunks and reduces in chunk order.
template <typename Trial>
ChunkTally run_chunks(std::size_t trials, std::uint64_t seed, unsigned jobs, Trial trial) {
    const std::size_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<ChunkTally> tallies(chunks);
    parallel_for(chunks, jobs, [&](std::size_t c) {
        std::mt19937_64 gen(splitmix64(seed + c));
        const std::size_t begin = c * kMonteCarloChunk;
        const std::size_t end = std::min(trials, begin + kMonteCarloChunk);
        ChunkTally t;
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint64_t v = trial(gen);
            t.sum += v;
            t.sum_sq += v * v;
        }
        tallies[c] = t;
    });
    ChunkTally total;
    for (const auto& t : tallies) {
        total.sum += t.sum;
        total.sum_sq += t.sum_sq;
    }
    return total;
}

/// Draws n columns of m bits; returns (all-equal-row count, all-zero-row count).
template <typename DrawWord>
std::pair<std::size_t, std::size_t> draw_and_count(std::size_t m, std::size_t n, DrawWord draw) {
    const std::size_t words = (m + 63) / 64;
    std::size_t identical = 0;
    std::size_t zero = 0;
    for (std::size_t w = 0; w < words; ++w) {
        const std::size_t width = std::min<std::size_t>(64, m - w * 64);
        const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
        std::uint64_t all_ones = mask;
        std::uint64_t all_zeros = mask;
        for (std::size_t c = 0; c < n; ++c) {
            const std::uint64_t col = draw(width) & mask;
            all_ones &= col;
            all_zeros &= ~col;
        }
        identical += static_cast<std::size_t>(std::popcount(all_ones | all_zeros));
        zero += static_cast<std::size_t>(std::popcount(all_zeros));
    }
    return {identical, zero};
}

MonteCarloEstimate proportion(const ChunkTally& t, std::size_t trials) {
    MonteCarloEstimate e;
    e.trials = trials;
    e.estimate = static_cast<double>(t.sum) / static_cast<double>(trials);
    e.stderr_ = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
    return e;
}

MonteCarloEstimate mean(const ChunkTally& t, std::size_t trials) {
    MonteCarloEstimate e;
    e.trials = trials;
    const double n = static_cast<double>(trials);
    e.estimate = static_cast<double>(t.sum) / n;
    const double var = trials > 1 ? (static_cast<double>(t.sum_sq) - n * e.estimate * e.estimate) / (n - 1.0) : 0.0;
    e.stderr_ = std::sqrt(std::max(0.0, var) / n);
    return e;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void SimilarityModelParams::validate() const {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (k > m) throw std::invalid_argument("k must be <= m");
    check_probability(p, "p");
}

double zero_bit_ratio(double p) {
    check_probability(p, "sparsity");
    return 0.5 * p + 0.5;
}

double measured_zero_bit_ratio(const BitPlaneSet& planes) {
    const std::size_t cells = planes.rows() * planes.cols();
    if (cells == 0) throw std::invalid_argument("empty bit planes");
    std::size_t ones = 0;
    for (const auto& p : planes.planes) ones += p.count_ones();
    const double total = static_cast<double>(cells) * kWeightBits;
    return (total - static_cast<double>(ones)) / total;
}

double identical_row_prob(std::size_t n) {
    if (n < 2) throw std::invalid_argument("group size must be >= 2");
    return std::ldexp(1.0, -static_cast<int>(n - 1));
}

double binomial_tail_exact(std::size_t m, std::size_t k, double q) {
    check_probability(q, "success probability");
    if (k == 0) return 1.0;
    if (k > m) return 0.0;
    const mp::cpp_rational qr = to_rational(q);
    const mp::cpp_rational fr = mp::cpp_rational(1) - qr;
    mp::cpp_rational sum = 0;
    mp::cpp_int choose = 1;  // C(m, i), updated incrementally
    for (std::size_t i = 0; i <= m; ++i) {
        if (i > 0) choose = choose * (m - i + 1) / i;
        if (i < k) continue;
        mp::cpp_rational term(choose);
        term *= mp::pow(mp::numerator(qr), static_cast<unsigned>(i));
        term /= mp::pow(mp::denominator(qr), static_cast<unsigned>(i));
        term *= mp::pow(mp::numerator(fr), static_cast<unsigned>(m - i));
        term /= mp::pow(mp::denominator(fr), static_cast<unsigned>(m - i));
        sum += term;
    }
    return to_double(sum);
}

double binomial_tail_log_domain(std::size_t m, std::size_t k, double q) {
    check_probability(q, "success probability");
    if (k == 0) return 1.0;
    if (k > m) return 0.0;
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;
    const double md = static_cast<double>(m);
    const double lq = std::log(q);
    const double lf = std::log1p(-q);
    const double lm = std::lgamma(md + 1.0);
    std::vector<double> terms;
    terms.reserve(m - k + 1);
    double peak = -INFINITY;
    for (std::size_t i = k; i <= m; ++i) {
        const double id = static_cast<double>(i);
        const double t = lm - std::lgamma(id + 1.0) - std::lgamma(md - id + 1.0) + id * lq + (md - id) * lf;
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    return std::min(1.0, std::exp(peak) * acc);
}

double binomial_tail(std::size_t m, std::size_t k, double q) {
    return m <= kExactLimit ? binomial_tail_exact(m, k, q) : binomial_tail_log_domain(m, k, q);
}

double prob_at_least_k_identical(const SimilarityModelParams& params) {
    params.validate();
    return binomial_tail(params.m, params.k, identical_row_prob(params.n));
}

double prob_at_least_k_identical_biased(std::size_t m, std::size_t n, std::size_t k, double p) {
    SimilarityModelParams{m, n, k, p}.validate();
    const double nd = static_cast<double>(n);
    return binomial_tail(m, k, std::min(1.0, std::pow(p, nd) + std::pow(1.0 - p, nd)));
}

double prob_all_zero_rows(std::size_t m, std::size_t n, std::size_t k, double p) {
    SimilarityModelParams{m, n, k, p}.validate();
    return binomial_tail(m, k, std::pow(p, static_cast<double>(n)));
}

double expected_all_zero_rows(std::size_t m, std::size_t n, double p) {
    check_probability(p, "p");
    return static_cast<double>(m) * std::pow(p, static_cast<double>(n));
}

double expected_identical_rows(std::size_t m, std::size_t n, double p) {
    check_probability(p, "p");
    const double nd = static_cast<double>(n);
    return static_cast<double>(m) * (std::pow(p, nd) + std::pow(1.0 - p, nd));
}

MonteCarloEstimate monte_carlo_identical_rows(const SimilarityModelParams& params, std::size_t trials,
                                              std::uint64_t seed, unsigned jobs) {
    params.validate();
    if (trials < 1000) throw std::invalid_argument("at least 1000 trials required");
    const auto tally = run_chunks(trials, seed, jobs, [&](std::mt19937_64& gen) -> std::uint64_t {
        const auto [identical, zero] = draw_and_count(params.m, params.n, [&](std::size_t) { return gen(); });
        (void)zero;
        return identical >= params.k ? 1 : 0;
    });
    return proportion(tally, trials);
}

namespace {

template <typename Pick>
MonteCarloEstimate bernoulli_row_count(std::size_t m, std::size_t n, double p, std::size_t trials,
                                       std::uint64_t seed, unsigned jobs, Pick pick) {
    check_probability(p, "p");
    if (m < 1 || n < 1) throw std::invalid_argument("m and n must be >= 1");
    if (trials < 2) throw std::invalid_argument("at least 2 trials required");
    const auto tally = run_chunks(trials, seed, jobs, [&](std::mt19937_64& gen) -> std::uint64_t {
        auto draw = [&](std::size_t width) {
            std::uint64_t w = 0;
            for (std::size_t b = 0; b < width; ++b) {
                if (unit(gen) >= p) w |= std::uint64_t{1} << b;  // bit is zero w.p. p
            }
            return w;
        };
        const auto counts = draw_and_count(m, n, draw);
        return pick(counts);
    });
    return mean(tally, trials);
}

}  // namespace

MonteCarloEstimate monte_carlo_identical_rows_biased(std::size_t m, std::size_t n, std::size_t k, double p,
                                                     std::size_t trials, std::uint64_t seed, unsigned jobs) {
    SimilarityModelParams{m, n, k, p}.validate();
    auto e = bernoulli_row_count(m, n, p, trials, seed, jobs,
                                 [k](auto c) -> std::uint64_t { return c.first >= k ? 1 : 0; });
    e.stderr_ = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
    return e;
}

MonteCarloEstimate monte_carlo_all_zero_rows(std::size_t m, std::size_t n, double p, std::size_t trials,
                                             std::uint64_t seed, unsigned jobs) {
    return bernoulli_row_count(m, n, p, trials, seed, jobs, [](auto c) { return c.second; });
}

MonteCarloEstimate monte_carlo_identical_row_count(std::size_t m, std::size_t n, double p, std::size_t trials,
                                                   std::uint64_t seed, unsigned jobs) {
    return bernoulli_row_count(m, n, p, trials, seed, jobs, [](auto c) { return c.first; });
}

}  // namespace oumap::stats
