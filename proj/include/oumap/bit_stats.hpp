// bit_stats.hpp — zero-bit and identical-row statistics, closed form and Monte-Carlo
//
// Monte-Carlo runs use std::mt19937_64. Trials are cut into fixed chunks
// of kMonteCarloChunk; chunk i is seeded with splitmix64(seed + i), so an
// estimate depends only on (params, trials, seed) and never on the worker
// count.
#pragma once

#include <cstddef>
#include <cstdint>

#include "oumap/tensor_io.hpp"

namespace oumap::stats {

inline constexpr std::size_t kMonteCarloChunk = 4096;

struct SimilarityModelParams {
    std::size_t m = 1;   ///< vector length (rows)
    std::size_t n = 2;   ///< columns compared as a group
    std::size_t k = 0;   ///< identical-row threshold
    double p = 0.5;      ///< sparsity / bit-zero probability where a model uses it

    void validate() const;
};

/// 0.5·p + 0.5: expected fraction of zero bits at value sparsity p.
double zero_bit_ratio(double p);

/// Fraction of 0 bits over all planes × cells.
double measured_zero_bit_ratio(const BitPlaneSet& planes);

/// Probability that n random bits at one row are all equal: 1 / 2^(n-1).
double identical_row_prob(std::size_t n);

/// P(X >= k) for X ~ Binomial(m, q). Exact rational arithmetic for m <= 60,
/// log-domain summation above.
double binomial_tail(std::size_t m, std::size_t k, double q);
double binomial_tail_exact(std::size_t m, std::size_t k, double q);
double binomial_tail_log_domain(std::size_t m, std::size_t k, double q);

/// P(at least k identical rows among n uniform random columns of length m).
double prob_at_least_k_identical(const SimilarityModelParams& params);

/// Same event when each bit is zero with probability p (p = 0.5 gives the
/// uniform model): row success probability p^n + (1-p)^n.
double prob_at_least_k_identical_biased(std::size_t m, std::size_t n, std::size_t k, double p);

/// P(at least k all-zero rows) when each bit is zero with probability p.
double prob_all_zero_rows(std::size_t m, std::size_t n, std::size_t k, double p);

/// E[#all-zero rows] = m·p^n.
double expected_all_zero_rows(std::size_t m, std::size_t n, double p);
/// E[#identical rows] counting all-zero and all-one rows = m·(p^n + (1-p)^n).
double expected_identical_rows(std::size_t m, std::size_t n, double p);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;  ///< standard error of the estimate
    std::size_t trials = 0;
};

/// Fraction of uniform m×n bit matrices with at least k identical rows.
MonteCarloEstimate monte_carlo_identical_rows(const SimilarityModelParams& params, std::size_t trials,
                                              std::uint64_t seed, unsigned jobs = 1);

/// Fraction of Bernoulli m×n matrices (bit zero w.p. p) with at least k identical rows.
MonteCarloEstimate monte_carlo_identical_rows_biased(std::size_t m, std::size_t n, std::size_t k, double p,
                                                     std::size_t trials, std::uint64_t seed, unsigned jobs = 1);

/// Mean all-zero-row count of m×n Bernoulli matrices (bit zero w.p. p).
MonteCarloEstimate monte_carlo_all_zero_rows(std::size_t m, std::size_t n, double p, std::size_t trials,
                                             std::uint64_t seed, unsigned jobs = 1);

/// Mean identical-row count (all-zero or all-one) of the same matrices.
MonteCarloEstimate monte_carlo_identical_row_count(std::size_t m, std::size_t n, double p, std::size_t trials,
                                                   std::uint64_t seed, unsigned jobs = 1);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace oumap::stats
