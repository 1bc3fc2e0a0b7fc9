// pipeline.hpp — weights to CrossbarProgram, baseline comparison, OU sweeps
//
// For every tile and bit plane the compiler builds two candidate plans:
//   similarity  reorder_similarity + compress_rows
//   naive       consecutive row bands in original order, zero columns and
//               all-zero OU rows still skipped, no pairing, no regrouping
// In `reordered` mode the similarity plan is kept unless it needs more OUs
// or more estimated energy than the naive plan on the same crossbar, in
// which case that crossbar falls back to the naive plan. The choice is
// recorded per plane in the program.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oumap/cost_model.hpp"
#include "oumap/ou_plan.hpp"

namespace oumap::pipeline {

enum class Mode { reordered, similarity_only, naive };

struct CompileOptions {
    Geometry geometry;
    Direction direction = Direction::horizontal;
    Mode mode = Mode::reordered;
    cost::PowerTable power;   ///< prices the fallback decision
    unsigned jobs = 1;
    bool trace = false;       ///< collect the reorder step log
};

struct CompileStats {
    std::size_t planes = 0;
    std::size_t fallback_planes = 0;
    std::uint64_t similarity_ous = 0;  ///< OUs had every plane used the similarity plan
    std::uint64_t naive_ous = 0;       ///< OUs had every plane used the naive plan
    std::uint64_t rows_removed = 0;    ///< all-zero OU rows removed in the chosen plans
    std::vector<std::string> trace;
};

struct CompileResult {
    plan::CrossbarProgram program;
    CompileStats stats;
};

CompileResult compile(const Int8Matrix& weights, const CompileOptions& options = {});

struct BaselineComparison {
    cost::CostReport naive;
    cost::CostReport reordered;
    double improvement = 0;  ///< (CCQ·EC)_naive / (CCQ·EC)_reordered − 1
    CompileStats stats;
};

/// Compiles both pipelines on the same weights and prices them statically.
BaselineComparison compare_baseline(const Int8Matrix& weights, const CompileOptions& options = {});

struct SweepPoint {
    std::size_t ou_rows = 0;
    std::uint64_t ccq = 0;
    std::uint64_t dense_ccq = 0;
    double compression_ratio = 0;
    std::size_t fallback_planes = 0;
};

/// Compression ratio of the full pipeline per OU height (ascending heights).
std::vector<SweepPoint> sweep_ou_height(const Int8Matrix& weights, const std::vector<std::size_t>& heights,
                                        const CompileOptions& options = {});

struct SparsityPoint {
    double target = 0;
    double sparsity = 0;  ///< achieved
    double improvement = 0;
    double naive_ccq = 0;
    double reordered_ccq = 0;
};

/// Prunes `weights` by magnitude to each target sparsity and compares pipelines.
std::vector<SparsityPoint> sweep_sparsity(const Int8Matrix& weights, const std::vector<double>& targets,
                                          const CompileOptions& options = {});

/// Seeded random i8 matrix: each entry is zero with probability `sparsity`,
/// otherwise uniform over the nonzero values −128..127.
Int8Matrix random_weights(std::size_t rows, std::size_t cols, double sparsity, std::uint64_t seed);

/// Seeded uniform i8 activations.
Int8Matrix random_activations(std::size_t batch, std::size_t rows, std::uint64_t seed);

}  // namespace oumap::pipeline
