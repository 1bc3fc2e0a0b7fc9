// pipeline.cpp — per-plane plan selection and whole-matrix drivers
#include "oumap/pipeline.hpp"

#include <random>

#include "oumap/arith.hpp"
#include "oumap/bit_stats.hpp"
#include "oumap/parallel.hpp"
#include "oumap/reorder.hpp"

namespace oumap::pipeline {

namespace {

struct PlaneChoice {
    reorder::CompressedPlane plane;
    plan::Strategy strategy = plan::Strategy::similarity;
    std::size_t similarity_ous = 0;
    std::size_t naive_ous = 0;
    std::vector<std::string> trace;
};

double plane_energy(const reorder::CompressedPlane& plane, int b, std::size_t tile_rows, const CompileOptions& o) {
    const auto events = sim::estimate_crossbar_events(plan::place_ous(plane), b, tile_rows, o.direction);
    return cost::energy_of(events, arith::kInputBits * plane.ous.size(), o.power).total();
}

PlaneChoice choose_plane(const Int8Matrix& weights, const plan::TileRect& rect, int b, const CompileOptions& o) {
    const auto& g = o.geometry;
    const auto bits = plan::tile_plane(weights, rect, b);
    PlaneChoice out;

    std::optional<reorder::CompressedPlane> similar;
    if (o.mode != Mode::naive) {
        reorder::ReorderOptions ro;
        ro.trace = o.trace;
        auto bands = reorder::reorder_similarity(bits, g.ou_rows, g.ou_cols, ro);
        for (auto& line : bands.trace) {
            out.trace.push_back("tile " + std::to_string(rect.row_offset) + "," + std::to_string(rect.col_offset) +
                                " plane " + std::to_string(b) + ": " + line);
        }
        similar = reorder::compress_rows(bits, bands, g.ou_rows, g.ou_cols);
        out.similarity_ous = similar->ous.size();
    }
    std::optional<reorder::CompressedPlane> naive;
    if (o.mode != Mode::similarity_only) {
        reorder::CompressOptions co;
        co.reorder_columns = false;
        naive = reorder::compress_rows(bits, reorder::naive_bands(bits, g.ou_rows), g.ou_rows, g.ou_cols, co);
        out.naive_ous = naive->ous.size();
    }

    if (!naive) {
        out.plane = std::move(*similar);
        out.strategy = plan::Strategy::similarity;
    } else if (!similar) {
        out.plane = std::move(*naive);
        out.strategy = plan::Strategy::naive;
    } else {
        const bool fewer_or_equal = similar->ous.size() <= naive->ous.size();
        const bool cheaper_or_equal =
            plane_energy(*similar, b, rect.rows, o) <= plane_energy(*naive, b, rect.rows, o);
        if (fewer_or_equal && cheaper_or_equal) {
            out.plane = std::move(*similar);
            out.strategy = plan::Strategy::similarity;
        } else {
            out.plane = std::move(*naive);
            out.strategy = plan::Strategy::naive;
        }
    }
    if (!similar) out.similarity_ous = out.plane.ous.size();
    if (!naive) out.naive_ous = out.plane.ous.size();
    return out;
}

}  // namespace

CompileResult compile(const Int8Matrix& weights, const CompileOptions& options) {
    options.geometry.validate();
    options.power.validate();
    if (weights.empty()) throw std::invalid_argument("empty weight matrix");
    const auto layout = plan::tile_layout(weights.rows(), weights.cols(), options.geometry);

    std::vector<PlaneChoice> choices(layout.size() * kWeightBits);
    parallel_for(choices.size(), options.jobs, [&](std::size_t i) {
        choices[i] = choose_plane(weights, layout[i / kWeightBits], static_cast<int>(i % kWeightBits), options);
    });

    CompileResult result;
    auto& stats = result.stats;
    std::vector<plan::TilePlan> plans(layout.size());
    for (std::size_t i = 0; i < choices.size(); ++i) {
        auto& c = choices[i];
        auto& tp = plans[i / kWeightBits];
        tp.rect = layout[i / kWeightBits];
        ++stats.planes;
        stats.fallback_planes += (options.mode == Mode::reordered && c.strategy == plan::Strategy::naive) ? 1 : 0;
        stats.similarity_ous += c.similarity_ous;
        stats.naive_ous += c.naive_ous;
        stats.rows_removed += c.plane.rows_removed;
        for (auto& line : c.trace) stats.trace.push_back(std::move(line));
        tp.planes[i % kWeightBits] = std::move(c.plane);
        tp.strategies[i % kWeightBits] = c.strategy;
    }
    result.program = plan::build_program(weights, plans, options.geometry, options.direction);
    return result;
}

BaselineComparison compare_baseline(const Int8Matrix& weights, const CompileOptions& options) {
    CompileOptions naive_opts = options;
    naive_opts.mode = Mode::naive;
    naive_opts.trace = false;
    CompileOptions reordered_opts = options;
    if (reordered_opts.mode == Mode::naive) reordered_opts.mode = Mode::reordered;

    const auto naive = compile(weights, naive_opts);
    const auto reordered = compile(weights, reordered_opts);
    BaselineComparison out;
    out.naive = cost::estimate_cost(naive.program, options.direction, options.power);
    out.reordered = cost::estimate_cost(reordered.program, options.direction, options.power);
    out.improvement = cost::improvement(out.naive, out.reordered);
    out.stats = reordered.stats;
    return out;
}

std::vector<SweepPoint> sweep_ou_height(const Int8Matrix& weights, const std::vector<std::size_t>& heights,
                                        const CompileOptions& options) {
    if (!std::is_sorted(heights.begin(), heights.end())) throw std::invalid_argument("heights must be ascending");
    std::vector<SweepPoint> out;
    for (auto h : heights) {
        CompileOptions o = options;
        o.geometry.ou_rows = h;
        o.trace = false;
        const auto compiled = compile(weights, o);
        SweepPoint p;
        p.ou_rows = h;
        p.ccq = arith::kInputBits * compiled.program.ou_count();
        p.dense_ccq = cost::dense_ccq(weights.rows(), weights.cols(), o.geometry);
        p.compression_ratio = static_cast<double>(p.ccq) / static_cast<double>(p.dense_ccq);
        p.fallback_planes = compiled.stats.fallback_planes;
        out.push_back(p);
    }
    return out;
}

std::vector<SparsityPoint> sweep_sparsity(const Int8Matrix& weights, const std::vector<double>& targets,
                                          const CompileOptions& options) {
    RealMatrix real(weights.rows(), weights.cols());
    for (std::size_t i = 0; i < weights.size(); ++i) real.data()[i] = static_cast<float>(weights.data()[i]);
    std::vector<SparsityPoint> out;
    for (double target : targets) {
        const auto pruned = prune_magnitude(real, target);
        Int8Matrix w(weights.rows(), weights.cols());
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = static_cast<std::int8_t>(pruned.data()[i]);
        const auto cmp = compare_baseline(w, options);
        SparsityPoint p;
        p.target = target;
        p.sparsity = sparsity_of(w);
        p.improvement = cmp.improvement;
        p.naive_ccq = static_cast<double>(cmp.naive.ccq);
        p.reordered_ccq = static_cast<double>(cmp.reordered.ccq);
        out.push_back(p);
    }
    return out;
}

Int8Matrix random_weights(std::size_t rows, std::size_t cols, double sparsity, std::uint64_t seed) {
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw std::invalid_argument("sparsity must be in [0, 1]");
    std::mt19937_64 gen(stats::splitmix64(seed));
    std::uniform_int_distribution<int> nonzero(0, 254);
    Int8Matrix w(rows, cols, 0);
    for (auto& v : w.data()) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        if (u < sparsity) continue;
        int x = nonzero(gen) - 128;
        if (x >= 0) ++x;
        v = static_cast<std::int8_t>(x);
    }
    return w;
}

Int8Matrix random_activations(std::size_t batch, std::size_t rows, std::uint64_t seed) {
    std::mt19937_64 gen(stats::splitmix64(seed ^ 0xA5A5A5A5ULL));
    std::uniform_int_distribution<int> value(-128, 127);
    Int8Matrix x(batch, rows, 0);
    for (auto& v : x.data()) v = static_cast<std::int8_t>(value(gen));
    return x;
}

}  // namespace oumap::pipeline
