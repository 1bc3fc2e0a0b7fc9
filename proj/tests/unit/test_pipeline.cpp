// test_pipeline.cpp — baseline comparison, fallback, sweeps, determinism
#include <doctest.h>

#include <random>

#include "oumap/pipeline.hpp"
#include "oumap/plan_file.hpp"

using namespace oumap;
using namespace oumap::pipeline;

namespace {

/// Random dense weights whose odd columns copy the even ones.
Int8Matrix twin_columns(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    auto w = random_weights(rows, cols, 0.0, seed);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 1; c < cols; c += 2) w(r, c) = w(r, c - 1);
    }
    return w;
}

}  // namespace

TEST_CASE("the reordered pipeline is never worse than the naive one") {
    for (double sparsity : {0.0, 0.3, 0.6, 0.9}) {
        const auto cmp = compare_baseline(random_weights(100, 90, sparsity, 400 + static_cast<int>(sparsity * 10)));
        CHECK(cmp.improvement >= 0.0);
        CHECK(cmp.reordered.ccq <= cmp.naive.ccq);
        CHECK(cmp.reordered.ec_nj <= cmp.naive.ec_nj * (1 + 1e-12));
        CHECK(cmp.stats.planes == 8 * 1);
    }
}

TEST_CASE("sparse weights gain from reordering") {
    const auto cmp = compare_baseline(random_weights(126, 128, 0.6, 7));
    CHECK(cmp.improvement > 0.0);
    CHECK(cmp.reordered.ccq < cmp.naive.ccq);
}

TEST_CASE("all-zero weights compile to nothing") {
    const auto cmp = compare_baseline(Int8Matrix(50, 40, 0));
    CHECK(cmp.reordered.ccq == 0);
    CHECK(cmp.naive.ccq == 0);
    CHECK(cmp.improvement == 0.0);
    CHECK_FALSE(cmp.reordered.performance.has_value());
}

TEST_CASE("duplicated columns halve the OU count") {
    const auto w = twin_columns(126, 128, 91);
    const auto program = compile(w).program;
    CHECK(plan::reconstruct_weights(program) == w);
    const auto report = cost::estimate_cost(program, Direction::horizontal, cost::PowerTable{});
    CHECK(report.compression_ratio == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("fallback keeps each plane at or below the naive plan") {
    const auto w = random_weights(126, 128, 0.0, 5);
    const auto reordered = compile(w);
    CompileOptions naive_opts;
    naive_opts.mode = Mode::naive;
    const auto naive = compile(w, naive_opts);
    CHECK(reordered.program.ou_count() <= naive.program.ou_count());
    CHECK(reordered.stats.naive_ous == naive.program.ou_count());

    CompileOptions sim_opts;
    sim_opts.mode = Mode::similarity_only;
    const auto similarity = compile(w, sim_opts);
    CHECK(similarity.stats.fallback_planes == 0);
    CHECK(similarity.program.ou_count() == reordered.stats.similarity_ous);
    CHECK(plan::reconstruct_weights(similarity.program) == w);
}

TEST_CASE("OU height sweep") {
    const auto w = random_weights(56, 64, 0.6, 17);
    const auto points = sweep_ou_height(w, {2, 4, 7, 14});
    REQUIRE(points.size() == 4);
    for (const auto& p : points) {
        CHECK(p.compression_ratio == doctest::Approx(static_cast<double>(p.ccq) / static_cast<double>(p.dense_ccq)));
        CHECK(p.compression_ratio <= 1.0);
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK(points[i].ou_rows > points[i - 1].ou_rows);
        CHECK(points[i].compression_ratio >= points[i - 1].compression_ratio);
    }
}

TEST_CASE("sparsity sweep reaches its targets") {
    const auto w = random_weights(64, 64, 0.0, 23);
    const auto points = sweep_sparsity(w, {0.0, 0.5, 0.9});
    REQUIRE(points.size() == 3);
    for (const auto& p : points) {
        CHECK(p.sparsity == doctest::Approx(p.target).epsilon(0.02));
        CHECK(p.improvement >= 0.0);
    }
}

TEST_CASE("compilation is deterministic and thread-count independent") {
    const auto w = random_weights(140, 40, 0.5, 33);
    CompileOptions one;
    CompileOptions many;
    many.jobs = 3;
    const auto a = plan::encode_program(compile(w, one).program);
    const auto b = plan::encode_program(compile(w, one).program);
    const auto c = plan::encode_program(compile(w, many).program);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("synthetic generators") {
    const auto w = random_weights(200, 200, 0.7, 1);
    std::size_t zeros = 0;
    for (auto v : w.data()) zeros += v == 0;
    CHECK(static_cast<double>(zeros) / 40000.0 == doctest::Approx(0.7).epsilon(0.03));
    CHECK(random_weights(10, 10, 0.5, 2) == random_weights(10, 10, 0.5, 2));
    CHECK(random_activations(3, 4, 8) == random_activations(3, 4, 8));
    CHECK_THROWS_AS(random_weights(2, 2, 1.5, 1), std::invalid_argument);
}
