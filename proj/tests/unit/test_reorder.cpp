// test_reorder.cpp — sHD, column pairing, similarity bands, row compression
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "oumap/reorder.hpp"
#include "test_support.hpp"

using namespace oumap;
using namespace oumap::reorder;

namespace {

std::vector<std::uint32_t> iota_cols(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    std::iota(v.begin(), v.end(), 0U);
    return v;
}

bool pair_identical(const BitMatrix& m, std::span<const std::uint32_t> rows, const ColumnPair& p) {
    for (auto r : rows) {
        if (m.get(r, p.first) != m.get(r, p.second)) return false;
    }
    return true;
}

/// Rows disjoint and covering, each column exactly once per band, pairs sound.
void check_structure(const BitMatrix& m, const ReorderResult& res, std::size_t h) {
    std::set<std::uint32_t> seen_rows;
    for (const auto& band : res.bands) {
        CHECK(band.rows.size() <= h);
        CHECK(std::is_sorted(band.rows.begin(), band.rows.end()));
        for (auto r : band.rows) CHECK(seen_rows.insert(r).second);
        std::vector<int> uses(m.cols(), 0);
        for (const auto& p : band.pairs) {
            CHECK(p.first < p.second);
            CHECK(pair_identical(m, band.rows, p));
            ++uses[p.first];
            ++uses[p.second];
        }
        for (auto c : band.uniques) ++uses[c];
        for (auto c : band.zero_columns) {
            ++uses[c];
            for (auto r : band.rows) CHECK_FALSE(m.get(r, c));
        }
        for (int u : uses) CHECK(u == 1);
    }
    CHECK(seen_rows.size() == m.rows());
}

}  // namespace

TEST_CASE("sHD counts differing rows") {
    const std::vector<std::uint8_t> a{0, 1, 1, 0};
    const std::vector<std::uint8_t> b{0, 0, 1, 1};
    const std::vector<std::uint8_t> na{1, 0, 0, 1};
    CHECK(shd(a, a) == 0);
    CHECK(shd(a, na) == 4);
    CHECK(shd(a, b) == 2);
    CHECK_THROWS_AS(shd(a, std::vector<std::uint8_t>{1}), std::invalid_argument);
}

TEST_CASE("column_pair greedy pairing") {
    SUBCASE("two identical columns") {
        const auto m = BitMatrix::from_rows({{1, 1}, {0, 0}, {1, 1}});
        const auto d = column_pair(m, iota_cols(2), RowSet::all(3));
        REQUIRE(d.entries.size() == 1);
        CHECK(d.entries[0].columns == ColumnPair{0, 1});
        CHECK(d.entries[0].numrows == 3);
        CHECK(d.entries[0].rowid() == std::vector<std::uint32_t>{0, 1, 2});
        CHECK_FALSE(d.unpaired.has_value());
    }
    SUBCASE("minimum sHD first") {
        const auto m = BitMatrix::from_rows(
            {{1, 0, 1, 0}, {0, 0, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 1, 0, 1}, {1, 1, 1, 0}});
        const auto all = RowSet::all(8);
        // Brute force over the three perfect matchings of four columns.
        const std::array<std::array<ColumnPair, 2>, 3> matchings{{{{{0, 1}, {2, 3}}}, {{{0, 2}, {1, 3}}}, {{{0, 3}, {1, 2}}}}};
        std::size_t best_agree = 0;
        ColumnPair best_first{};
        for (const auto& mt : matchings) {
            for (const auto& p : mt) {
                const std::size_t agree = 8 - m.distance_on(p.first, p.second, all);
                if (agree > best_agree) {
                    best_agree = agree;
                    best_first = p;
                }
            }
        }
        CHECK(best_first == ColumnPair{0, 2});
        const auto d = column_pair(m, iota_cols(4), all);
        REQUIRE(d.entries.size() == 2);
        CHECK(d.entries[0].columns == ColumnPair{0, 2});
        CHECK(d.entries[0].numrows == 6);
        CHECK(d.entries[1].columns == ColumnPair{1, 3});
        CHECK(d.entries[1].numrows == 4);
    }
    SUBCASE("odd column count leaves one column") {
        const auto m = BitMatrix::from_rows({{1, 0, 1}, {0, 1, 0}});
        const auto d = column_pair(m, iota_cols(3), RowSet::all(2));
        REQUIRE(d.entries.size() == 1);
        CHECK(d.entries[0].columns == ColumnPair{0, 2});
        CHECK(d.unpaired == std::optional<std::uint32_t>{1});
    }
    SUBCASE("fewer than two columns") {
        const auto m = BitMatrix::from_rows({{1, 0}});
        const std::vector<std::uint32_t> one{1};
        const auto d = column_pair(m, one, RowSet::all(1));
        CHECK(d.entries.empty());
        CHECK(d.unpaired == std::optional<std::uint32_t>{1});
    }
    SUBCASE("ties keep the smallest (i, j)") {
        const auto m = BitMatrix::from_rows({{1, 1, 1, 1}});
        const auto d = column_pair(m, iota_cols(4), RowSet::all(1));
        REQUIRE(d.entries.size() == 2);
        CHECK(d.entries[0].columns == ColumnPair{0, 1});
        CHECK(d.entries[1].columns == ColumnPair{2, 3});
    }
}

TEST_CASE("identical columns pair in every band") {
    const std::size_t h = 3;
    std::vector<std::vector<int>> rows;
    for (int r = 0; r < 6; ++r) rows.push_back(std::vector<int>(5, r % 2 == 0 ? 1 : 0));
    rows[1] = std::vector<int>(5, 1);
    const auto m = BitMatrix::from_rows(rows);
    const auto res = reorder_similarity(m, h, 8);
    REQUIRE(res.bands.size() == 2);
    for (const auto& b : res.bands) {
        CHECK(b.pairs.size() == 2);
        CHECK(b.uniques.size() == 1);
        CHECK(b.rows.size() == h);
    }
    CHECK(res.leftover_rows.empty());
    check_structure(m, res, h);
}

TEST_CASE("all-zero matrix stores nothing") {
    const BitMatrix m(10, 6);
    const auto res = reorder_similarity(m, 4, 8);
    check_structure(m, res, 4);
    CHECK(res.stored_columns() == 0);
    CHECK(res.bands.size() == 3);
    CHECK(res.leftover_rows == std::vector<std::uint32_t>{8, 9});
    CHECK(res.bands.back().padding == 2);
    const auto plane = compress_rows(m, res, 4, 8);
    CHECK(plane.ous.empty());
}

TEST_CASE("random 8x12 matrices: sound pairs and no more stored columns than naive packing") {
    std::mt19937_64 gen(812);
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = testing::random_bits(8, 12, 0.5, gen);
        const auto res = reorder_similarity(m, 4, 8);
        check_structure(m, res, 4);
        CHECK(res.stored_columns() <= naive_bands(m, 4).stored_columns());
    }
}

TEST_CASE("reordering is deterministic and the batched chain equals the stepwise chain") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t rows = 6 + trial % 37;
        const std::size_t cols = 4 + (trial * 7) % 45;
        const double density = std::array<double, 4>{0.05, 0.2, 0.5, 0.8}[trial % 4];
        const std::size_t h = 1 + trial % 8;
        const auto m = testing::random_bits(rows, cols, density, gen);
        ReorderOptions stepwise;
        stepwise.stepwise_chain = true;
        const auto fast = reorder_similarity(m, h, 8);
        const auto slow = reorder_similarity(m, h, 8, stepwise);
        REQUIRE(fast.bands.size() == slow.bands.size());
        for (std::size_t b = 0; b < fast.bands.size(); ++b) {
            CHECK(fast.bands[b].rows == slow.bands[b].rows);
            CHECK(fast.bands[b].pairs == slow.bands[b].pairs);
            CHECK(fast.bands[b].uniques == slow.bands[b].uniques);
        }
        const auto again = reorder_similarity(m, h, 8);
        CHECK(again.bands.size() == fast.bands.size());
        for (std::size_t b = 0; b < fast.bands.size(); ++b) CHECK(again.bands[b].pairs == fast.bands[b].pairs);
        check_structure(m, fast, h);
    }
}

TEST_CASE("trace reports the three steps") {
    std::mt19937_64 gen(5);
    const auto m = testing::random_bits(14, 10, 0.4, gen);
    ReorderOptions o;
    o.trace = true;
    const auto res = reorder_similarity(m, 7, 8, o);
    REQUIRE_FALSE(res.trace.empty());
    auto has = [&](const std::string& needle) {
        return std::any_of(res.trace.begin(), res.trace.end(),
                           [&](const std::string& l) { return l.find(needle) != std::string::npos; });
    };
    CHECK(has("Step 1"));
    CHECK(has("Step 2"));
    CHECK(has("Step 3"));
    CHECK(reorder_similarity(m, 7, 8).trace.empty());
}

TEST_CASE("finalize_band pairs further identical columns and drops zero columns") {
    const auto m = BitMatrix::from_rows({{1, 0, 1, 1, 0}, {0, 0, 1, 0, 1}});
    const auto band = finalize_band(m, {0, 1}, {}, 2, true);
    CHECK(band.zero_columns == std::vector<std::uint32_t>{1});
    CHECK(band.pairs == std::vector<ColumnPair>{{0, 3}});
    CHECK(band.uniques == std::vector<std::uint32_t>{2, 4});
    const auto plain = finalize_band(m, {0, 1}, {}, 2, false);
    CHECK(plain.pairs.empty());
    CHECK(plain.uniques == std::vector<std::uint32_t>{0, 2, 3, 4});
}

TEST_CASE("naive bands keep the original row order") {
    const BitMatrix m(10, 3);
    const auto res = naive_bands(m, 4);
    REQUIRE(res.bands.size() == 3);
    CHECK(res.bands[0].rows == std::vector<std::uint32_t>{0, 1, 2, 3});
    CHECK(res.bands[2].rows == std::vector<std::uint32_t>{8, 9});
    CHECK(res.leftover_rows == std::vector<std::uint32_t>{8, 9});
}

TEST_CASE("row compression removes all-zero OU rows") {
    SUBCASE("one all-zero row") {
        const auto m = BitMatrix::from_rows({{1, 0}, {0, 1}, {0, 0}, {1, 1}});
        ReorderResult r;
        r.bands.push_back(finalize_band(m, {0, 1, 2, 3}, {}, 4, true));
        const auto plane = compress_rows(m, r, 4, 8);
        REQUIRE(plane.ous.size() == 1);
        CHECK(plane.ous[0].active_rows == std::vector<std::uint32_t>{0, 1, 3});
        CHECK(plane.rows_removed == 1);
    }
    SUBCASE("dense OU unchanged") {
        const auto m = BitMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
        ReorderResult r;
        r.bands.push_back(finalize_band(m, {0, 1, 2}, {}, 3, true));
        const auto plane = compress_rows(m, r, 3, 8);
        REQUIRE(plane.ous.size() == 1);
        CHECK(plane.ous[0].active_rows == plane.ous[0].rows);
        CHECK(plane.rows_removed == 0);
    }
}

TEST_CASE("column regrouping matches the exhaustive optimum on an 8-column band") {
    // Four sparse columns avoid rows 0 and 1; four dense ones cover every row.
    const std::vector<std::vector<std::uint32_t>> ones{{2}, {0, 1, 2}, {3}, {0, 3, 4}, {4}, {1, 2, 4}, {2, 3}, {0, 1, 3, 4}};
    BitMatrix m(5, 8);
    for (std::size_t c = 0; c < ones.size(); ++c) {
        for (auto r : ones[c]) m.set(r, c, true);
    }
    ReorderResult bands;
    bands.bands.push_back(finalize_band(m, {0, 1, 2, 3, 4}, {}, 5, true));
    REQUIRE(bands.bands[0].uniques.size() == 8);

    // Exhaustive: every split of the eight columns into two OUs of four.
    std::size_t best = 0;
    std::vector<int> pick{0, 0, 0, 0, 1, 1, 1, 1};
    do {
        std::size_t removed = 0;
        for (int g = 0; g < 2; ++g) {
            for (std::size_t r = 0; r < 5; ++r) {
                bool zero = true;
                for (std::size_t c = 0; c < 8; ++c) zero = zero && !(pick[c] == g && m.get(r, c));
                removed += zero ? 1 : 0;
            }
        }
        best = std::max(best, removed);
    } while (std::next_permutation(pick.begin(), pick.end()));
    CHECK(best == 2);

    const auto plane = compress_rows(m, bands, 5, 4);
    CHECK(plane.ous.size() == 2);
    CHECK(plane.rows_removed == best);

    CompressOptions fixed;
    fixed.reorder_columns = false;
    CHECK(compress_rows(m, bands, 5, 4, fixed).rows_removed == 0);
}

TEST_CASE("OU assignments expose their physical layout") {
    OUAssignment ou;
    ou.pairs = {{1, 4}, {2, 9}};
    ou.uniques = {0, 7};
    CHECK(ou.physical_columns() == 4);
    CHECK(ou.index_count() == 6);
    CHECK(ou.stored_column(0) == 1);
    CHECK(ou.stored_column(1) == 2);
    CHECK(ou.stored_column(3) == 7);
}

TEST_CASE("invalid OU dimensions") {
    const BitMatrix m(4, 4);
    CHECK_THROWS_AS(reorder_similarity(m, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(reorder_similarity(m, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(naive_bands(m, 0), std::invalid_argument);
}
