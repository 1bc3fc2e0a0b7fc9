// reorder.hpp — bit-level similarity reordering and OU row compression
//
// Pipeline for one bit plane of one crossbar-sized weight split:
//
//   reorder_similarity   picks OU row bands whose rows make as many column
//                        pairs bit-identical as possible (greedy sHD search)
//   compress_rows        drops all-zero columns, lays pairs out first,
//                        groups the remaining columns so OUs gather
//                        all-zero rows, then removes those rows
//
// All tie-breaks are fixed (smallest (i, j) first), so identical input and
// geometry always yield the identical plan.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oumap/bit_matrix.hpp"

namespace oumap::reorder {

/// Number of rows where two equal-length 0/1 columns differ.
std::size_t shd(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

struct ColumnPair {
    std::uint32_t first = 0;   ///< stored column (smaller index)
    std::uint32_t second = 0;  ///< column whose output reuses `first`

    bool operator==(const ColumnPair&) const = default;
};

struct PairEntry {
    ColumnPair columns;
    RowSet rows;              ///< rows where the two columns agree
    std::size_t numrows = 0;  ///< rows.count()

    std::vector<std::uint32_t> rowid() const { return rows.indices(); }
};

/// Greedy minimum-sHD pairing of `columns` over `rows`. Entries appear in
/// pick order; with an odd column count one column is left unpaired.
struct ColumnPairDict {
    std::vector<PairEntry> entries;
    std::optional<std::uint32_t> unpaired;
};

ColumnPairDict column_pair(const BitMatrix& m, std::span<const std::uint32_t> columns, const RowSet& rows);

/// One OU row band: up to h rows and the column layout valid on them.
struct RowBand {
    std::vector<std::uint32_t> rows;          ///< ascending original row indices
    std::vector<ColumnPair> pairs;            ///< bit-identical on `rows`, not all-zero
    std::vector<std::uint32_t> uniques;       ///< stored once, no partner
    std::vector<std::uint32_t> zero_columns;  ///< all-zero on `rows`, never stored
    std::size_t padding = 0;                  ///< inactive rows below a short band
    std::size_t searched_pairs = 0;           ///< pairs found by the similarity search

    std::size_t stored_columns() const { return pairs.size() + uniques.size(); }
};

struct ReorderResult {
    std::vector<RowBand> bands;
    std::vector<std::uint32_t> leftover_rows;  ///< rows of the final short band, if any
    std::vector<std::string> trace;            ///< step log when requested

    std::size_t stored_columns() const;
};

struct ReorderOptions {
    bool trace = false;
    /// Pair any further columns that are bit-identical on a finished band.
    bool complete_pairs = true;
    /// Take every chain step with a full closest-pair scan instead of
    /// resolving runs of bit-identical columns at once. Same result, slower.
    bool stepwise_chain = false;
};

ReorderResult reorder_similarity(const BitMatrix& m, std::size_t ou_height, std::size_t ou_width,
                                 const ReorderOptions& options = {});

/// Baseline layout: consecutive row bands in original order, no pairing.
ReorderResult naive_bands(const BitMatrix& m, std::size_t ou_height);

/// Splits the columns of `rows` into zero columns, pairs and uniques.
/// `seed_pairs` are kept as pairs unless they are all-zero on `rows`.
RowBand finalize_band(const BitMatrix& m, std::vector<std::uint32_t> rows, std::span<const ColumnPair> seed_pairs,
                      std::size_t ou_height, bool complete_pairs);

/// A single Operation Unit after row compression.
struct OUAssignment {
    std::uint32_t ou_id = 0;
    std::uint32_t band = 0;                   ///< index of the source row band
    std::vector<std::uint32_t> rows;          ///< band rows (row-validity map domain)
    std::vector<std::uint32_t> active_rows;   ///< rows kept after all-zero rows are removed
    std::vector<ColumnPair> pairs;            ///< repetitive physical columns, first
    std::vector<std::uint32_t> uniques;       ///< non-repetitive physical columns, after
    std::size_t padding = 0;

    std::size_t physical_columns() const { return pairs.size() + uniques.size(); }
    std::size_t index_count() const { return 2 * pairs.size() + uniques.size(); }
    std::uint32_t stored_column(std::size_t j) const { return j < pairs.size() ? pairs[j].first : uniques[j - pairs.size()]; }
};

struct CompressOptions {
    /// Regroup unique columns by zero count before packing into OUs.
    bool reorder_columns = true;
};

struct CompressedPlane {
    std::vector<OUAssignment> ous;
    std::size_t rows_removed = 0;  ///< all-zero OU rows eliminated

    std::size_t active_rows() const;
};

CompressedPlane compress_rows(const BitMatrix& m, const ReorderResult& bands, std::size_t ou_height,
                              std::size_t ou_width, const CompressOptions& options = {});

/// Rows of `rows` that hold a 1 in any stored column of the OU.
std::vector<std::uint32_t> nonzero_rows(const BitMatrix& m, std::span<const std::uint32_t> rows,
                                        std::span<const ColumnPair> pairs, std::span<const std::uint32_t> uniques);

}  // namespace oumap::reorder
