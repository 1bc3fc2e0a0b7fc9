// ou_plan.hpp — CrossbarProgram: bit-split placement, routing tables, index streams
//
// A weight matrix is cut into tiles of geometry.tile_rows() ×
// geometry.tile_cols(). Every tile is programmed into eight crossbars, one
// per weight bit plane (plane b lives in Computation Unit b), so each
// crossbar's results carry a single shift amount b and plane 7 is the
// only one combined by subtraction.
//
// Within a crossbar, the OUs of one row band share a slot row and take
// consecutive slot columns. An OU's physical rows hold its active rows,
// compacted to the top; its physical columns hold the pairs first and
// then the unique columns, in the order of its output index stream.
//
// Output index stream (8-bit unsigned deltas, tile-local column indices):
//   pairs   first_0, second_0 - first_0, first_1 - first_0, second_1 - first_1, ...
//   uniques u_0, u_1 - u_0, u_2 - u_1, ...
// The decoder needs only the stream length and the pair count r.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oumap/bit_matrix.hpp"
#include "oumap/geometry.hpp"
#include "oumap/reorder.hpp"
#include "oumap/tensor_io.hpp"

namespace oumap::plan {

inline constexpr std::size_t kDeltaBits = 8;

/// Raised when a plan does not fit the crossbar it is assigned to.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Strategy : std::uint8_t { similarity = 0, naive = 1 };

inline const char* to_string(Strategy s) { return s == Strategy::similarity ? "similarity" : "naive"; }

struct OutputIndexStream {
    std::vector<std::uint8_t> deltas;
    std::uint32_t pair_count = 0;  ///< r: the first 2r entries encode pairs

    std::size_t size() const { return deltas.size(); }
    bool operator==(const OutputIndexStream&) const = default;
};

struct DecodedIndices {
    std::vector<reorder::ColumnPair> pairs;
    std::vector<std::uint32_t> uniques;

    bool operator==(const DecodedIndices&) const = default;
};

OutputIndexStream encode_output_indices(const reorder::OUAssignment& ou);
DecodedIndices decode_output_indices(const OutputIndexStream& stream);

struct PlacedOU {
    reorder::OUAssignment ou;
    std::uint32_t slot_row = 0;
    std::uint32_t slot_col = 0;
};

/// One crossbar: the OUs of one bit plane of one tile and its cell image.
struct PlaneProgram {
    Strategy strategy = Strategy::similarity;
    std::vector<PlacedOU> ous;
    BitMatrix image;  ///< crossbar_rows × crossbar_cols programmed cells
};

struct TileRect {
    std::uint32_t row_offset = 0;
    std::uint32_t col_offset = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;

    bool operator==(const TileRect&) const = default;
};

struct TileProgram {
    TileRect rect;
    std::array<PlaneProgram, kWeightBits> planes;
};

struct CrossbarProgram {
    Geometry geometry;
    Direction direction = Direction::horizontal;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::uint32_t weight_crc = 0;  ///< CRC-32 of the source i8 weights (row-major)
    std::vector<TileProgram> tiles;

    std::size_t ou_count() const;
    std::size_t plane_ou_count(int plane) const;

    /// Left shift applied to every partial sum read from plane b.
    static constexpr int plane_shift(int plane) { return plane; }
    static constexpr bool plane_is_sign(int plane) { return plane == kWeightBits - 1; }
};

/// Plans for one tile, one per bit plane, before placement.
struct TilePlan {
    TileRect rect;
    std::array<reorder::CompressedPlane, kWeightBits> planes;
    std::array<Strategy, kWeightBits> strategies{};
};

/// Tiles covering a rows × cols matrix, row-major order.
std::vector<TileRect> tile_layout(std::size_t rows, std::size_t cols, const Geometry& geometry);

/// Bit matrix of one plane restricted to a tile.
BitMatrix tile_plane(const Int8Matrix& weights, const TileRect& rect, int plane);

std::uint32_t weight_checksum(const Int8Matrix& weights);

/// Slot assignment: one slot row per non-empty band in order of first
/// appearance, consecutive slot columns within a band. No capacity check.
std::vector<PlacedOU> place_ous(const reorder::CompressedPlane& plane);

/// Places every OU into a slot and programs the crossbar images.
/// Throws CapacityError naming each (tile, plane) that overflows.
CrossbarProgram build_program(const Int8Matrix& weights, const std::vector<TilePlan>& plans,
                              const Geometry& geometry, Direction direction);

/// Rebuilds the signed weights from crossbar images and routing tables.
Int8Matrix reconstruct_weights(const CrossbarProgram& program);

/// Checks images, routing and index bounds; throws FormatError on violation.
void validate_program(const CrossbarProgram& program);

struct IndexOverhead {
    std::uint64_t row_routing_bits = 0;    ///< Σ active rows × ⌈log2 tile rows⌉
    std::uint64_t output_index_bits = 0;   ///< Σ stream length × kDeltaBits
    std::uint64_t shift_record_bits = 0;   ///< what a same-crossbar layout would add
    std::uint64_t total() const { return row_routing_bits + output_index_bits; }
    std::uint64_t same_crossbar_total() const { return total() + shift_record_bits; }
};

/// ⌈log2 n⌉, at least 1.
std::size_t index_bits(std::size_t n);

/// Routing + index bits of one OU in a tile with `tile_rows` rows.
std::uint64_t ou_index_bits(const reorder::OUAssignment& ou, std::size_t tile_rows);

IndexOverhead index_overhead_bits(const CrossbarProgram& program);

}  // namespace oumap::plan
