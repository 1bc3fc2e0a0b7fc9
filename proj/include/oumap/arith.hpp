// arith.hpp — exact two's-complement bit-serial MAC arithmetic
//
// A signed 8-bit product splits into four terms by sign/magnitude bits:
//
//   in × w =  in7·w7·2^14
//           − in7·2^7 · Σ_{i<7} w_i·2^i
//           − w7·2^7  · Σ_{i<7} in_i·2^i
//           + (Σ_{i<7} in_i·2^i) · (Σ_{i<7} w_i·2^i)
//
// On the crossbar each weight bit plane sits in its own column group and
// input bits stream LSB first, one per cycle. The partial sum of cycle c
// on plane b is shifted by c + b and subtracted exactly when one (and only
// one) of the two bits involved is a sign bit: plane 7 during cycles 0..6,
// or planes 0..6 during cycle 7.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "oumap/tensor_io.hpp"

namespace oumap::arith {

inline constexpr int kInputBits = 8;

/// The four additive terms of a decomposed signed product.
struct ProductTerms {
    std::int32_t sign_sign = 0;       ///< +in7·w7·2^14
    std::int32_t input_sign = 0;      ///< −in7·2^7·|w| magnitude bits
    std::int32_t weight_sign = 0;     ///< −w7·2^7·|in| magnitude bits
    std::int32_t magnitude = 0;       ///< +magnitude × magnitude

    std::int32_t sum() const { return sign_sign + input_sign + weight_sign + magnitude; }
};

ProductTerms decompose_product(std::int8_t input, std::int8_t weight);

inline std::int32_t signed_mul_decomposed(std::int8_t input, std::int8_t weight) {
    return decompose_product(input, weight).sum();
}

/// True when the (input cycle, weight plane) partial sum is shift-and-subtracted.
constexpr bool subtracts(int input_cycle, int weight_plane) {
    return (input_cycle == kInputBits - 1) != (weight_plane == kWeightBits - 1);
}

/// Bit columns of one weight column, indexed [plane][row], values 0/1.
using PlaneColumns = std::array<std::vector<std::uint8_t>, kWeightBits>;

PlaneColumns column_planes(std::span<const std::int8_t> weights);

/// Per-output-column accumulators for the shift-and-add/subtract combine step.
class PartialSumLedger {
public:
    explicit PartialSumLedger(std::size_t columns) : acc_(columns, 0) {}

    /// Folds one digitized partial sum into output `column`.
    void accumulate(std::size_t column, int input_cycle, int weight_plane, std::int64_t partial) {
        const std::int64_t shifted = partial * (std::int64_t{1} << (input_cycle + weight_plane));
        if (subtracts(input_cycle, weight_plane)) {
            acc_[column] -= shifted;
            ++subtract_ops_;
        } else {
            acc_[column] += shifted;
            ++add_ops_;
        }
    }

    std::span<const std::int64_t> values() const { return acc_; }
    std::int64_t value(std::size_t column) const { return acc_[column]; }
    std::uint64_t add_ops() const { return add_ops_; }
    std::uint64_t subtract_ops() const { return subtract_ops_; }

private:
    std::vector<std::int64_t> acc_;
    std::uint64_t add_ops_ = 0;
    std::uint64_t subtract_ops_ = 0;
};

/// Streams `inputs` bit-serially against the weight planes of one column.
std::int64_t bit_serial_mac(std::span<const std::int8_t> inputs, const PlaneColumns& weight_planes);

}  // namespace oumap::arith
