// arith.cpp — decomposed signed multiply and bit-serial MAC
#include "oumap/arith.hpp"

#include <stdexcept>

namespace oumap::arith {

namespace {

int bit(std::int8_t v, int i) { return (static_cast<std::uint8_t>(v) >> i) & 1; }

std::int32_t magnitude_bits(std::int8_t v) { return static_cast<std::uint8_t>(v) & 0x7F; }

}  // namespace

ProductTerms decompose_product(std::int8_t input, std::int8_t weight) {
    constexpr int top = kWeightBits - 1;
    const int in_sign = bit(input, top);
    const int w_sign = bit(weight, top);
    ProductTerms t;
    t.sign_sign = in_sign * w_sign * (1 << (2 * top));
    t.input_sign = -in_sign * (1 << top) * magnitude_bits(weight);
    t.weight_sign = -w_sign * (1 << top) * magnitude_bits(input);
    t.magnitude = magnitude_bits(input) * magnitude_bits(weight);
    return t;
}

PlaneColumns column_planes(std::span<const std::int8_t> weights) {
    PlaneColumns planes;
    for (int b = 0; b < kWeightBits; ++b) {
        planes[b].resize(weights.size());
        for (std::size_t r = 0; r < weights.size(); ++r) {
            planes[b][r] = static_cast<std::uint8_t>(bit(weights[r], b));
        }
    }
    return planes;
}

std::int64_t bit_serial_mac(std::span<const std::int8_t> inputs, const PlaneColumns& weight_planes) {
    for (const auto& p : weight_planes) {
        if (p.size() != inputs.size()) throw std::invalid_argument("length mismatch between inputs and weight column");
    }
    PartialSumLedger ledger(1);
    for (int c = 0; c < kInputBits; ++c) {
        for (int b = 0; b < kWeightBits; ++b) {
            std::int64_t partial = 0;
            for (std::size_t r = 0; r < inputs.size(); ++r) {
                partial += bit(inputs[r], c) & weight_planes[b][r];
            }
            ledger.accumulate(0, c, b, partial);
        }
    }
    return ledger.value(0);
}

}  // namespace oumap::arith
