// geometry.hpp — crossbar and Operation Unit dimensions
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oumap {

struct Geometry {
    std::size_t crossbar_rows = 128;
    std::size_t crossbar_cols = 128;
    std::size_t ou_rows = 7;
    std::size_t ou_cols = 8;

    /// OU slots along each crossbar dimension.
    std::size_t slot_rows() const { return crossbar_rows / ou_rows; }
    std::size_t slot_cols() const { return crossbar_cols / ou_cols; }
    std::size_t slots() const { return slot_rows() * slot_cols(); }

    /// Largest weight split that one crossbar holds at full OU granularity.
    std::size_t tile_rows() const { return slot_rows() * ou_rows; }
    std::size_t tile_cols() const { return slot_cols() * ou_cols; }

    /// ADC bits needed to digitize an OU column of 1-bit cells exactly.
    std::size_t adc_bits() const {
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) <= ou_rows) ++bits;
        return bits;
    }

    void validate() const {
        if (ou_rows == 0 || ou_cols == 0) throw std::invalid_argument("OU dimensions must be positive");
        if (ou_rows > crossbar_rows || ou_cols > crossbar_cols) {
            throw std::invalid_argument("OU dimensions must not exceed the crossbar");
        }
        if (crossbar_rows > 65535 || crossbar_cols > 65535) throw std::invalid_argument("crossbar too large");
        if (ou_rows > 255 || ou_cols > 127) throw std::invalid_argument("OU too large for the plan encoding");
    }

    bool operator==(const Geometry&) const = default;
};

enum class Direction { horizontal, vertical };

inline const char* to_string(Direction d) { return d == Direction::horizontal ? "horizontal" : "vertical"; }

inline Direction parse_direction(const std::string& s) {
    if (s == "horizontal") return Direction::horizontal;
    if (s == "vertical") return Direction::vertical;
    throw std::invalid_argument("direction must be 'horizontal' or 'vertical', got '" + s + "'");
}

}  // namespace oumap
