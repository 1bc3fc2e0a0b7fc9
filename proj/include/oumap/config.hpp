// config.hpp — RunConfig and its flat key = value file format
//
// Recognized keys (all optional):
//   crossbar_rows, crossbar_cols   crossbar size            (128, 128)
//   ou_rows, ou_cols               Operation Unit size      (7, 8)
//   direction                      horizontal | vertical    (horizontal)
//   seed                           base seed for synthetic data and Monte-Carlo (1)
//   jobs                           worker threads, 0 = all cores (0)
//   power_table                    path to a power table file
//   weight_bits, input_bits        must be 8
// Blank lines and text after '#' are ignored. Command-line flags override
// file values.
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>

#include "oumap/geometry.hpp"

namespace oumap {

struct RunConfig {
    Geometry geometry;
    Direction direction = Direction::horizontal;
    std::uint64_t seed = 1;
    unsigned jobs = 0;
    std::optional<std::filesystem::path> power_table;
    int weight_bits = 8;
    int input_bits = 8;

    /// Throws std::invalid_argument for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void validate() const;

    /// jobs, with 0 resolved to the machine's core count.
    unsigned effective_jobs() const;
};

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace oumap
