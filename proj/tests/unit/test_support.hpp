// test_support.hpp — scratch directories and random bit matrices for unit tests
#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "oumap/bit_matrix.hpp"

namespace oumap::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    ScratchDir() {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("oumap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Each bit is 1 with probability `density`.
inline BitMatrix random_bits(std::size_t rows, std::size_t cols, double density, std::mt19937_64& gen) {
    std::bernoulli_distribution bit(density);
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m.set(r, c, bit(gen));
    }
    return m;
}

}  // namespace oumap::testing
