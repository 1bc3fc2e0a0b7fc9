// test_config.cpp — RunConfig parsing and validation
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oumap/config.hpp"
#include "oumap/tensor_io.hpp"
#include "test_support.hpp"

using namespace oumap;

TEST_CASE("defaults") {
    std::istringstream in("");
    const auto cfg = parse_config(in);
    CHECK(cfg.geometry == Geometry{});
    CHECK(cfg.direction == Direction::horizontal);
    CHECK(cfg.seed == 1);
    CHECK(cfg.effective_jobs() >= 1);
    CHECK_FALSE(cfg.power_table.has_value());
}

TEST_CASE("keys, comments and relative paths") {
    std::istringstream in(
        "# geometry\n"
        "ou_rows = 4\n"
        "ou_cols=16   # wide\n"
        "direction = vertical\n"
        "seed = 42\n"
        "jobs = 2\n"
        "power_table = power.txt\n");
    const auto cfg = parse_config(in, "/etc/oumap");
    CHECK(cfg.geometry.ou_rows == 4);
    CHECK(cfg.geometry.ou_cols == 16);
    CHECK(cfg.direction == Direction::vertical);
    CHECK(cfg.seed == 42);
    CHECK(cfg.effective_jobs() == 2);
    CHECK(*cfg.power_table == std::filesystem::path("/etc/oumap/power.txt"));
}

TEST_CASE("invalid configurations") {
    const char* bad[] = {"colour = red\n", "ou_rows = -3\n", "ou_rows = 0\n", "direction = diagonal\n",
                         "weight_bits = 4\n", "ou_rows 7\n", "ou_rows = 200\ncrossbar_rows = 100\n"};
    for (const char* text : bad) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), IoError);
}

TEST_CASE("config files resolve paths against their directory") {
    testing::ScratchDir dir;
    std::ofstream(dir / "run.cfg") << "power_table = p.txt\nseed = 7\n";
    const auto cfg = load_config(dir / "run.cfg");
    CHECK(cfg.seed == 7);
    CHECK(*cfg.power_table == dir / "p.txt");
}
