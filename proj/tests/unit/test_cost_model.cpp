// test_cost_model.cpp — energy arithmetic, CCQ, performance, power tables
#include <doctest.h>

#include <sstream>

#include "oumap/cost_model.hpp"
#include "oumap/pipeline.hpp"
#include "test_support.hpp"

using namespace oumap;
using namespace oumap::cost;

TEST_CASE("empty trace costs nothing and has no performance value") {
    const auto program = pipeline::compile(Int8Matrix(8, 8, 0)).program;
    sim::ExecutionTrace empty;
    const auto r = cost::cost(empty, program, PowerTable{});
    CHECK(r.ec_nj == 0.0);
    CHECK(r.ccq == 0);
    CHECK_FALSE(r.performance.has_value());
    CHECK_FALSE(performance(0, 1.0).has_value());
    CHECK_FALSE(performance(8, 0.0).has_value());
}

TEST_CASE("energy is events times power times the clock period") {
    sim::EventCounts e;
    e.dac_drives = 7;
    e.adc_conversions = 8;
    e.adc_switches = 1;
    e.index_bits_read = 85;
    e.shift_adds = 6;
    e.shift_subtracts = 2;
    e.buffer_accesses = 9;
    const std::uint64_t cycles = 1;
    const double period = 1.0 / 1.2;  // ns at 1.2 GHz
    const double expect = (7 * 0.049 + 8 * 6.05 + 1 * 0.48 + 85 * 0.2 + 8 * 7.29 + 9 * 4.2 + 1 * 0.48) * period * 1e-3;
    const auto b = energy_of(e, cycles, PowerTable{});
    CHECK(b.total() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(b.adc == doctest::Approx(8 * 6.05 * period * 1e-3));
    CHECK(b.pe_controller == doctest::Approx(0.48 * period * 1e-3));
}

TEST_CASE("doubling every event doubles EC and halves performance") {
    sim::EventCounts e;
    e.dac_drives = 70;
    e.adc_conversions = 80;
    e.adc_switches = 3;
    e.index_bits_read = 500;
    e.shift_adds = 60;
    e.shift_subtracts = 20;
    e.buffer_accesses = 90;
    const PowerTable p;
    const double one = energy_of(e, 10, p).total();
    const double two = energy_of(e.scaled(2), 20, p).total();
    CHECK(two == doctest::Approx(2 * one).epsilon(1e-12));
    CHECK(*performance(64, two) == doctest::Approx(*performance(64, one) / 2).epsilon(1e-12));
}

TEST_CASE("dense reference CCQ") {
    const Geometry g;
    CHECK(dense_ccq(126, 128, g) == 18 * 16 * 8 * 8);
    CHECK(dense_ccq(128, 128, g) == (18 * 16 + 1 * 16) * 8 * 8);
    CHECK(dense_ccq(7, 1, g) == 64);
    CHECK(dense_ccq(8, 9, g) == 2 * 2 * 64);
}

TEST_CASE("simulated and closed-form cost agree") {
    const auto w = pipeline::random_weights(80, 60, 0.5, 12);
    const auto program = pipeline::compile(w).program;
    const auto res = sim::simulate(program, pipeline::random_activations(4, 80, 13));
    const PowerTable p;
    const auto a = cost::cost(res.trace, program, p);
    const auto b = estimate_cost(program, Direction::horizontal, p);
    CHECK(a.ccq == b.ccq);
    CHECK(a.events == b.events);
    CHECK(a.cycles == b.cycles);
    CHECK(a.ec_nj == doctest::Approx(b.ec_nj).epsilon(1e-12));
    CHECK(a.ccq == 8 * program.ou_count());
    CHECK(a.compression_ratio == doctest::Approx(static_cast<double>(a.ccq) / static_cast<double>(a.dense_ccq)));
    REQUIRE(a.performance.has_value());
    CHECK(*a.performance == doctest::Approx(1.0 / (static_cast<double>(a.ccq) * a.ec_nj)));
}

TEST_CASE("improvement ratio") {
    CostReport base;
    base.ccq = 100;
    base.ec_nj = 2.0;
    CostReport better = base;
    better.ccq = 50;
    CHECK(improvement(base, base) == 0.0);
    CHECK(improvement(base, better) == doctest::Approx(1.0));
    CostReport none;
    CHECK(improvement(none, none) == 0.0);
}

TEST_CASE("power tables") {
    std::istringstream in("# custom table\nadc = 3.0\n  clock_ghz=2   # faster\n\n");
    const auto p = parse_power_table(in);
    CHECK(p.adc == 3.0);
    CHECK(p.clock_ghz == 2.0);
    CHECK(p.dac == 0.049);
    CHECK(p.period_ns() == 0.5);

    std::istringstream bad_key("flux = 1\n");
    CHECK_THROWS_AS(parse_power_table(bad_key), std::invalid_argument);
    std::istringstream bad_value("adc = lots\n");
    CHECK_THROWS_AS(parse_power_table(bad_value), std::invalid_argument);
    std::istringstream negative("adc = -1\n");
    CHECK_THROWS_AS(parse_power_table(negative), std::invalid_argument);
    CHECK_THROWS_AS(load_power_table("/nonexistent/power.txt"), IoError);
}
