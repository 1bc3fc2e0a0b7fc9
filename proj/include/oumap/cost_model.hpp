// cost_model.hpp — CCQ, energy, compression ratio and performance metric
//
// CCQ counts OU activations for one input vector: every placed OU fires
// once per input bit. The dense reference CCQ is what the same matrix needs
// with no reordering and no zero skipping: every tile fully tiled by OUs.
//
// Energy of a component = events × power × clock period. An ADC switch is
// priced as one cycle of its configurable power (default: the PE
// controller's). The PE controller draws power for every latency cycle.
// Index storage is read once per input vector at the one-bit readout power.
//
// performance = 1 / (CCQ × EC), with EC the energy per input vector in nJ.
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>

#include "oumap/crossbar_sim.hpp"
#include "oumap/ou_plan.hpp"

namespace oumap::cost {

/// Component powers in mW at the given clock.
struct PowerTable {
    double dac = 0.049;
    double adc = 6.05;
    double readout = 0.2;
    double shift_add = 7.29;
    double buffer = 4.2;
    double pe_controller = 0.48;
    double adc_switch = 0.48;
    double clock_ghz = 1.2;

    double period_ns() const { return 1.0 / clock_ghz; }

    /// Energy in nJ of `events` each lasting one cycle at `power_mw`.
    double energy_nj(double events, double power_mw) const { return events * power_mw * period_ns() * 1e-3; }

    void set(const std::string& key, double value);
    void validate() const;
};

/// Reads `key = value` lines; '#' starts a comment. Unknown keys are errors.
PowerTable parse_power_table(std::istream& in);
PowerTable load_power_table(const std::filesystem::path& path);

struct EnergyBreakdown {
    double dac = 0;
    double adc = 0;
    double adc_switch = 0;
    double readout = 0;
    double shift_add = 0;
    double buffer = 0;
    double pe_controller = 0;

    double total() const { return dac + adc + adc_switch + readout + shift_add + buffer + pe_controller; }
};

EnergyBreakdown energy_of(const sim::EventCounts& events, std::uint64_t cycles, const PowerTable& power);

struct CostReport {
    std::uint64_t ccq = 0;             ///< OU activations per input vector
    std::uint64_t dense_ccq = 0;       ///< same matrix, every OU slot of every tile used
    std::uint64_t ou_count = 0;
    std::uint64_t cycles = 0;          ///< busiest crossbar, per input vector
    std::uint64_t cycle_bound = 0;     ///< per crossbar, per input vector
    sim::EventCounts events;           ///< per input vector
    EnergyBreakdown energy_nj;         ///< per input vector
    double ec_nj = 0;
    std::optional<double> performance;
    double compression_ratio = 0;      ///< ccq / dense_ccq
    plan::IndexOverhead index;
    std::size_t fallback_planes = 0;
};

/// Dense reference CCQ for a rows × cols matrix.
std::uint64_t dense_ccq(std::size_t rows, std::size_t cols, const Geometry& geometry);

std::optional<double> performance(std::uint64_t ccq, double ec_nj);

/// Cost from a simulated trace; counts are normalized per input vector.
CostReport cost(const sim::ExecutionTrace& trace, const plan::CrossbarProgram& program, const PowerTable& power);

/// Cost from the closed-form event model, for one input vector.
CostReport estimate_cost(const plan::CrossbarProgram& program, Direction direction, const PowerTable& power);

/// (ccq_a · ec_a) / (ccq_b · ec_b) − 1: how much better b performs than a.
double improvement(const CostReport& baseline, const CostReport& candidate);

}  // namespace oumap::cost
