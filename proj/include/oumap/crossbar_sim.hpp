// crossbar_sim.hpp — functional, cycle-counted execution of a CrossbarProgram
//
// Every OU activation drives one input bit onto the OU's active word lines,
// digitizes each physical column with the ADC (exact, 0..ou_rows), shifts
// the result by (input bit + plane) and adds or subtracts it into every
// output register that the column's index stream names. A repetitive column
// is converted once and fanned out to both of its outputs.
//
// Scheduling (per crossbar, per input vector, plane 0 first):
//   horizontal  slot rows in order; within a slot row, input bits 0..7 and
//               for each bit the OUs left to right. The word-line vector is
//               loaded once and reused while consecutive OUs share their
//               input routing; the ADC multiplexer switches whenever the
//               column group changes.
//   vertical    slot columns in order; within a slot column, OUs top to
//               bottom and for each OU bits 0..7. Every activation loads its
//               own word-line vector; the ADC switches only when the slot
//               column changes.
// Output-index bits of an OU are read once per input vector, at its first
// activation.
#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "oumap/matrix.hpp"
#include "oumap/ou_plan.hpp"

namespace oumap::sim {

struct EventCounts {
    std::uint64_t ou_activations = 0;
    std::uint64_t wordline_loads = 0;   ///< input word-line vectors fetched and driven
    std::uint64_t dac_drives = 0;       ///< word lines driven by a DAC
    std::uint64_t adc_conversions = 0;
    std::uint64_t adc_switches = 0;     ///< ADC multiplexer changes of column group
    std::uint64_t shift_adds = 0;
    std::uint64_t shift_subtracts = 0;
    std::uint64_t output_writes = 0;    ///< output register updates (pairs write twice)
    std::uint64_t buffer_accesses = 0;  ///< wordline_loads + output_writes
    std::uint64_t index_bits_read = 0;  ///< one-bit readouts of routing and index storage

    std::uint64_t shift_ops() const { return shift_adds + shift_subtracts; }

    EventCounts& operator+=(const EventCounts& o);
    EventCounts scaled(std::uint64_t factor) const;
    bool operator==(const EventCounts&) const = default;
};

struct CycleRecord {
    std::uint32_t sample = 0;
    std::uint32_t tile = 0;
    std::uint8_t plane = 0;
    std::uint8_t input_bit = 0;
    std::uint32_t ou_id = 0;
    std::uint16_t slot_row = 0;
    std::uint16_t slot_col = 0;
    std::uint64_t cycle = 0;  ///< cycle index on this crossbar
    std::uint8_t rows_activated = 0;
    std::uint8_t dac_drives = 0;
    std::uint8_t adc_conversions = 0;
    std::uint8_t adc_switch = 0;
    std::uint8_t shift_adds = 0;
    std::uint8_t shift_subtracts = 0;
    std::uint8_t output_writes = 0;
    std::uint8_t buffer_accesses = 0;
    std::uint32_t index_bits_read = 0;
};

struct ExecutionTrace {
    Direction direction = Direction::horizontal;
    std::size_t batch = 0;
    std::size_t tiles = 0;
    std::vector<CycleRecord> records;
    std::vector<std::uint64_t> crossbar_cycles;  ///< [tile * 8 + plane], whole batch
    std::uint64_t max_partial = 0;               ///< largest digitized column value seen
    std::uint64_t ledger_add_ops = 0;
    std::uint64_t ledger_subtract_ops = 0;

    /// Cycles of the busiest crossbar, whole batch.
    std::uint64_t latency_cycles() const;
};

struct SimulationResult {
    Int64Matrix output;
    ExecutionTrace trace;
};

struct SimulateOptions {
    Direction direction = Direction::horizontal;
    unsigned jobs = 1;
};

/// Throws std::invalid_argument when activations.cols() != program.rows.
SimulationResult simulate(const plan::CrossbarProgram& program, const Int8Matrix& activations,
                          const SimulateOptions& options = {});

struct EventTally {
    std::array<EventCounts, kWeightBits> per_plane{};
    EventCounts total;
};

EventTally count_events(const ExecutionTrace& trace);

/// Closed-form event counts for `batch` input vectors, without simulating.
EventTally estimate_events(const plan::CrossbarProgram& program, Direction direction, std::size_t batch = 1);

/// Closed-form events of one crossbar for one input vector.
EventCounts estimate_crossbar_events(const std::vector<plan::PlacedOU>& ous, int plane, std::size_t tile_rows,
                                     Direction direction);

/// Activations of the busiest crossbar for one input vector.
std::uint64_t estimate_latency_cycles(const plan::CrossbarProgram& program);

/// Upper bound on activations of one crossbar for one input vector.
std::uint64_t cycle_bound(const Geometry& geometry);

/// One JSON object per record.
void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace);

}  // namespace oumap::sim
