// crossbar_sim.cpp — OU-granular bit-serial simulation and event counting
#include "oumap/crossbar_sim.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "oumap/arith.hpp"
#include "oumap/parallel.hpp"

namespace oumap::sim {

namespace {

using plan::PlacedOU;

/// Indices of `ous` in the order the direction schedules them.
std::vector<std::size_t> schedule(const std::vector<PlacedOU>& ous, Direction direction) {
    std::vector<std::size_t> order(ous.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = ous[a];
        const auto& y = ous[b];
        if (direction == Direction::horizontal) {
            return std::tie(x.slot_row, x.slot_col) < std::tie(y.slot_row, y.slot_col);
        }
        return std::tie(x.slot_col, x.slot_row) < std::tie(y.slot_col, y.slot_row);
    });
    return order;
}

std::uint64_t subtracting_bits(int plane) {
    std::uint64_t n = 0;
    for (int c = 0; c < arith::kInputBits; ++c) n += arith::subtracts(c, plane) ? 1 : 0;
    return n;
}

/// Simulates one input vector; appends records and returns its output row.
struct SampleRun {
    std::vector<CycleRecord> records;
    std::vector<std::int64_t> output;
    std::vector<std::uint64_t> crossbar_cycles;
    std::uint64_t max_partial = 0;
    std::uint64_t add_ops = 0;
    std::uint64_t subtract_ops = 0;
};

SampleRun run_sample(const plan::CrossbarProgram& program, std::span<const std::int8_t> x, std::uint32_t sample,
                     Direction direction, const std::vector<std::vector<std::size_t>>& orders) {
    const auto& g = program.geometry;
    const std::uint64_t adc_max = (std::uint64_t{1} << g.adc_bits()) - 1;
    SampleRun run;
    run.crossbar_cycles.assign(program.tiles.size() * kWeightBits, 0);
    arith::PartialSumLedger ledger(program.cols);
    std::vector<std::uint64_t> partial(g.ou_cols);

    for (std::size_t t = 0; t < program.tiles.size(); ++t) {
        const auto& tile = program.tiles[t];
        for (int b = 0; b < kWeightBits; ++b) {
            const auto& plane = tile.planes[static_cast<std::size_t>(b)];
            const auto& order = orders[t * kWeightBits + static_cast<std::size_t>(b)];
            std::uint64_t cycle = 0;
            bool have_col = false;
            std::uint32_t current_col = 0;
            const std::vector<std::uint32_t>* loaded = nullptr;

            auto activate = [&](const PlacedOU& placed, int c, bool first_of_ou) {
                const auto& ou = placed.ou;
                CycleRecord rec;
                rec.sample = sample;
                rec.tile = static_cast<std::uint32_t>(t);
                rec.plane = static_cast<std::uint8_t>(b);
                rec.input_bit = static_cast<std::uint8_t>(c);
                rec.ou_id = ou.ou_id;
                rec.slot_row = static_cast<std::uint16_t>(placed.slot_row);
                rec.slot_col = static_cast<std::uint16_t>(placed.slot_col);
                rec.cycle = cycle++;
                rec.rows_activated = static_cast<std::uint8_t>(ou.active_rows.size());

                if (direction == Direction::vertical || loaded == nullptr || *loaded != ou.active_rows) {
                    rec.dac_drives = rec.rows_activated;
                    rec.buffer_accesses += 1;
                    loaded = &ou.active_rows;
                }
                if (have_col && current_col != placed.slot_col) rec.adc_switch = 1;
                have_col = true;
                current_col = placed.slot_col;

                const std::size_t phys = ou.physical_columns();
                std::fill(partial.begin(), partial.end(), 0);
                for (std::size_t k = 0; k < ou.active_rows.size(); ++k) {
                    const auto in = static_cast<std::uint8_t>(x[tile.rect.row_offset + ou.active_rows[k]]);
                    if (((in >> c) & 1U) == 0) continue;
                    const std::size_t xr = placed.slot_row * g.ou_rows + k;
                    for (std::size_t j = 0; j < phys; ++j) {
                        partial[j] += plane.image.get(xr, placed.slot_col * g.ou_cols + j) ? 1 : 0;
                    }
                }
                rec.adc_conversions = static_cast<std::uint8_t>(phys);
                const bool sub = arith::subtracts(c, b);
                (sub ? rec.shift_subtracts : rec.shift_adds) = static_cast<std::uint8_t>(phys);
                for (std::size_t j = 0; j < phys; ++j) {
                    if (partial[j] > adc_max) throw std::logic_error("partial sum exceeds the ADC range");
                    run.max_partial = std::max(run.max_partial, partial[j]);
                    const auto value = static_cast<std::int64_t>(partial[j]);
                    if (j < ou.pairs.size()) {
                        ledger.accumulate(tile.rect.col_offset + ou.pairs[j].first, c, b, value);
                        ledger.accumulate(tile.rect.col_offset + ou.pairs[j].second, c, b, value);
                    } else {
                        ledger.accumulate(tile.rect.col_offset + ou.uniques[j - ou.pairs.size()], c, b, value);
                    }
                }
                rec.output_writes = static_cast<std::uint8_t>(ou.index_count());
                rec.buffer_accesses = static_cast<std::uint8_t>(rec.buffer_accesses + rec.output_writes);
                if (first_of_ou) rec.index_bits_read = static_cast<std::uint32_t>(plan::ou_index_bits(ou, tile.rect.rows));
                run.records.push_back(rec);
            };

            if (direction == Direction::horizontal) {
                std::size_t i = 0;
                while (i < order.size()) {
                    std::size_t end = i;
                    while (end < order.size() && plane.ous[order[end]].slot_row == plane.ous[order[i]].slot_row) ++end;
                    for (int c = 0; c < arith::kInputBits; ++c) {
                        loaded = nullptr;  // a new input bit always reloads the word lines
                        for (std::size_t k = i; k < end; ++k) activate(plane.ous[order[k]], c, c == 0);
                    }
                    i = end;
                }
            } else {
                for (auto idx : order) {
                    for (int c = 0; c < arith::kInputBits; ++c) activate(plane.ous[idx], c, c == 0);
                }
            }
            run.crossbar_cycles[t * kWeightBits + static_cast<std::size_t>(b)] = cycle;
        }
    }
    run.output.assign(ledger.values().begin(), ledger.values().end());
    run.add_ops = ledger.add_ops();
    run.subtract_ops = ledger.subtract_ops();
    return run;
}

}  // namespace

EventCounts& EventCounts::operator+=(const EventCounts& o) {
    ou_activations += o.ou_activations;
    wordline_loads += o.wordline_loads;
    dac_drives += o.dac_drives;
    adc_conversions += o.adc_conversions;
    adc_switches += o.adc_switches;
    shift_adds += o.shift_adds;
    shift_subtracts += o.shift_subtracts;
    output_writes += o.output_writes;
    buffer_accesses += o.buffer_accesses;
    index_bits_read += o.index_bits_read;
    return *this;
}

EventCounts EventCounts::scaled(std::uint64_t f) const {
    EventCounts e = *this;
    e.ou_activations *= f;
    e.wordline_loads *= f;
    e.dac_drives *= f;
    e.adc_conversions *= f;
    e.adc_switches *= f;
    e.shift_adds *= f;
    e.shift_subtracts *= f;
    e.output_writes *= f;
    e.buffer_accesses *= f;
    e.index_bits_read *= f;
    return e;
}

std::uint64_t ExecutionTrace::latency_cycles() const {
    return crossbar_cycles.empty() ? 0 : *std::max_element(crossbar_cycles.begin(), crossbar_cycles.end());
}

SimulationResult simulate(const plan::CrossbarProgram& program, const Int8Matrix& activations,
                          const SimulateOptions& options) {
    if (activations.cols() != program.rows) {
        throw std::invalid_argument("activation width " + std::to_string(activations.cols()) +
                                    " does not match weight rows " + std::to_string(program.rows));
    }
    std::vector<std::vector<std::size_t>> orders;
    orders.reserve(program.tiles.size() * kWeightBits);
    for (const auto& tile : program.tiles) {
        for (const auto& plane : tile.planes) orders.push_back(schedule(plane.ous, options.direction));
    }

    const std::size_t batch = activations.rows();
    std::vector<SampleRun> runs(batch);
    parallel_for(batch, options.jobs, [&](std::size_t s) {
        runs[s] = run_sample(program, activations.row(s), static_cast<std::uint32_t>(s), options.direction, orders);
    });

    SimulationResult result;
    result.output = Int64Matrix(batch, program.cols, 0);
    auto& trace = result.trace;
    trace.direction = options.direction;
    trace.batch = batch;
    trace.tiles = program.tiles.size();
    trace.crossbar_cycles.assign(program.tiles.size() * kWeightBits, 0);
    std::size_t total_records = 0;
    for (const auto& r : runs) total_records += r.records.size();
    trace.records.reserve(total_records);
    for (std::size_t s = 0; s < batch; ++s) {
        auto& run = runs[s];
        std::copy(run.output.begin(), run.output.end(), result.output.row(s).begin());
        // Crossbar cycle indices continue across the batch.
        for (auto& rec : run.records) rec.cycle += trace.crossbar_cycles[rec.tile * kWeightBits + rec.plane];
        for (std::size_t i = 0; i < run.crossbar_cycles.size(); ++i) trace.crossbar_cycles[i] += run.crossbar_cycles[i];
        trace.max_partial = std::max(trace.max_partial, run.max_partial);
        trace.ledger_add_ops += run.add_ops;
        trace.ledger_subtract_ops += run.subtract_ops;
        trace.records.insert(trace.records.end(), run.records.begin(), run.records.end());
        run = SampleRun{};
    }
    return result;
}

EventTally count_events(const ExecutionTrace& trace) {
    EventTally tally;
    for (const auto& rec : trace.records) {
        auto& e = tally.per_plane[rec.plane];
        e.ou_activations += 1;
        e.wordline_loads += rec.dac_drives > 0 ? 1 : 0;
        e.dac_drives += rec.dac_drives;
        e.adc_conversions += rec.adc_conversions;
        e.adc_switches += rec.adc_switch;
        e.shift_adds += rec.shift_adds;
        e.shift_subtracts += rec.shift_subtracts;
        e.output_writes += rec.output_writes;
        e.buffer_accesses += rec.buffer_accesses;
        e.index_bits_read += rec.index_bits_read;
    }
    for (const auto& e : tally.per_plane) tally.total += e;
    return tally;
}

EventCounts estimate_crossbar_events(const std::vector<PlacedOU>& ous, int plane, std::size_t tile_rows,
                                     Direction direction) {
    constexpr std::uint64_t bits = arith::kInputBits;
    EventCounts e;
    std::uint64_t phys = 0;
    for (const auto& placed : ous) {
        phys += placed.ou.physical_columns();
        e.output_writes += bits * placed.ou.index_count();
        e.index_bits_read += plan::ou_index_bits(placed.ou, tile_rows);
    }
    e.ou_activations = bits * ous.size();
    e.adc_conversions = bits * phys;
    const std::uint64_t sub_bits = subtracting_bits(plane);
    e.shift_subtracts = sub_bits * phys;
    e.shift_adds = (bits - sub_bits) * phys;

    const auto order = schedule(ous, direction);
    if (direction == Direction::vertical) {
        std::uint64_t rows = 0;
        for (const auto& placed : ous) rows += placed.ou.active_rows.size();
        e.wordline_loads = bits * ous.size();
        e.dac_drives = bits * rows;
        std::uint64_t groups = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k == 0 || ous[order[k]].slot_col != ous[order[k - 1]].slot_col) ++groups;
        }
        e.adc_switches = groups == 0 ? 0 : groups - 1;
    } else {
        std::size_t i = 0;
        const PlacedOU* previous_last = nullptr;
        while (i < order.size()) {
            std::size_t end = i;
            while (end < order.size() && ous[order[end]].slot_row == ous[order[i]].slot_row) ++end;
            const auto& first = ous[order[i]];
            const auto& last = ous[order[end - 1]];
            std::uint64_t loads = 1;
            std::uint64_t driven = first.ou.active_rows.size();
            std::uint64_t inner_switches = 0;
            for (std::size_t k = i + 1; k < end; ++k) {
                const auto& cur = ous[order[k]];
                const auto& prev = ous[order[k - 1]];
                if (cur.ou.active_rows != prev.ou.active_rows) {
                    ++loads;
                    driven += cur.ou.active_rows.size();
                }
                if (cur.slot_col != prev.slot_col) ++inner_switches;
            }
            e.wordline_loads += bits * loads;
            e.dac_drives += bits * driven;
            e.adc_switches += bits * inner_switches + (bits - 1) * (last.slot_col != first.slot_col ? 1 : 0);
            if (previous_last != nullptr && previous_last->slot_col != first.slot_col) e.adc_switches += 1;
            previous_last = &last;
            i = end;
        }
    }
    e.buffer_accesses = e.wordline_loads + e.output_writes;
    return e;
}

EventTally estimate_events(const plan::CrossbarProgram& program, Direction direction, std::size_t batch) {
    EventTally tally;
    for (const auto& tile : program.tiles) {
        for (int b = 0; b < kWeightBits; ++b) {
            tally.per_plane[static_cast<std::size_t>(b)] +=
                estimate_crossbar_events(tile.planes[static_cast<std::size_t>(b)].ous, b, tile.rect.rows, direction)
                    .scaled(batch);
        }
    }
    for (const auto& e : tally.per_plane) tally.total += e;
    return tally;
}

std::uint64_t estimate_latency_cycles(const plan::CrossbarProgram& program) {
    std::uint64_t worst = 0;
    for (const auto& tile : program.tiles) {
        for (const auto& plane : tile.planes) {
            worst = std::max<std::uint64_t>(worst, arith::kInputBits * plane.ous.size());
        }
    }
    return worst;
}

std::uint64_t cycle_bound(const Geometry& geometry) { return arith::kInputBits * geometry.slots(); }

void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace) {
    for (const auto& r : trace.records) {
        nlohmann::ordered_json j;
        j["sample"] = r.sample;
        j["tile"] = r.tile;
        j["plane"] = r.plane;
        j["input_bit"] = r.input_bit;
        j["ou"] = r.ou_id;
        j["slot"] = {r.slot_row, r.slot_col};
        j["cycle"] = r.cycle;
        j["rows_activated"] = r.rows_activated;
        j["dac_drives"] = r.dac_drives;
        j["adc_conversions"] = r.adc_conversions;
        j["adc_switch"] = r.adc_switch;
        j["shift_add"] = r.shift_adds;
        j["shift_subtract"] = r.shift_subtracts;
        j["output_writes"] = r.output_writes;
        j["buffer_accesses"] = r.buffer_accesses;
        j["index_bits_read"] = r.index_bits_read;
        out << j.dump() << '\n';
    }
}

}  // namespace oumap::sim
