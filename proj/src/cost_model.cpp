// cost_model.cpp — event pricing and report assembly
#include "oumap/cost_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "oumap/arith.hpp"
#include "oumap/tensor_io.hpp"

namespace oumap::cost {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

CostReport assemble(const plan::CrossbarProgram& program, sim::EventCounts per_vector, std::uint64_t cycles,
                    const PowerTable& power) {
    CostReport r;
    r.ou_count = program.ou_count();
    r.ccq = arith::kInputBits * r.ou_count;
    r.dense_ccq = dense_ccq(program.rows, program.cols, program.geometry);
    r.cycles = cycles;
    r.cycle_bound = sim::cycle_bound(program.geometry);
    r.events = per_vector;
    r.energy_nj = energy_of(per_vector, cycles, power);
    r.ec_nj = r.energy_nj.total();
    r.performance = performance(r.ccq, r.ec_nj);
    r.compression_ratio = r.dense_ccq == 0 ? 0.0 : static_cast<double>(r.ccq) / static_cast<double>(r.dense_ccq);
    r.index = plan::index_overhead_bits(program);
    for (const auto& tile : program.tiles) {
        for (const auto& plane : tile.planes) r.fallback_planes += plane.strategy == plan::Strategy::naive ? 1 : 0;
    }
    return r;
}

}  // namespace

void PowerTable::set(const std::string& key, double value) {
    if (key == "dac") dac = value;
    else if (key == "adc") adc = value;
    else if (key == "readout") readout = value;
    else if (key == "shift_add") shift_add = value;
    else if (key == "buffer") buffer = value;
    else if (key == "pe_controller") pe_controller = value;
    else if (key == "adc_switch") adc_switch = value;
    else if (key == "clock_ghz") clock_ghz = value;
    else throw std::invalid_argument("unknown power table key '" + key + "'");
}

void PowerTable::validate() const {
    for (double v : {dac, adc, readout, shift_add, buffer, pe_controller, adc_switch, clock_ghz}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("power table entries must be positive");
    }
}

PowerTable parse_power_table(std::istream& in) {
    PowerTable t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("power table line " + std::to_string(n) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(val, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != val.size()) {
            throw std::invalid_argument("power table line " + std::to_string(n) + ": '" + val + "' is not a number");
        }
        t.set(key, v);
    }
    t.validate();
    return t;
}

PowerTable load_power_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open power table " + path.string());
    return parse_power_table(in);
}

EnergyBreakdown energy_of(const sim::EventCounts& e, std::uint64_t cycles, const PowerTable& p) {
    EnergyBreakdown b;
    b.dac = p.energy_nj(static_cast<double>(e.dac_drives), p.dac);
    b.adc = p.energy_nj(static_cast<double>(e.adc_conversions), p.adc);
    b.adc_switch = p.energy_nj(static_cast<double>(e.adc_switches), p.adc_switch);
    b.readout = p.energy_nj(static_cast<double>(e.index_bits_read), p.readout);
    b.shift_add = p.energy_nj(static_cast<double>(e.shift_ops()), p.shift_add);
    b.buffer = p.energy_nj(static_cast<double>(e.buffer_accesses), p.buffer);
    b.pe_controller = p.energy_nj(static_cast<double>(cycles), p.pe_controller);
    return b;
}

std::uint64_t dense_ccq(std::size_t rows, std::size_t cols, const Geometry& geometry) {
    std::uint64_t ous = 0;
    for (const auto& rect : plan::tile_layout(rows, cols, geometry)) {
        ous += ((rect.rows + geometry.ou_rows - 1) / geometry.ou_rows) *
               ((rect.cols + geometry.ou_cols - 1) / geometry.ou_cols);
    }
    return ous * kWeightBits * arith::kInputBits;
}

std::optional<double> performance(std::uint64_t ccq, double ec_nj) {
    const double denom = static_cast<double>(ccq) * ec_nj;
    if (!(denom > 0.0)) return std::nullopt;
    return 1.0 / denom;
}

CostReport cost(const sim::ExecutionTrace& trace, const plan::CrossbarProgram& program, const PowerTable& power) {
    if (trace.batch == 0) return assemble(program, {}, 0, power);
    const auto tally = sim::count_events(trace);
    auto per_vector = tally.total;
    // Every vector runs the same schedule, so totals divide evenly.
    const std::uint64_t n = trace.batch;
    per_vector.ou_activations /= n;
    per_vector.wordline_loads /= n;
    per_vector.dac_drives /= n;
    per_vector.adc_conversions /= n;
    per_vector.adc_switches /= n;
    per_vector.shift_adds /= n;
    per_vector.shift_subtracts /= n;
    per_vector.output_writes /= n;
    per_vector.buffer_accesses /= n;
    per_vector.index_bits_read /= n;
    return assemble(program, per_vector, trace.latency_cycles() / n, power);
}

CostReport estimate_cost(const plan::CrossbarProgram& program, Direction direction, const PowerTable& power) {
    return assemble(program, sim::estimate_events(program, direction, 1).total, sim::estimate_latency_cycles(program),
                    power);
}

double improvement(const CostReport& baseline, const CostReport& candidate) {
    const double a = static_cast<double>(baseline.ccq) * baseline.ec_nj;
    const double b = static_cast<double>(candidate.ccq) * candidate.ec_nj;
    if (b == 0.0) return a == 0.0 ? 0.0 : INFINITY;
    return a / b - 1.0;
}

}  // namespace oumap::cost
