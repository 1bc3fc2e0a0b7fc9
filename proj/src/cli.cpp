// cli.cpp — subcommand wiring for the `oumap` executable
#include "oumap/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oumap/bit_stats.hpp"
#include "oumap/config.hpp"
#include "oumap/cost_model.hpp"
#include "oumap/crossbar_sim.hpp"
#include "oumap/pipeline.hpp"
#include "oumap/plan_file.hpp"
#include "oumap/tensor_io.hpp"

namespace oumap::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
    write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

/// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_text(path, text);
    }
}

/// i8 tensors load as-is; f32 tensors are quantized.
Int8Matrix load_weights(const fs::path& path) {
    const auto t = load_tensor_any(path);
    switch (t.dtype) {
        case DType::i8: return to_int8_matrix(t);
        case DType::f32: return quantize_i8(to_real_matrix(t)).values;
        default: throw std::invalid_argument(path.string() + ": weights must be f32 or i8");
    }
}

Int8Matrix load_activations(const fs::path& path) {
    const auto t = load_tensor_any(path);
    if (t.dtype != DType::i8) throw std::invalid_argument(path.string() + ": activations must be i8");
    if (t.dims.size() == 1) return Int8Matrix(1, t.dims[0], to_int8_matrix(t).data());
    if (t.dims.size() != 2) throw std::invalid_argument(path.string() + ": activations must be rank 1 or 2");
    return to_int8_matrix(t);
}

Int8Matrix prune_i8(const Int8Matrix& w, double target) {
    RealMatrix real(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.size(); ++i) real.data()[i] = static_cast<float>(w.data()[i]);
    const auto pruned = prune_magnitude(real, target);
    Int8Matrix out(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.size(); ++i) out.data()[i] = static_cast<std::int8_t>(pruned.data()[i]);
    return out;
}

/// Options shared by every subcommand. Each subcommand registers its own
/// copy of a flag, so "given" checks all of them.
struct Common {
    std::string config_path;
    unsigned jobs = 0;
    std::string direction;
    std::size_t ou_height = 7;
    std::size_t ou_width = 8;
    std::uint64_t seed = 1;
    std::vector<CLI::Option*> jobs_opts, height_opts, width_opts, direction_opts, seed_opts;

    static bool given(const std::vector<CLI::Option*>& opts) {
        for (const auto* o : opts) {
            if (o->count() > 0) return true;
        }
        return false;
    }

    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (given(jobs_opts)) cfg.jobs = jobs;
        if (given(height_opts)) cfg.geometry.ou_rows = ou_height;
        if (given(width_opts)) cfg.geometry.ou_cols = ou_width;
        if (given(direction_opts)) cfg.direction = parse_direction(direction);
        if (given(seed_opts)) cfg.seed = seed;
        cfg.validate();
        return cfg;
    }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "key = value configuration file; flags override its values")
        ->check(CLI::ExistingFile);
    c.jobs_opts.push_back(app->add_option("--jobs", c.jobs, "worker threads (default: all cores); results do not depend on it"));
}

void add_geometry(CLI::App* app, Common& c) {
    c.height_opts.push_back(app->add_option("--ou-height", c.ou_height, "OU height in crossbar rows (default 7)"));
    c.width_opts.push_back(app->add_option("--ou-width", c.ou_width, "OU width in crossbar columns (default 8)"));
    c.direction_opts.push_back(app->add_option("--direction", c.direction, "OU scheduling: horizontal | vertical")
                                   ->check(CLI::IsMember({"horizontal", "vertical"})));
}

cost::PowerTable power_of(const RunConfig& cfg) {
    return cfg.power_table ? cost::load_power_table(*cfg.power_table) : cost::PowerTable{};
}

pipeline::CompileOptions compile_options(const RunConfig& cfg) {
    pipeline::CompileOptions o;
    o.geometry = cfg.geometry;
    o.direction = cfg.direction;
    o.power = power_of(cfg);
    o.jobs = cfg.effective_jobs();
    return o;
}

pipeline::Mode parse_mode(const std::string& s) {
    if (s == "reordered") return pipeline::Mode::reordered;
    if (s == "similarity") return pipeline::Mode::similarity_only;
    if (s == "naive") return pipeline::Mode::naive;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

ordered_json report_json(const cost::CostReport& r) {
    ordered_json j;
    j["ccq"] = r.ccq;
    j["dense_ccq"] = r.dense_ccq;
    j["compression_ratio"] = r.compression_ratio;
    j["ou_count"] = r.ou_count;
    j["cycles"] = r.cycles;
    j["cycle_bound"] = r.cycle_bound;
    j["events"] = {{"ou_activations", r.events.ou_activations}, {"wordline_loads", r.events.wordline_loads},
                   {"dac_drives", r.events.dac_drives},         {"adc_conversions", r.events.adc_conversions},
                   {"adc_switches", r.events.adc_switches},     {"shift_adds", r.events.shift_adds},
                   {"shift_subtracts", r.events.shift_subtracts}, {"output_writes", r.events.output_writes},
                   {"buffer_accesses", r.events.buffer_accesses}, {"index_bits_read", r.events.index_bits_read}};
    j["energy_nj"] = {{"dac", r.energy_nj.dac},
                      {"adc", r.energy_nj.adc},
                      {"adc_switch", r.energy_nj.adc_switch},
                      {"readout", r.energy_nj.readout},
                      {"shift_add", r.energy_nj.shift_add},
                      {"buffer", r.energy_nj.buffer},
                      {"pe_controller", r.energy_nj.pe_controller},
                      {"total", r.ec_nj}};
    j["performance"] = r.performance ? ordered_json(*r.performance) : ordered_json(nullptr);
    j["index_bits"] = {{"row_routing", r.index.row_routing_bits},
                       {"output_indices", r.index.output_index_bits},
                       {"total", r.index.total()},
                       {"same_crossbar_total", r.index.same_crossbar_total()}};
    j["fallback_planes"] = r.fallback_planes;
    return j;
}

std::string summary_table(const cost::CostReport& naive, const cost::CostReport& reordered, double improvement) {
    std::ostringstream s;
    auto row = [&](const std::string& name, const std::string& a, const std::string& b) {
        s << std::left << std::setw(26) << name << std::right << ' ' << std::setw(16) << a << ' ' << std::setw(16) << b
          << '\n';
    };
    auto fmt = [](double v) {
        std::ostringstream os;
        os << std::setprecision(6) << v;
        return os.str();
    };
    row("metric", "naive", "reordered");
    row("CCQ (OU activations)", std::to_string(naive.ccq), std::to_string(reordered.ccq));
    row("dense CCQ", std::to_string(naive.dense_ccq), std::to_string(reordered.dense_ccq));
    row("compression ratio", fmt(naive.compression_ratio), fmt(reordered.compression_ratio));
    row("cycles (busiest xbar)", std::to_string(naive.cycles), std::to_string(reordered.cycles));
    row("energy EC (nJ)", fmt(naive.ec_nj), fmt(reordered.ec_nj));
    row("performance 1/(CCQ*EC)", naive.performance ? fmt(*naive.performance) : "n/a",
        reordered.performance ? fmt(*reordered.performance) : "n/a");
    row("index bits", std::to_string(naive.index.total()), std::to_string(reordered.index.total()));
    s << "improvement: " << fmt(improvement * 100.0) << " %\n";
    return s.str();
}

std::string sweep_csv(const std::vector<pipeline::SweepPoint>& points) {
    std::ostringstream s;
    s << "ou_height,ccq,dense_ccq,compression_ratio,fallback_planes\n";
    for (const auto& p : points) {
        s << p.ou_rows << ',' << p.ccq << ',' << p.dense_ccq << ',' << fmt(p.compression_ratio) << ','
          << p.fallback_planes << '\n';
    }
    return s.str();
}

std::string sparsity_csv(const std::vector<pipeline::SparsityPoint>& points) {
    std::ostringstream s;
    s << "target_sparsity,sparsity,naive_ccq,reordered_ccq,improvement\n";
    for (const auto& p : points) {
        s << fmt(p.target) << ',' << fmt(p.sparsity) << ',' << p.naive_ccq << ',' << p.reordered_ccq << ','
          << fmt(p.improvement) << '\n';
    }
    return s.str();
}

// --- subcommands -----------------------------------------------------------

struct QuantizeArgs {
    std::string input, output;
    std::optional<double> sparsity;
};

int do_quantize(const QuantizeArgs& a, const Common& c, std::ostream& out) {
    c.resolve();
    const auto t = load_tensor_any(a.input);
    if (t.dtype != DType::f32) throw std::invalid_argument("quantize expects an f32 tensor");
    RealMatrix real = to_real_matrix(t);
    if (a.sparsity) real = prune_magnitude(real, *a.sparsity);
    const auto q = quantize_i8(real);
    write_tensor_file(a.output, TensorFile::from(q.values));
    out << "shape " << q.values.rows() << "x" << q.values.cols() << " scale " << fmt(q.scale) << " sparsity "
        << fmt(q.sparsity) << '\n';
    return kExitOk;
}

struct AnalyzeArgs {
    std::string mode = "grid";
    std::vector<std::size_t> m{8, 14, 20};
    std::vector<std::size_t> n{2, 3, 4};
    std::vector<std::string> k{"half", "7"};
    std::vector<double> p{0.5};
    std::size_t trials = 100000;
    std::string tensor;
    std::vector<double> sparsities{0.0, 0.2, 0.4, 0.6, 0.8};
    std::size_t count = 1000000;
    std::string out_path;
};

int do_analyze(const AnalyzeArgs& a, const Common& c, std::ostream& out) {
    const auto cfg = c.resolve();
    std::ostringstream csv;
    if (a.mode == "grid") {
        csv << "m,n,k,p,closed_form,monte_carlo,stderr\n";
        std::uint64_t point = 0;
        for (auto m : a.m) {
            for (auto n : a.n) {
                for (const auto& ks : a.k) {
                    const std::size_t k = ks == "half" ? m / 2 : static_cast<std::size_t>(std::stoul(ks));
                    if (k > m) continue;
                    for (double p : a.p) {
                        const double closed = stats::prob_at_least_k_identical_biased(m, n, k, p);
                        const auto mc = stats::monte_carlo_identical_rows_biased(
                            m, n, k, p, a.trials, stats::splitmix64(cfg.seed + point++), cfg.effective_jobs());
                        csv << m << ',' << n << ',' << k << ',' << fmt(p) << ',' << fmt(closed) << ','
                            << fmt(mc.estimate) << ',' << fmt(mc.stderr_) << '\n';
                    }
                }
            }
        }
    } else if (a.mode == "zero-ratio") {
        csv << "sparsity,ideal_ratio,measured_ratio\n";
        std::optional<Int8Matrix> base;
        if (!a.tensor.empty()) base = load_weights(a.tensor);
        std::uint64_t point = 0;
        for (double target : a.sparsities) {
            Int8Matrix w;
            if (base) {
                w = prune_i8(*base, target);
            } else {
                const std::size_t cols = 1000;
                const std::size_t rows = (a.count + cols - 1) / cols;
                w = pipeline::random_weights(rows, cols, target, cfg.seed + point++);
            }
            const double s = sparsity_of(w);
            csv << fmt(s) << ',' << fmt(stats::zero_bit_ratio(s)) << ','
                << fmt(stats::measured_zero_bit_ratio(to_bit_planes(w))) << '\n';
        }
    } else {
        throw std::invalid_argument("analyze mode must be 'grid' or 'zero-ratio'");
    }
    emit(a.out_path, csv.str(), out);
    return kExitOk;
}

struct ReorderArgs {
    std::string weights, plan, output, mode = "reordered", trace_file;
    bool trace = false;
};

int do_reorder(const ReorderArgs& a, const Common& c, std::ostream& out) {
    const auto cfg = c.resolve();
    const auto w = load_weights(a.weights);
    auto opts = compile_options(cfg);
    opts.mode = parse_mode(a.mode);
    opts.trace = a.trace || !a.trace_file.empty();
    const auto compiled = pipeline::compile(w, opts);
    plan::write_program(a.plan, compiled.program);
    write_text(a.plan + ".json", plan::program_summary_json(compiled.program) + "\n");
    if (!a.output.empty()) write_tensor_file(a.output, TensorFile::from(plan::reconstruct_weights(compiled.program)));

    std::ostringstream log;
    for (const auto& line : compiled.stats.trace) log << line << '\n';
    if (!a.trace_file.empty()) write_text(a.trace_file, log.str());
    if (a.trace) out << log.str();
    out << "OUs " << compiled.program.ou_count() << " (similarity " << compiled.stats.similarity_ous << ", naive "
        << compiled.stats.naive_ous << "), fallback planes " << compiled.stats.fallback_planes << "/"
        << compiled.stats.planes << ", rows removed " << compiled.stats.rows_removed << '\n';
    return kExitOk;
}

struct SimulateArgs {
    std::string plan, activations, output, trace_out, weights;
};

int do_simulate(const SimulateArgs& a, const Common& c, std::ostream& out) {
    auto cfg = c.resolve();
    const auto program = plan::read_program(a.plan);
    if (!Common::given(c.direction_opts)) cfg.direction = program.direction;
    if (!a.weights.empty()) {
        const auto w = load_weights(a.weights);
        if (w.rows() != program.rows || w.cols() != program.cols || plan::weight_checksum(w) != program.weight_crc) {
            throw std::invalid_argument("weights do not match the plan checksum");
        }
    }
    const auto x = load_activations(a.activations);
    const auto result = sim::simulate(program, x, {cfg.direction, cfg.effective_jobs()});
    write_tensor_file(a.output, TensorFile::from(result.output));
    if (!a.trace_out.empty()) {
        std::ostringstream s;
        sim::write_trace_jsonl(s, result.trace);
        write_text(a.trace_out, s.str());
    }
    const auto report = cost::cost(result.trace, program, power_of(cfg));
    out << "batch " << x.rows() << " direction " << to_string(cfg.direction) << " CCQ " << report.ccq << " cycles "
        << report.cycles << " EC " << fmt(report.ec_nj) << " nJ\n";
    return kExitOk;
}

struct ReportArgs {
    std::string weights, activations, expected, out_dir;
    std::vector<std::size_t> heights{2, 4, 7, 14};
    std::vector<double> sparsities{0.0, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
};

int do_report(const ReportArgs& a, const Common& c, std::ostream& out) {
    const auto cfg = c.resolve();
    const auto w = load_weights(a.weights);
    const auto opts = compile_options(cfg);
    const auto cmp = pipeline::compare_baseline(w, opts);

    ordered_json j;
    j["shape"] = {w.rows(), w.cols()};
    j["sparsity"] = sparsity_of(w);
    j["geometry"] = {{"crossbar_rows", cfg.geometry.crossbar_rows},
                     {"crossbar_cols", cfg.geometry.crossbar_cols},
                     {"ou_rows", cfg.geometry.ou_rows},
                     {"ou_cols", cfg.geometry.ou_cols}};
    j["direction"] = to_string(cfg.direction);
    j["naive"] = report_json(cmp.naive);
    j["reordered"] = report_json(cmp.reordered);
    j["improvement"] = cmp.improvement;
    j["planes"] = cmp.stats.planes;
    j["fallback_planes"] = cmp.stats.fallback_planes;
    j["similarity_only_ccq"] = cmp.stats.similarity_ous * 8;

    int status = kExitOk;
    if (!a.activations.empty()) {
        const auto x = load_activations(a.activations);
        const auto compiled = pipeline::compile(w, opts);
        const auto result = sim::simulate(compiled.program, x, {cfg.direction, cfg.effective_jobs()});
        const auto dense = dense_matmul(x, w);
        ordered_json s;
        s["batch"] = x.rows();
        s["matches_dense"] = result.output == dense;
        if (!a.expected.empty()) {
            const auto expected = to_int64_matrix(read_tensor_file(a.expected));
            s["matches_expected"] = result.output == expected;
            if (!(result.output == expected)) status = kExitFailure;
        }
        if (!(result.output == dense)) status = kExitFailure;
        const auto traced = cost::cost(result.trace, compiled.program, opts.power);
        s["traced"] = report_json(traced);
        ordered_json rows = ordered_json::array();
        for (std::size_t r = 0; r < result.output.rows(); ++r) {
            const auto row = result.output.row(r);
            rows.push_back(std::vector<std::int64_t>(row.begin(), row.end()));
        }
        s["output"] = std::move(rows);
        j["simulation"] = std::move(s);
    }

    const auto heights = pipeline::sweep_ou_height(w, a.heights, opts);
    const auto sparsity = pipeline::sweep_sparsity(w, a.sparsities, opts);
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_text(dir / "report.json", j.dump(2) + "\n");
    write_text(dir / "ou_height.csv", sweep_csv(heights));
    write_text(dir / "sparsity.csv", sparsity_csv(sparsity));
    const auto table = summary_table(cmp.naive, cmp.reordered, cmp.improvement);
    write_text(dir / "summary.txt", table);
    out << table;
    return status;
}

struct SweepArgs {
    std::string weights, out_path;
    std::vector<std::size_t> heights{2, 4, 7, 14};
};

int do_sweep(const SweepArgs& a, const Common& c, std::ostream& out) {
    const auto cfg = c.resolve();
    const auto w = load_weights(a.weights);
    emit(a.out_path, sweep_csv(pipeline::sweep_ou_height(w, a.heights, compile_options(cfg))), out);
    return kExitOk;
}

struct SynthArgs {
    std::string kind = "weights", output;
    std::size_t rows = 64, cols = 64;
    double sparsity = 0.5;
};

int do_synth(const SynthArgs& a, const Common& c, std::ostream& out) {
    const auto cfg = c.resolve();
    const auto m = a.kind == "weights" ? pipeline::random_weights(a.rows, a.cols, a.sparsity, cfg.seed)
                                       : pipeline::random_activations(a.rows, a.cols, cfg.seed);
    write_tensor_file(a.output, TensorFile::from(m));
    out << a.kind << ' ' << m.rows() << 'x' << m.cols() << " sparsity " << fmt(sparsity_of(m)) << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"oumap: bit-level similarity reordering and OU mapping for ReRAM crossbars", "oumap"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    Common common;

    QuantizeArgs qa;
    auto* quantize = app.add_subcommand("quantize", "prune (optional) and quantize an f32 tensor to i8");
    quantize->add_option("-i,--input", qa.input, "f32 TensorFile or .npy")->required();
    quantize->add_option("-o,--output", qa.output, "i8 TensorFile to write")->required();
    quantize->add_option("--sparsity", qa.sparsity, "magnitude-prune to this zero fraction first")
        ->check(CLI::Range(0.0, 1.0));
    add_common(quantize, common);

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "bit statistics: identical-row grid or zero-bit ratio CSV");
    analyze->add_option("--mode", aa.mode, "grid | zero-ratio")->check(CLI::IsMember({"grid", "zero-ratio"}));
    analyze->add_option("--m", aa.m, "grid: vector lengths")->delimiter(',');
    analyze->add_option("--n", aa.n, "grid: column group sizes")->delimiter(',');
    analyze->add_option("--k", aa.k, "grid: thresholds, integers or 'half' for m/2")->delimiter(',');
    analyze->add_option("--p", aa.p, "grid: bit-zero probabilities (0.5 = uniform bits)")->delimiter(',');
    analyze->add_option("--trials", aa.trials, "grid: Monte-Carlo trials per point");
    analyze->add_option("--tensor", aa.tensor, "zero-ratio: tensor to prune and measure (default: synthetic)");
    analyze->add_option("--sparsities", aa.sparsities, "zero-ratio: target sparsities")->delimiter(',');
    analyze->add_option("--count", aa.count, "zero-ratio: synthetic values per point");
    analyze->add_option("--out", aa.out_path, "CSV path (default: stdout)");
    common.seed_opts.push_back(analyze->add_option("--seed", common.seed, "base seed"));
    add_common(analyze, common);

    ReorderArgs ra;
    auto* reorder = app.add_subcommand("reorder", "build a crossbar program (plan file) from weights");
    reorder->add_option("-w,--weights", ra.weights, "i8 or f32 TensorFile / .npy")->required();
    reorder->add_option("-p,--plan", ra.plan, "plan file to write (a .json summary is written beside it)")
        ->required();
    reorder->add_option("-o,--output", ra.output, "write the weights rebuilt from the plan as an i8 TensorFile");
    reorder->add_option("--mode", ra.mode, "reordered | similarity | naive")
        ->check(CLI::IsMember({"reordered", "similarity", "naive"}));
    reorder->add_flag("--trace", ra.trace, "print the reordering step log");
    reorder->add_option("--trace-file", ra.trace_file, "write the reordering step log to a file");
    add_geometry(reorder, common);
    add_common(reorder, common);

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "run a plan on activations");
    simulate->add_option("-p,--plan", sa.plan, "plan file")->required();
    simulate->add_option("-a,--activations", sa.activations, "i8 TensorFile, batch x rows")->required();
    simulate->add_option("-o,--output", sa.output, "i64 TensorFile to write")->required();
    simulate->add_option("--trace-out", sa.trace_out, "JSON-lines event trace");
    simulate->add_option("-w,--weights", sa.weights, "verify the plan was built from these weights");
    common.direction_opts.push_back(
        simulate->add_option("--direction", common.direction, "horizontal | vertical (default: the plan's)")
            ->check(CLI::IsMember({"horizontal", "vertical"})));
    add_common(simulate, common);

    ReportArgs rpa;
    auto* report = app.add_subcommand("report", "compare naive and reordered mappings; write JSON and CSV");
    report->add_option("-w,--weights", rpa.weights, "i8 or f32 TensorFile / .npy")->required();
    report->add_option("-a,--activations", rpa.activations, "optional i8 activations to simulate");
    report->add_option("--expected", rpa.expected, "optional i64 TensorFile the simulated output must equal");
    report->add_option("-d,--out-dir", rpa.out_dir, "directory for report.json, CSV curves, summary.txt")
        ->required();
    report->add_option("--heights", rpa.heights, "OU heights for the compression-ratio curve")->delimiter(',');
    report->add_option("--sparsities", rpa.sparsities, "prune targets for the improvement curve")->delimiter(',');
    add_geometry(report, common);
    add_common(report, common);

    SweepArgs swa;
    auto* sweep = app.add_subcommand("sweep", "compression ratio versus OU height (CSV)");
    sweep->add_option("-w,--weights", swa.weights, "i8 or f32 TensorFile / .npy")->required();
    sweep->add_option("--heights", swa.heights, "ascending OU heights")->delimiter(',');
    sweep->add_option("--out", swa.out_path, "CSV path (default: stdout)");
    add_geometry(sweep, common);
    add_common(sweep, common);

    SynthArgs sya;
    auto* synth = app.add_subcommand("synth", "write a seeded random i8 tensor");
    synth->add_option("--kind", sya.kind, "weights | activations")->check(CLI::IsMember({"weights", "activations"}));
    synth->add_option("--rows", sya.rows, "rows (batch for activations)");
    synth->add_option("--cols", sya.cols, "columns");
    synth->add_option("--sparsity", sya.sparsity, "zero fraction for weights")->check(CLI::Range(0.0, 1.0));
    synth->add_option("-o,--output", sya.output, "TensorFile to write")->required();
    common.seed_opts.push_back(synth->add_option("--seed", common.seed, "seed"));
    add_common(synth, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (quantize->parsed()) return do_quantize(qa, common, out);
        if (analyze->parsed()) return do_analyze(aa, common, out);
        if (reorder->parsed()) return do_reorder(ra, common, out);
        if (simulate->parsed()) return do_simulate(sa, common, out);
        if (report->parsed()) return do_report(rpa, common, out);
        if (sweep->parsed()) return do_sweep(swa, common, out);
        if (synth->parsed()) return do_synth(sya, common, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const plan::CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitInvalid;
}

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace oumap::cli
