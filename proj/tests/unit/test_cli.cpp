// test_cli.cpp — subcommands end to end, exit codes, fixture report
#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "oumap/cli.hpp"
#include "oumap/crossbar_sim.hpp"
#include "oumap/pipeline.hpp"
#include "oumap/plan_file.hpp"
#include "oumap/tensor_io.hpp"
#include "test_support.hpp"

using namespace oumap;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run oumap_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string fixture(const char* name) { return std::string(OUMAP_FIXTURE_DIR) + "/" + name; }

}  // namespace

TEST_CASE("help and usage errors") {
    const auto help = oumap_cli({"--help"});
    CHECK(help.code == cli::kExitOk);
    CHECK(help.out.find("reorder") != std::string::npos);
    CHECK(oumap_cli({}).code == cli::kExitInvalid);
    CHECK(oumap_cli({"reorder"}).code == cli::kExitInvalid);
    CHECK(oumap_cli({"frobnicate"}).code == cli::kExitInvalid);
    CHECK(oumap_cli({"synth", "-o", "/tmp/x", "--sparsity", "2"}).code == cli::kExitInvalid);
}

TEST_CASE("synth, reorder and simulate reproduce the dense product") {
    testing::ScratchDir dir;
    const auto w = (dir / "w.ouft").string();
    const auto x = (dir / "x.ouft").string();
    REQUIRE(oumap_cli({"synth", "--kind", "weights", "--rows", "70", "--cols", "50", "--sparsity", "0.5", "--seed", "3",
                       "-o", w}).code == 0);
    REQUIRE(oumap_cli({"synth", "--kind", "activations", "--rows", "3", "--cols", "70", "--seed", "4", "-o", x}).code ==
            0);
    const auto plan = (dir / "w.oupl").string();
    const auto rebuilt = (dir / "rebuilt.ouft").string();
    const auto r = oumap_cli({"reorder", "-w", w, "-p", plan, "-o", rebuilt, "--jobs", "1"});
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(dir / "w.oupl.json"));

    const auto weights = to_int8_matrix(read_tensor_file(w));
    CHECK(to_int8_matrix(read_tensor_file(rebuilt)) == weights);

    const auto y = (dir / "y.ouft").string();
    const auto trace = (dir / "trace.jsonl").string();
    REQUIRE(oumap_cli({"simulate", "-p", plan, "-a", x, "-o", y, "--trace-out", trace, "-w", w}).code == 0);
    const auto acts = to_int8_matrix(read_tensor_file(x));
    CHECK(to_int64_matrix(read_tensor_file(y)) == dense_matmul(acts, weights));
    std::ifstream in(trace);
    std::string first;
    REQUIRE(std::getline(in, first));
    CHECK(nlohmann::json::parse(first).contains("adc_conversions"));
}

TEST_CASE("all-zero weights give an empty plan") {
    testing::ScratchDir dir;
    write_tensor_file(dir / "z.ouft", TensorFile::from(Int8Matrix(20, 16, 0)));
    const auto r = oumap_cli({"reorder", "-w", (dir / "z.ouft").string(), "-p", (dir / "z.oupl").string()});
    CHECK(r.code == 0);
    CHECK(plan::read_program(dir / "z.oupl").ou_count() == 0);
}

TEST_CASE("exit codes for bad inputs") {
    testing::ScratchDir dir;
    write_tensor_file(dir / "w.ouft", TensorFile::from(pipeline::random_weights(12, 10, 0.3, 1)));
    REQUIRE(oumap_cli({"reorder", "-w", (dir / "w.ouft").string(), "-p", (dir / "w.oupl").string()}).code == 0);

    write_tensor_file(dir / "x.ouft", TensorFile::from(pipeline::random_activations(2, 13, 2)));
    const auto mismatch = oumap_cli({"simulate", "-p", (dir / "w.oupl").string(), "-a", (dir / "x.ouft").string(), "-o",
                                     (dir / "y.ouft").string()});
    CHECK(mismatch.code == cli::kExitInvalid);
    CHECK_FALSE(mismatch.err.empty());

    CHECK(oumap_cli({"reorder", "-w", (dir / "missing.ouft").string(), "-p", (dir / "m.oupl").string()}).code ==
          cli::kExitIo);

    std::ofstream(dir / "junk.ouft") << "definitely not a tensor";
    CHECK(oumap_cli({"reorder", "-w", (dir / "junk.ouft").string(), "-p", (dir / "j.oupl").string()}).code ==
          cli::kExitIo);

    auto bytes = read_file(dir / "w.oupl");
    bytes[bytes.size() / 2] ^= 1;
    write_file_atomic(dir / "bad.oupl", bytes);
    write_tensor_file(dir / "x12.ouft", TensorFile::from(pipeline::random_activations(2, 12, 2)));
    CHECK(oumap_cli({"simulate", "-p", (dir / "bad.oupl").string(), "-a", (dir / "x12.ouft").string(), "-o",
                     (dir / "y.ouft").string()}).code == cli::kExitIo);

    CHECK(oumap_cli({"reorder", "-w", (dir / "w.ouft").string(), "-p", (dir / "w2.oupl").string(), "--ou-height",
                     "0"}).code == cli::kExitInvalid);
}

TEST_CASE("report on the fixture matches the expected output") {
    testing::ScratchDir dir;
    const auto r = oumap_cli({"report", "-w", fixture("weights_64x64.ouft"), "-a", fixture("activations_4x64.ouft"),
                              "--expected", fixture("expected_4x64.ouft"), "-d", dir.path().string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("improvement") != std::string::npos);
    std::ifstream in(dir / "report.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["simulation"]["matches_expected"] == true);
    CHECK(j["simulation"]["matches_dense"] == true);
    CHECK(j["improvement"].get<double>() > 0.0);
    CHECK(j["reordered"]["ccq"].get<std::uint64_t>() <= j["naive"]["ccq"].get<std::uint64_t>());
    CHECK(std::filesystem::exists(dir / "ou_height.csv"));
    CHECK(std::filesystem::exists(dir / "sparsity.csv"));
    CHECK(std::filesystem::exists(dir / "summary.txt"));

    write_tensor_file(dir / "wrong.ouft", TensorFile::from(Int64Matrix(4, 64, 0)));
    const auto wrong = oumap_cli({"report", "-w", fixture("weights_64x64.ouft"), "-a", fixture("activations_4x64.ouft"),
                                  "--expected", (dir / "wrong.ouft").string(), "-d", (dir / "again").string()});
    CHECK(wrong.code == cli::kExitFailure);
}

TEST_CASE("analyze and sweep emit CSV") {
    const auto grid = oumap_cli({"analyze", "--mode", "grid", "--m", "8", "--n", "2", "--k", "half", "--trials", "1000"});
    REQUIRE(grid.code == 0);
    CHECK(grid.out.rfind("m,n,k,p,closed_form,monte_carlo,stderr", 0) == 0);
    CHECK(grid.out.find("8,2,4,0.5,0.63671875") != std::string::npos);

    const auto sweep = oumap_cli({"sweep", "-w", fixture("weights_64x64.ouft"), "--heights", "4,7"});
    REQUIRE(sweep.code == 0);
    std::istringstream lines(sweep.out);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) ++n;
    CHECK(n == 3);
}
