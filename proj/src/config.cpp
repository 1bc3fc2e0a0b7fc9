// config.cpp — RunConfig parsing and validation
#include "oumap/config.hpp"

#include <charconv>
#include <fstream>

#include "oumap/parallel.hpp"
#include "oumap/tensor_io.hpp"

namespace oumap {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw std::invalid_argument("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return out;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "crossbar_rows") geometry.crossbar_rows = parse_uint(key, value);
    else if (key == "crossbar_cols") geometry.crossbar_cols = parse_uint(key, value);
    else if (key == "ou_rows") geometry.ou_rows = parse_uint(key, value);
    else if (key == "ou_cols") geometry.ou_cols = parse_uint(key, value);
    else if (key == "direction") direction = parse_direction(value);
    else if (key == "seed") seed = parse_uint(key, value);
    else if (key == "jobs") jobs = static_cast<unsigned>(parse_uint(key, value));
    else if (key == "power_table") power_table = value;
    else if (key == "weight_bits") weight_bits = static_cast<int>(parse_uint(key, value));
    else if (key == "input_bits") input_bits = static_cast<int>(parse_uint(key, value));
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
    geometry.validate();
    if (weight_bits != 8 || input_bits != 8) throw std::invalid_argument("weight_bits and input_bits must be 8");
}

unsigned RunConfig::effective_jobs() const { return jobs == 0 ? default_jobs() : jobs; }

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(n) + ": expected key = value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (cfg.power_table && cfg.power_table->is_relative() && !base_dir.empty()) {
        cfg.power_table = base_dir / *cfg.power_table;
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    return parse_config(in, path.parent_path());
}

}  // namespace oumap
