#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nlmimo/experiment.hpp"

using namespace nlmimo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("nlmimo_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has_diag(const std::vector<Diagnostic>& d, const std::string& text) {
    return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.message.find(text) != std::string::npos; });
}

ExperimentSpec tiny(const fs::path& out) {
    ExperimentSpec s;
    s.name = "tiny";
    s.base.M = 8;
    s.base.Ns = 32;
    s.base.mu = 2;
    s.base.L = 2;
    s.base.tau_max = 8;
    s.base.trials = 3;
    s.axis = SweepAxis::L;
    s.values = {1, 2};
    s.outputs = out;
    s.mc.fit_samples = 20'000;
    return s;
}

std::set<std::string> column_values(const std::string& csv, std::size_t col) {
    std::set<std::string> out;
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string cell;
        for (std::size_t i = 0; i <= col; ++i) std::getline(ls, cell, ',');
        out.insert(cell);
    }
    return out;
}

}  // namespace

TEST_CASE("presets encode the published parameter sets") {
    for (const auto& name : preset_names()) {
        const auto s = preset(name);
        CHECK(s.validate().empty());
        CHECK(s.base.Ns == 1024);
        CHECK(s.base.mu == 4);
        CHECK(s.base.qam_order == 64);
        CHECK((s.base.M == 100 || s.base.M == 1000));
        CHECK(s.base.pa.p == 2.0);
        CHECK(s.base.ibo_db == 8.0);
    }
    const auto a = preset("fig1a");
    CHECK(a.axis == SweepAxis::L);
    CHECK(a.values == std::vector<int>{1, 5, 20});
    CHECK(a.base.tau_max == 100);
    CHECK(a.base.M == 100);
    CHECK(a.emit_psd);
    const auto b = preset("fig2b");
    CHECK(b.axis == SweepAxis::tau_max);
    CHECK(b.base.L == 20);
    CHECK(b.emit_evm);
    CHECK(preset("fig1a-m1000").base.M == 1000);
    CHECK_THROWS_AS((void)preset("fig9"), ConfigError);
}

TEST_CASE("validate: odd Ns, zero delay spread, valid spec") {
    ExperimentSpec s;
    CHECK(s.validate().empty());
    s.base.Ns = 1023;
    CHECK(has_diag(s.validate(), "Ns must be even"));
    s.base.Ns = 1024;
    s.base.tau_max = 0;
    CHECK(has_diag(s.validate(), "tau_max must be >= 1"));
}

TEST_CASE("validate: sweep values are checked at every point") {
    ExperimentSpec s;
    s.axis = SweepAxis::tau_max;
    s.values = {10, -3, 5000};
    const auto d = s.validate();
    CHECK(has_diag(d, "sweep values must be positive"));
    CHECK(has_diag(d, "tau_max must not exceed"));
    s.values = {10};
    s.emit_psd = s.emit_evm = false;
    CHECK(has_diag(s.validate(), "emit_psd"));
}

TEST_CASE("validate: outputs must not be a regular file") {
    const auto p = scratch("file");
    std::ofstream(p) << "x";
    ExperimentSpec s;
    s.outputs = p;
    CHECK(has_diag(s.validate(), "not a directory"));
    fs::remove(p);
}

TEST_CASE("key = value config") {
    ExperimentSpec s;
    std::istringstream in(R"(# comment
preset = fig2a
L = 7
pa.p = 3.5
seed = 18446744073709551615
sweep.values = 1, 3 ,9
mc.path = exact_pa
run_mc = false
)");
    apply_key_value(s, in);
    CHECK(s.name == "fig2a");
    CHECK(s.base.L == 7);
    CHECK(s.base.pa.p == 3.5);
    CHECK(s.base.seed == 18446744073709551615ull);
    CHECK(s.values == std::vector<int>{1, 3, 9});
    CHECK(s.mc.path == DistortionPath::exact_pa);
    CHECK_FALSE(s.run_mc);
}

TEST_CASE("key = value errors name the problem") {
    ExperimentSpec s;
    CHECK_THROWS_WITH_AS(apply_setting(s, "Lx", "3"), doctest::Contains("unknown config key"), ConfigError);
    CHECK_THROWS_WITH_AS(apply_setting(s, "L", "3.5"), doctest::Contains("cannot parse"), ConfigError);
    CHECK_THROWS_AS(apply_setting(s, "emit_psd", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_setting(s, "mc.hermite", "global"), ConfigError);
    std::istringstream bad("L 3\n");
    CHECK_THROWS_WITH_AS(apply_key_value(s, bad), doctest::Contains("line 1"), ConfigError);
}

TEST_CASE("JSON config, nested and flat") {
    ExperimentSpec s;
    apply_json(s, R"({"preset": "fig1b", "M": 64, "pa": {"r_o": 2.0}, "sweep": {"values": [10, 20]},
                     "mc": {"hermite": "per_antenna"}, "emit_evm": true})");
    CHECK(s.name == "fig1b");
    CHECK(s.base.M == 64);
    CHECK(s.base.pa.r_o == 2.0);
    CHECK(s.values == std::vector<int>{10, 20});
    CHECK(s.mc.hermite == HermiteMode::per_antenna);
    CHECK(s.emit_evm);
    CHECK_THROWS_AS(apply_json(s, "[1,2]"), ConfigError);
    CHECK_THROWS_AS(apply_json(s, "{bad"), ConfigError);
}

TEST_CASE("config files are sniffed as JSON or key = value") {
    const auto dir = scratch("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "a.cfg") << "L = 4\n";
    std::ofstream(dir / "b.cfg") << "  {\"L\": 6}";
    ExperimentSpec s;
    apply_config_file(s, dir / "a.cfg");
    CHECK(s.base.L == 4);
    apply_config_file(s, dir / "b.cfg");
    CHECK(s.base.L == 6);
    CHECK_THROWS_AS(apply_config_file(s, dir / "missing.cfg"), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("config hash tracks results-relevant fields only") {
    ExperimentSpec a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.mc.threads = 7;
    b.outputs = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.base.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("atomic write leaves no temporary behind") {
    const auto dir = scratch("atomic");
    fs::create_directories(dir);
    write_file_atomic(dir / "x.txt", "one");
    write_file_atomic(dir / "x.txt", "two");
    CHECK(slurp(dir / "x.txt") == "two");
    CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("run writes CSVs and metadata; same seed gives identical bytes") {
    const auto dir = scratch("run");
    auto spec = tiny(dir / "a");
    const auto rep = run_experiment(spec);
    CHECK(rep.written.size() == 3);
    spec.outputs = dir / "b";
    spec.mc.threads = 3;
    (void)run_experiment(spec);
    for (const char* f : {"psd.csv", "evm.csv"}) CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));

    const auto meta = nlohmann::json::parse(slurp(dir / "a" / "metadata.json"));
    CHECK(meta.at("seed").get<std::uint64_t>() == spec.base.seed);
    CHECK(meta.at("config_hash").get<std::string>().size() == 16);
    CHECK(meta.at("points").size() == 2);
    CHECK(meta.at("points")[0].contains("hermite"));
    CHECK(meta.at("points")[0].contains("runtime_s"));

    spec.outputs = dir / "c";
    spec.base.seed = 99;
    (void)run_experiment(spec);
    CHECK(slurp(dir / "a" / "psd.csv") != slurp(dir / "c" / "psd.csv"));
    fs::remove_all(dir);
}

TEST_CASE("invalid spec is rejected before anything is written") {
    const auto dir = scratch("bad");
    auto spec = tiny(dir);
    spec.base.Ns = 31;
    CHECK_THROWS_AS((void)run_experiment(spec), ConfigError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("fig1a and fig2b presets produce the promised artifacts") {
    const auto dir = scratch("presets");
    auto a = preset("fig1a");
    a.base.trials = 1;
    a.mc.fit_samples = 20'000;
    a.outputs = dir / "fig1a";
    (void)run_experiment(a);
    CHECK(fs::exists(dir / "fig1a" / "psd.csv"));
    CHECK_FALSE(fs::exists(dir / "fig1a" / "evm.csv"));
    CHECK(column_values(slurp(dir / "fig1a" / "psd.csv"), 0) == std::set<std::string>{"1", "5", "20"});

    auto b = preset("fig2b");
    b.run_mc = false;
    b.mc.fit_samples = 20'000;
    b.outputs = dir / "fig2b";
    (void)run_experiment(b);
    const auto evm = slurp(dir / "fig2b" / "evm.csv");
    CHECK(column_values(evm, 0) == std::set<std::string>{"20", "50", "100", "200", "400"});
    fs::remove_all(dir);
}

TEST_CASE("selftest passes") {
    std::ostringstream log;
    CHECK(run_selftest(log));
    CHECK(log.str().find("FAIL") == std::string::npos);
}
