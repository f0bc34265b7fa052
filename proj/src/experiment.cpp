#include "nlmimo/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <limits>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

namespace nlmimo {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream is(value);
    T out{};
    is >> out;
    if (!is || !(is >> std::ws).eof())
        throw ConfigError("'" + key + "': cannot parse '" + value + "' as a number");
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    const auto v = parse_number<long long>(key, value);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError("'" + key + "': value out of range");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("'" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_int(key, item));
    }
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

std::string path_name(DistortionPath p) { return p == DistortionPath::third_order ? "third_order" : "exact_pa"; }
std::string hermite_name(HermiteMode h) { return h == HermiteMode::shared ? "shared" : "per_antenna"; }
std::string equalizer_name(Equalizer e) {
    return e == Equalizer::zero_forcing ? "zero_forcing" : "deterministic";
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number_integer()) throw ConfigError("'" + prefix + "': arrays must hold integers");
            s += (i ? "," : "") + std::to_string(j[i].get<long long>());
        }
        out.emplace_back(prefix, s);
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else if (j.is_boolean()) {
        out.emplace_back(prefix, j.get<bool>() ? "true" : "false");
    } else if (j.is_number_unsigned()) {
        out.emplace_back(prefix, std::to_string(j.get<std::uint64_t>()));
    } else if (j.is_number_integer()) {
        out.emplace_back(prefix, std::to_string(j.get<long long>()));
    } else if (j.is_number_float()) {
        out.emplace_back(prefix, format_double(j.get<double>()));
    } else {
        throw ConfigError("'" + prefix + "': unsupported JSON value");
    }
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace

std::vector<int> ExperimentSpec::sweep_values() const {
    if (!values.empty()) return values;
    switch (axis) {
        case SweepAxis::L: return {base.L};
        case SweepAxis::tau_max: return {base.tau_max};
        case SweepAxis::M: return {base.M};
    }
    return {};
}

std::vector<Diagnostic> ExperimentSpec::validate() const {
    std::vector<Diagnostic> out;
    if (name.empty()) out.push_back({"name", "name must not be empty"});
    for (int v : values)
        if (v <= 0) out.push_back({"sweep.values", "sweep values must be positive (got " + std::to_string(v) + ")"});

    auto merge = [&out](const std::vector<Diagnostic>& ds, const std::string& where) {
        for (const auto& d : ds) {
            const bool seen = std::any_of(out.begin(), out.end(), [&](const Diagnostic& o) {
                return o.field == d.field && o.message.rfind(d.message, 0) == 0;
            });
            if (!seen) out.push_back({d.field, d.message + where});
        }
    };
    merge(base.validate(), "");
    for (int v : values)
        if (v > 0) merge(with_axis_value(base, axis, v).validate(), " (at " + to_string(axis) + "=" + std::to_string(v) + ")");

    if (!emit_psd && !emit_evm) out.push_back({"emit", "at least one of emit_psd, emit_evm must be set"});
    if (mc.threads < 0) out.push_back({"mc.threads", "mc.threads must be >= 0"});
    if (mc.fit_samples < 10'000) out.push_back({"mc.fit_samples", "mc.fit_samples must be >= 10000"});
    if (mc.per_antenna_fit_samples < 10'000)
        out.push_back({"mc.per_antenna_fit_samples", "mc.per_antenna_fit_samples must be >= 10000"});

    if (outputs.empty()) {
        out.push_back({"outputs", "outputs must name a directory"});
    } else {
        std::error_code ec;
        if (fs::exists(outputs, ec) && !fs::is_directory(outputs, ec))
            out.push_back({"outputs", "outputs exists and is not a directory"});
    }
    return out;
}

std::vector<std::string> preset_names() {
    return {"fig1a", "fig1a-m1000", "fig1b", "fig2a", "fig2b"};
}

ExperimentSpec preset(const std::string& name) {
    ExperimentSpec s;
    s.name = name;
    s.outputs = fs::path("out") / name;
    s.base = LinkConfig{};  // M=100, Ns=1024, mu=4, 64-QAM, Rapp(1, 1, 2), 8 dB IBO
    if (name == "fig1a" || name == "fig1a-m1000") {
        s.base.M = name == "fig1a" ? 100 : 1000;
        s.base.tau_max = 100;
        s.axis = SweepAxis::L;
        s.values = {1, 5, 20};
        s.emit_evm = false;
    } else if (name == "fig1b") {
        s.base.L = 20;
        s.axis = SweepAxis::tau_max;
        s.values = {20, 50, 100, 200, 400};
        s.emit_evm = false;
    } else if (name == "fig2a") {
        s.base.tau_max = 100;
        s.axis = SweepAxis::L;
        s.values = {1, 2, 5, 10, 20};
        s.emit_psd = false;
    } else if (name == "fig2b") {
        s.base.L = 20;
        s.axis = SweepAxis::tau_max;
        s.values = {20, 50, 100, 200, 400};
        s.emit_psd = false;
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += " " + n;
        throw ConfigError("unknown preset '" + name + "' (known:" + known + ")");
    }
    return s;
}

void apply_setting(ExperimentSpec& spec, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    LinkConfig& c = spec.base;

    if (key == "preset") spec = preset(value);
    else if (key == "name") spec.name = value;
    else if (key == "outputs") spec.outputs = value;
    else if (key == "M") c.M = parse_int(key, value);
    else if (key == "Ns") c.Ns = parse_int(key, value);
    else if (key == "mu") c.mu = parse_int(key, value);
    else if (key == "L") c.L = parse_int(key, value);
    else if (key == "tau_max") c.tau_max = parse_int(key, value);
    else if (key == "qam_order") c.qam_order = parse_int(key, value);
    else if (key == "pa.nu") c.pa.nu = parse_number<double>(key, value);
    else if (key == "pa.r_o") c.pa.r_o = parse_number<double>(key, value);
    else if (key == "pa.p") c.pa.p = parse_number<double>(key, value);
    else if (key == "ibo_db") c.ibo_db = parse_number<double>(key, value);
    else if (key == "trials") c.trials = parse_int(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "sweep.axis") spec.axis = parse_sweep_axis(value);
    else if (key == "sweep.values") spec.values = parse_int_list(key, value);
    else if (key == "emit_psd") spec.emit_psd = parse_bool(key, value);
    else if (key == "emit_evm") spec.emit_evm = parse_bool(key, value);
    else if (key == "run_mc") spec.run_mc = parse_bool(key, value);
    else if (key == "mc.threads") spec.mc.threads = parse_int(key, value);
    else if (key == "mc.fit_samples") spec.mc.fit_samples = parse_number<std::size_t>(key, value);
    else if (key == "mc.per_antenna_fit_samples") spec.mc.per_antenna_fit_samples = parse_number<std::size_t>(key, value);
    else if (key == "mc.path") {
        if (value == "third_order") spec.mc.path = DistortionPath::third_order;
        else if (value == "exact_pa") spec.mc.path = DistortionPath::exact_pa;
        else throw ConfigError("'mc.path': expected third_order or exact_pa");
    } else if (key == "mc.hermite") {
        if (value == "shared") spec.mc.hermite = HermiteMode::shared;
        else if (value == "per_antenna") spec.mc.hermite = HermiteMode::per_antenna;
        else throw ConfigError("'mc.hermite': expected shared or per_antenna");
    } else if (key == "mc.equalizer") {
        if (value == "zero_forcing") spec.mc.equalizer = Equalizer::zero_forcing;
        else if (value == "deterministic") spec.mc.equalizer = Equalizer::deterministic;
        else throw ConfigError("'mc.equalizer': expected zero_forcing or deterministic");
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void apply_key_value(ExperimentSpec& spec, std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(spec, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_json(ExperimentSpec& spec, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("JSON config must be an object");
    std::vector<std::pair<std::string, std::string>> kv;
    // A preset has to land first so that the remaining keys override it.
    if (j.contains("preset")) {
        apply_setting(spec, "preset", j.at("preset").get<std::string>());
        j.erase("preset");
    }
    flatten(j, "", kv);
    for (const auto& [k, v] : kv) apply_setting(spec, k, v);
}

void apply_config_file(ExperimentSpec& spec, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        apply_json(spec, text);
    } else {
        std::istringstream is(text);
        apply_key_value(spec, is);
    }
}

std::string canonical_text(const ExperimentSpec& s) {
    std::map<std::string, std::string> kv{
        {"name", s.name},
        {"M", std::to_string(s.base.M)},
        {"Ns", std::to_string(s.base.Ns)},
        {"mu", std::to_string(s.base.mu)},
        {"L", std::to_string(s.base.L)},
        {"tau_max", std::to_string(s.base.tau_max)},
        {"qam_order", std::to_string(s.base.qam_order)},
        {"pa.nu", format_double(s.base.pa.nu)},
        {"pa.r_o", format_double(s.base.pa.r_o)},
        {"pa.p", format_double(s.base.pa.p)},
        {"ibo_db", format_double(s.base.ibo_db)},
        {"trials", std::to_string(s.base.trials)},
        {"seed", std::to_string(s.base.seed)},
        {"sweep.axis", to_string(s.axis)},
        {"sweep.values", join(s.sweep_values())},
        {"emit_psd", s.emit_psd ? "true" : "false"},
        {"emit_evm", s.emit_evm ? "true" : "false"},
        {"run_mc", s.run_mc ? "true" : "false"},
        {"mc.path", path_name(s.mc.path)},
        {"mc.hermite", hermite_name(s.mc.hermite)},
        {"mc.equalizer", equalizer_name(s.mc.equalizer)},
        {"mc.fit_samples", std::to_string(s.mc.fit_samples)},
        {"mc.per_antenna_fit_samples", std::to_string(s.mc.per_antenna_fit_samples)},
    };
    // Thread count and output directory do not change results.
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a(const std::string& data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t config_hash(const ExperimentSpec& spec) { return fnv1a(canonical_text(spec)); }

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

RunReport run_experiment(const ExperimentSpec& spec) {
    const auto diags = spec.validate();
    if (!diags.empty()) {
        std::string msg = "invalid experiment spec:";
        for (const auto& d : diags) msg += "\n  " + d.field + ": " + d.message;
        throw ConfigError(msg);
    }
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.result = sweep(spec.base, spec.axis, spec.sweep_values(), spec.mc, spec.run_mc);

    fs::create_directories(spec.outputs);
    if (spec.emit_psd) {
        std::ostringstream os;
        write_psd_csv(os, rep.result);
        rep.written.push_back(spec.outputs / "psd.csv");
        write_file_atomic(rep.written.back(), os.str());
    }
    if (spec.emit_evm) {
        std::ostringstream os;
        write_evm_csv(os, rep.result);
        rep.written.push_back(spec.outputs / "evm.csv");
        write_file_atomic(rep.written.back(), os.str());
    }
    rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json meta;
    meta["name"] = spec.name;
    meta["config_hash"] = hex64(config_hash(spec));
    meta["seed"] = spec.base.seed;
    std::map<std::string, std::string> cfg;
    std::istringstream canon(canonical_text(spec));
    for (std::string line; std::getline(canon, line);) {
        const auto eq = line.find('=');
        cfg[line.substr(0, eq)] = line.substr(eq + 1);
    }
    meta["config"] = cfg;
    meta["runtime_s"] = rep.runtime_s;
    json points = json::array();
    for (const auto& p : rep.result.points) {
        json jp;
        jp["sweep_value"] = p.value;
        jp["hermite"] = p.models.hermite;
        jp["reference_power"] = p.models.reference_power;
        jp["alpha1"] = complex_json(p.analytic.alpha1);
        jp["alpha3_normalized"] = complex_json(p.analytic.alpha3);
        jp["trials"] = p.mc.trials_used;
        if (p.mc.trials_used > 0) {
            jp["mc_normalization"] = p.mc.normalization;
            jp["mc_cross_residual"] = p.mc.cross_residual;
            jp["mc_alpha1_mean"] = complex_json(p.mc.alpha1_mean);
            jp["mc_alpha3_mean"] = complex_json(p.mc.alpha3_mean);
        }
        jp["runtime_s"] = p.runtime_s;
        points.push_back(std::move(jp));
    }
    meta["points"] = std::move(points);
    rep.written.push_back(spec.outputs / "metadata.json");
    write_file_atomic(rep.written.back(), meta.dump(2) + "\n");
    return rep;
}

}  // namespace nlmimo
