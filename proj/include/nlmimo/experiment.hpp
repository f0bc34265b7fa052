#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlmimo/config.hpp"
#include "nlmimo/mc.hpp"

namespace nlmimo {

/// A named sweep over one LinkConfig field plus where and what to write.
struct ExperimentSpec {
    std::string name = "custom";
    LinkConfig base;
    SweepAxis axis = SweepAxis::L;
    std::vector<int> values;  // empty: a single point at the base value
    std::filesystem::path outputs = "out";
    bool emit_psd = true;
    bool emit_evm = true;
    bool run_mc = true;
    McOptions mc;

    /// Sweep values, falling back to the base value of the axis.
    [[nodiscard]] std::vector<int> sweep_values() const;
    /// Every problem with the spec, including those of each swept LinkConfig.
    [[nodiscard]] std::vector<Diagnostic> validate() const;
};

[[nodiscard]] std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
[[nodiscard]] ExperimentSpec preset(const std::string& name);

/// Sets one field from its textual form. Keys are the LinkConfig field names
/// (pa.nu, pa.r_o, pa.p for the amplifier) plus name, outputs, sweep.axis,
/// sweep.values (comma separated), emit_psd, emit_evm, run_mc, mc.path,
/// mc.hermite, mc.equalizer, mc.threads, mc.fit_samples and
/// mc.per_antenna_fit_samples. `preset` replaces the whole spec.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
void apply_key_value(ExperimentSpec& spec, std::istream& in);
/// A JSON object; nested objects map to dotted keys, arrays to comma lists.
void apply_json(ExperimentSpec& spec, const std::string& text);
/// Reads a config file, JSON if its first non-blank character is '{'.
void apply_config_file(ExperimentSpec& spec, const std::filesystem::path& path);

/// Sorted key=value lines describing every field; the hash input.
[[nodiscard]] std::string canonical_text(const ExperimentSpec& spec);
/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a(const std::string& data) noexcept;
[[nodiscard]] std::uint64_t config_hash(const ExperimentSpec& spec);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct RunReport {
    SweepResult result;
    std::vector<std::filesystem::path> written;
    double runtime_s = 0.0;
};

/// Validates, sweeps, and writes psd.csv / evm.csv / metadata.json into
/// spec.outputs. Throws ConfigError when the spec is invalid.
RunReport run_experiment(const ExperimentSpec& spec);

/// Small-instance oracle checks; one PASS/FAIL line each. True when all pass.
bool run_selftest(std::ostream& log);

}  // namespace nlmimo
