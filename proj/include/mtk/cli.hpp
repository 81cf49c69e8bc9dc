#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "mtk/kurihara.hpp"
#include "mtk/mazurtate.hpp"

namespace mtk {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

struct JobConfig {
    NewformSource form = CurveModel{};
    i64 p = 0;
    int r = 1;
    std::optional<int> branch;  // unset means every branch 0..p-2
    i64 prime_bound = 1000;
    int max_factors = 2;
    i64 budget = 50;
    int n_max = 3;
    int precision = 4;  // p-adic digits for the stabilized theta ring
    std::string cache_path;
    std::map<i64, i64> eta_overrides;
    std::string format = "json";
    std::uint64_t seed = 0;
    int jobs = 1;
    bool ideal = false;
    std::string attestation;
};

// Throws ConfigError naming the offending field.
void validate(const JobConfig& cfg);

nlohmann::json to_json(const JobConfig& cfg);
JobConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KuriharaCertificate& cert);
KuriharaCertificate kurihara_from_json(const nlohmann::json& j);

// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

// Persistent a_l table for one normalized symbol.  The file carries the
// symbol fingerprint, the artifact version and an FNV-1a checksum of the data
// lines; any disagreement on reload is fatal.
class ApCache {
public:
    ApCache(std::string fingerprint, std::string version = kArtifactVersion);

    const std::string& fingerprint() const { return fingerprint_; }
    const std::map<i64, i64>& values() const { return values_; }
    std::optional<i64> find(i64 ell) const;
    void insert(i64 ell, i64 a_ell);

    void write(const std::string& path) const;
    static ApCache read(const std::string& path, const std::string& expected_fingerprint,
                        const std::string& expected_version = kArtifactVersion);

    bool operator==(const ApCache& o) const = default;

private:
    std::string fingerprint_;
    std::string version_;
    std::map<i64, i64> values_;
};

struct AnalyzeResult {
    nlohmann::json certificate;
    int exit_code = 1;
};

// Full pipeline: resolve the form, search Kurihara numbers per branch, sweep
// for mu = 0 witnesses, read lambda/mu, and optionally list ideal generators.
// Errors are rethrown with the failing stage prefixed.
AnalyzeResult run_analyze(const JobConfig& cfg);

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitNoWitness = 1, kExitConfig = 2, kExitInternal = 3 };

int exit_code_for(const Error& e);

// The `mtk` command surface; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtk
