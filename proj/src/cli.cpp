#include "mtk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace mtk {

using nlohmann::json;

namespace {

std::string str(i64 v) { return std::to_string(v); }

i64 num(const json& j, const char* what)
{
    try {
        if (j.is_string()) {
            std::size_t used = 0;
            const std::string s = j.get<std::string>();
            i64 v = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        }
        if (j.is_number_integer()) return j.get<i64>();
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ConfigError, std::string("field '") + what + "' must be an integer");
}

i64 field(const json& j, const char* key, i64 fallback)
{
    auto it = j.find(key);
    return it == j.end() ? fallback : num(*it, key);
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

i64 level_of(const NewformSource& src)
{
    if (auto* c = std::get_if<CurveModel>(&src)) return c->conductor;
    return std::get<SymbolEigenform>(src).level;
}

int weight_of(const NewformSource& src)
{
    if (std::holds_alternative<CurveModel>(src)) return 2;
    return std::get<SymbolEigenform>(src).weight;
}

json form_to_json(const NewformSource& src)
{
    if (auto* c = std::get_if<CurveModel>(&src)) {
        json a = json::array();
        for (i64 v : c->a) a.push_back(str(v));
        return {{"type", "curve"}, {"a", a}, {"conductor", str(c->conductor)}};
    }
    const auto& s = std::get<SymbolEigenform>(src);
    json pins = json::object();
    for (auto [ell, v] : s.pins) pins[str(ell)] = str(v);
    return {{"type", "symbol"}, {"level", str(s.level)}, {"weight", str(s.weight)}, {"bound", str(s.bound)},
            {"pins", pins}};
}

NewformSource form_from_json(const json& j)
{
    const std::string type = j.value("type", "");
    if (type == "curve") {
        CurveModel c;
        const json& a = j.at("a");
        if (!a.is_array() || a.size() != 5) config_error("curve needs five coefficients");
        for (std::size_t t = 0; t < 5; ++t) c.a[t] = num(a[t], "a");
        c.conductor = field(j, "conductor", 0);
        return c;
    }
    if (type == "symbol") {
        SymbolEigenform s;
        s.level = field(j, "level", 1);
        s.weight = static_cast<int>(field(j, "weight", 2));
        s.bound = field(j, "bound", 100);
        if (auto it = j.find("pins"); it != j.end())
            for (auto& [k, v] : it->items()) s.pins[num(json(k), "pins")] = num(v, "pins");
        return s;
    }
    config_error("form type must be 'curve' or 'symbol'");
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != ' ' && ch != '[' && ch != ']') {
            cur.push_back(ch);
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

i64 parse_int(const std::string& s, const std::string& what) { return num(json(s), what.c_str()); }

std::pair<i64, i64> parse_pair(const std::string& s, const std::string& what)
{
    auto eq = s.find('=');
    if (eq == std::string::npos) config_error(what + " entries look like l=g, got '" + s + "'");
    return {parse_int(s.substr(0, eq), what), parse_int(s.substr(eq + 1), what)};
}

// Rethrows with the pipeline stage named.
template <class F>
auto stage(const char* name, F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        std::string msg = e.what();
        const std::string tag = std::string(to_string(e.code())) + ": ";
        if (msg.rfind(tag, 0) == 0) msg.erase(0, tag.size());
        throw Error(e.code(), std::string("stage ") + name + ": " + msg);
    }
}

json reading_to_json(const IwasawaReading& rd)
{
    json vals = json::array();
    for (const auto& v : rd.valuations) vals.push_back(v ? json(str(*v)) : json(nullptr));
    return {{"mu_zero", rd.mu_zero},
            {"lambda", rd.lambda ? json(str(*rd.lambda)) : json(nullptr)},
            {"stable", rd.stable},
            {"valuations", vals}};
}

json group_ring_to_json(const IntGroupRing& x)
{
    json coeffs = json::object();
    for (i64 a : x.group().units()) coeffs[str(a)] = x.coeff(a).str();
    return {{"modulus", str(x.modulus())}, {"coefficients", coeffs}};
}

std::vector<int> branches_of(const JobConfig& cfg)
{
    std::vector<int> out;
    if (cfg.branch) {
        out.push_back(*cfg.branch);
    } else {
        for (int i = 0; i <= cfg.p - 2; ++i) out.push_back(i);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

void validate(const JobConfig& cfg)
{
    const i64 level = level_of(cfg.form);
    const int k = weight_of(cfg.form);
    if (level < 1) config_error("conductor/level must be positive");
    if (k < 2) config_error("weight must be at least 2");
    if (cfg.p < 3 || !is_prime(cfg.p)) config_error("p must be an odd prime");
    if (level % cfg.p == 0) config_error("p must not divide the level");
    if (cfg.r < 1 || cfg.r > k - 1) config_error("r must lie in [1, k-1]");
    if (cfg.branch && (*cfg.branch < 0 || *cfg.branch > cfg.p - 2)) config_error("branch must lie in [0, p-2]");
    if (cfg.prime_bound < 0 || cfg.prime_bound > 10'000'000) config_error("prime bound out of range");
    if (cfg.max_factors < 0 || cfg.max_factors > 6) config_error("max factors must lie in [0, 6]");
    if (cfg.budget < 0) config_error("budget must be nonnegative");
    if (cfg.n_max < 1 || cfg.n_max > 8) config_error("n_max must lie in [1, 8]");
    if (cfg.precision < 1 || cfg.precision > 12) config_error("precision must lie in [1, 12]");
    if (cfg.format != "json" && cfg.format != "csv") config_error("format must be json or csv");
    if (cfg.jobs < 1 || cfg.jobs > 256) config_error("jobs must lie in [1, 256]");
    for (auto [ell, eta] : cfg.eta_overrides)
        if (!is_prime(ell) || !is_primitive_root(eta, ell))
            config_error(str(eta) + " is not a primitive root mod " + str(ell));
}

json to_json(const JobConfig& cfg)
{
    json eta = json::object();
    for (auto [ell, g] : cfg.eta_overrides) eta[str(ell)] = str(g);
    // the worker count is left out: results do not depend on it
    return {{"form", form_to_json(cfg.form)},
            {"p", str(cfg.p)},
            {"r", str(cfg.r)},
            {"branch", cfg.branch ? json(str(*cfg.branch)) : json("all")},
            {"prime_bound", str(cfg.prime_bound)},
            {"max_factors", str(cfg.max_factors)},
            {"budget", str(cfg.budget)},
            {"n_max", str(cfg.n_max)},
            {"precision", str(cfg.precision)},
            {"cache", cfg.cache_path},
            {"eta", eta},
            {"format", cfg.format},
            {"seed", std::to_string(cfg.seed)},
            {"ideal", cfg.ideal},
            {"attestation", cfg.attestation}};
}

JobConfig config_from_json(const json& j)
{
    if (!j.is_object()) config_error("config must be a JSON object");
    JobConfig cfg;
    if (auto it = j.find("form"); it != j.end()) cfg.form = form_from_json(*it);
    cfg.p = field(j, "p", cfg.p);
    cfg.r = static_cast<int>(field(j, "r", cfg.r));
    if (auto it = j.find("branch"); it != j.end() && !(it->is_string() && *it == "all"))
        cfg.branch = static_cast<int>(num(*it, "branch"));
    cfg.prime_bound = field(j, "prime_bound", cfg.prime_bound);
    cfg.max_factors = static_cast<int>(field(j, "max_factors", cfg.max_factors));
    cfg.budget = field(j, "budget", cfg.budget);
    cfg.n_max = static_cast<int>(field(j, "n_max", cfg.n_max));
    cfg.precision = static_cast<int>(field(j, "precision", cfg.precision));
    cfg.cache_path = j.value("cache", cfg.cache_path);
    if (auto it = j.find("eta"); it != j.end())
        for (auto& [k, v] : it->items()) cfg.eta_overrides[num(json(k), "eta")] = num(v, "eta");
    cfg.format = j.value("format", cfg.format);
    if (auto it = j.find("seed"); it != j.end()) cfg.seed = static_cast<std::uint64_t>(num(*it, "seed"));
    cfg.jobs = static_cast<int>(field(j, "jobs", cfg.jobs));
    cfg.ideal = j.value("ideal", cfg.ideal);
    cfg.attestation = j.value("attestation", cfg.attestation);
    return cfg;
}

json to_json(const KuriharaCertificate& cert)
{
    json factors = json::array();
    for (const auto& f : cert.factors) factors.push_back({{"ell", str(f.ell)}, {"eta", str(f.eta)}});
    return {{"form", cert.form},
            {"fingerprint", cert.fingerprint},
            {"p", str(cert.p)},
            {"r", str(cert.r)},
            {"branch", str(cert.branch)},
            {"m", str(cert.m)},
            {"factors", factors},
            {"value", str(cert.value)},
            {"euler_factor", cert.euler_factor ? json(str(*cert.euler_factor)) : json(nullptr)},
            {"attestation", cert.attestation},
            {"seed", cert.seed ? json(std::to_string(*cert.seed)) : json(nullptr)}};
}

KuriharaCertificate kurihara_from_json(const json& j)
{
    KuriharaCertificate c;
    try {
        c.form = j.at("form").get<std::string>();
        c.fingerprint = j.at("fingerprint").get<std::string>();
        c.p = num(j.at("p"), "p");
        c.r = static_cast<int>(num(j.at("r"), "r"));
        c.branch = static_cast<int>(num(j.at("branch"), "branch"));
        c.m = num(j.at("m"), "m");
        for (const auto& f : j.at("factors")) c.factors.push_back({num(f.at("ell"), "ell"), num(f.at("eta"), "eta")});
        c.value = num(j.at("value"), "value");
        if (auto it = j.find("euler_factor"); it != j.end() && !it->is_null()) c.euler_factor = num(*it, "euler_factor");
        c.attestation = j.value("attestation", "");
        if (auto it = j.find("seed"); it != j.end() && !it->is_null())
            c.seed = static_cast<std::uint64_t>(num(*it, "seed"));
    } catch (const json::exception& e) {
        config_error(std::string("malformed Kurihara certificate: ") + e.what());
    }
    return c;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// a_l cache

ApCache::ApCache(std::string fingerprint, std::string version)
    : fingerprint_(std::move(fingerprint)), version_(std::move(version))
{
}

std::optional<i64> ApCache::find(i64 ell) const
{
    auto it = values_.find(ell);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void ApCache::insert(i64 ell, i64 a_ell)
{
    auto [it, fresh] = values_.emplace(ell, a_ell);
    if (!fresh && it->second != a_ell)
        throw Error(ErrorCode::InvariantViolation, "conflicting a_l for l=" + str(ell));
}

void ApCache::write(const std::string& path) const
{
    std::string body;
    for (auto [ell, a] : values_) body += str(ell) + "," + str(a) + "\n";
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IoError, "cannot write " + tmp);
        f << "# mtk-ap-cache v1\n# fingerprint " << fingerprint_ << "\n# version " << version_ << "\n"
          << body << "# checksum " << fnv1a_hex(body) << "\n";
        if (!f) throw Error(ErrorCode::IoError, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot move cache into place: " + ec.message());
}

ApCache ApCache::read(const std::string& path, const std::string& expected_fingerprint,
                      const std::string& expected_version)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(f, line);) lines.push_back(line);
    auto corrupt = [&](const std::string& why) { throw Error(ErrorCode::CorruptCache, path + ": " + why); };
    if (lines.size() < 4 || lines[0] != "# mtk-ap-cache v1") corrupt("missing header");
    const std::string fp_tag = "# fingerprint ", ver_tag = "# version ", sum_tag = "# checksum ";
    if (lines[1].rfind(fp_tag, 0) != 0 || lines[2].rfind(ver_tag, 0) != 0 || lines.back().rfind(sum_tag, 0) != 0)
        corrupt("malformed header or trailer");
    const std::string fp = lines[1].substr(fp_tag.size());
    const std::string ver = lines[2].substr(ver_tag.size());
    if (fp != expected_fingerprint) corrupt("fingerprint " + fp + " does not match " + expected_fingerprint);
    if (ver != expected_version) corrupt("written by version " + ver);

    ApCache out(fp, ver);
    std::string body;
    i64 last = 0;
    for (std::size_t t = 3; t + 1 < lines.size(); ++t) {
        const std::string& line = lines[t];
        body += line + "\n";
        auto comma = line.find(',');
        if (comma == std::string::npos) corrupt("bad line '" + line + "'");
        i64 ell = 0, a = 0;
        try {
            std::size_t u1 = 0, u2 = 0;
            ell = std::stoll(line.substr(0, comma), &u1);
            a = std::stoll(line.substr(comma + 1), &u2);
            if (u1 != comma || u2 != line.size() - comma - 1) throw std::invalid_argument(line);
        } catch (const std::exception&) {
            corrupt("bad line '" + line + "'");
        }
        if (ell <= last) corrupt("entries are not strictly increasing");
        last = ell;
        out.values_[ell] = a;
    }
    if (lines.back().substr(sum_tag.size()) != fnv1a_hex(body)) corrupt("checksum mismatch");
    return out;
}

// ---------------------------------------------------------------------------
// analyze

AnalyzeResult run_analyze(const JobConfig& cfg)
{
    stage("config", [&] {
        validate(cfg);
        return 0;
    });
    auto form = stage("eigenform", [&] { return Newform::resolve(cfg.form); });
    const auto& nes = form->symbol();

    AnalyzeResult res;
    json& cert = res.certificate;
    cert["schema"] = kSchemaVersion;
    cert["version"] = kArtifactVersion;
    cert["config"] = to_json(cfg);
    cert["seed"] = std::to_string(cfg.seed);
    cert["form"] = {{"id", form->id()},
                    {"fingerprint", nes.fingerprint()},
                    {"level", str(nes.level())},
                    {"weight", str(nes.weight())}};
    if (cfg.budget == 0) {
        res.exit_code = kExitNoWitness;
        return res;
    }

    // a_l, served from the persistent cache when one is configured
    std::optional<ApCache> cache;
    if (!cfg.cache_path.empty()) {
        stage("cache", [&] {
            if (std::filesystem::exists(cfg.cache_path))
                cache = ApCache::read(cfg.cache_path, nes.fingerprint());
            else
                cache.emplace(nes.fingerprint());
            return 0;
        });
    }
    auto a_of = [&](i64 ell) {
        if (cache)
            if (auto hit = cache->find(ell)) return *hit;
        const i64 v = form->eigenvalue(ell);
        if (cache) cache->insert(ell, v);
        return v;
    };
    auto primes = stage("primes", [&] {
        return kolyvagin_primes(a_of, nes.level(), cfg.p, cfg.prime_bound, cfg.eta_overrides);
    });
    if (cache) stage("cache", [&] {
            cache->write(cfg.cache_path);
            return 0;
        });

    SearchStrategy strategy;
    strategy.max_factors = cfg.max_factors;
    strategy.prime_bound = cfg.prime_bound;
    strategy.budget = cfg.budget;
    strategy.jobs = cfg.jobs;

    bool any_witness = false;
    json kur = json::array();
    for (int branch : branches_of(cfg)) {
        auto found = stage("kurihara", [&] { return search_delta(*form, cfg.p, cfg.r, branch, strategy, primes); });
        json entry = {{"branch", str(branch)}};
        if (auto* c = std::get_if<KuriharaCertificate>(&found)) {
            c->attestation = cfg.attestation;
            c->seed = cfg.seed;
            entry["status"] = "witness";
            entry["certificate"] = to_json(*c);
            any_witness = true;
        } else {
            const auto& rep = std::get<ExhaustionReport>(found);
            json tried = json::array();
            for (i64 m : rep.tried) tried.push_back(str(m));
            entry["status"] = "exhausted";
            entry["tried"] = tried;
            entry["skipped"] = str(rep.skipped);
            entry["budget_exhausted"] = rep.budget_exhausted;
        }
        kur.push_back(entry);
    }
    cert["kurihara"] = kur;

    json mu = json::array();
    bool mu_zero = false;
    for (int branch : branches_of(cfg)) {
        auto w = stage("mu", [&] { return mu_witness(nes, cfg.p, branch, cfg.n_max, cfg.r); });
        json entry = {{"branch", str(branch)}};
        if (w) {
            entry["witness"] = {{"n", str(w->n)}, {"exponent", str(w->exponent)}, {"b", str(w->b)},
                                {"value", str(w->value)}};
            mu_zero = true;
        } else {
            entry["witness"] = nullptr;
        }
        mu.push_back(entry);
    }
    cert["mu"] = mu;
    cert["mu_verdict"] = mu_zero ? "mu=0" : "undetermined";

    cert["iwasawa"] = stage("iwasawa", [&]() -> json {
        const i64 a_p = form->eigenvalue(cfg.p);
        if (mod(a_p, cfg.p) != 0) {
            if (cfg.n_max < 2) return {{"mode", "ordinary"}, {"status", "needs n_max >= 2"}};
            ModRing ring(cfg.p, cfg.precision);
            std::vector<TruncPoly> levels;
            i64 alpha = 0;
            for (int n = 0; n < cfg.n_max; ++n) {
                auto st = stabilized_theta(nes, cfg.p, n, ring, cfg.r);
                alpha = st.alpha;
                levels.push_back(st.traced);
            }
            json out = reading_to_json(iwasawa_invariants(levels));
            out["mode"] = "ordinary";
            out["alpha"] = str(alpha);
            return out;
        }
        if (a_p == 0 && cfg.r == 1) {
            auto rep = pollack_check(nes, cfg.p, 0, cfg.n_max - 1);
            json levels = json::array();
            for (const auto& lv : rep.levels)
                levels.push_back({{"n", str(lv.n)},
                                  {"sign", lv.sign > 0 ? "+" : "-"},
                                  {"q", str(lv.q)},
                                  {"valuation", lv.valuation ? json(str(*lv.valuation)) : json(nullptr)},
                                  {"lambda_candidate",
                                   lv.lambda_candidate ? json(str(*lv.lambda_candidate)) : json(nullptr)},
                                  {"divisibility_ok", lv.divisibility_ok}});
            return {{"mode", "pollack"}, {"levels", levels}, {"parity_stable", rep.parity_stable}};
        }
        return {{"mode", "unsupported"}, {"a_p", str(a_p)}};
    });

    if (cfg.ideal) {
        cert["ideal"] = stage("ideal", [&]() -> json {
            if (nes.weight() % 2 != 0) return {{"status", "odd weight"}};
            json gens = json::array();
            for (const auto& g : mt_ideal_generators(nes, cfg.p, cfg.n_max)) gens.push_back(group_ring_to_json(g));
            return {{"generators", gens}};
        });
    }
    res.exit_code = any_witness ? kExitOk : kExitNoWitness;
    return res;
}

int exit_code_for(const Error& e) { return e.code() == ErrorCode::InvariantViolation ? kExitInternal : kExitConfig; }

// ---------------------------------------------------------------------------
// command line

namespace {

struct Flags {
    std::string config_file, curve, pins, branch, out_file, factors, replay_file;
    i64 conductor = 0, level = 0, p = 0, bound = 0, modulus = 0;
    int weight = 0, r = 0, max_factors = 0, n_max = 0, precision = 0, jobs = 0;
    i64 budget = 0;
    std::uint64_t seed = 0;
    std::string cache, attestation;
    std::vector<std::string> eta;
    bool json_out = false, csv_out = false, ideal = false;
};

void add_common(CLI::App& app, Flags& f)
{
    app.add_option("--config", f.config_file, "JSON job configuration");
    app.add_option("--curve", f.curve, "Weierstrass coefficients a1,a2,a3,a4,a6");
    app.add_option("--conductor", f.conductor, "conductor of --curve");
    app.add_option("--level", f.level, "level of a symbol-defined form");
    app.add_option("--weight", f.weight, "weight of a symbol-defined form");
    app.add_option("--pins", f.pins, "eigenvalue pins l=a_l,...");
    app.add_option("--p", f.p, "the prime p");
    app.add_option("--r", f.r, "twist r in [1, k-1]");
    app.add_option("--branch", f.branch, "branch index or 'all'");
    app.add_option("--bound", f.bound, "prime bound");
    app.add_option("--max-factors", f.max_factors, "largest number of Kolyvagin primes in m");
    app.add_option("--budget", f.budget, "number of Kurihara numbers to try per branch");
    app.add_option("--nmax", f.n_max, "top level of the cyclotomic tower");
    app.add_option("--precision", f.precision, "p-adic digits for stabilized theta");
    app.add_option("--cache", f.cache, "a_l cache file");
    app.add_flag("--json", f.json_out, "JSON output (default)");
    app.add_flag("--csv", f.csv_out, "CSV output");
    app.add_option("--eta", f.eta, "primitive root override l=g (repeatable)");
    app.add_option("--seed", f.seed, "determinism seed recorded in certificates");
    app.add_option("--jobs", f.jobs, "worker threads");
    app.add_option("--attestation", f.attestation, "minimal-level attestation text");
    app.add_option("--out", f.out_file, "write the output to this file");
}

JobConfig build_config(CLI::App& app, const Flags& f)
{
    JobConfig cfg;
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--config")) {
        std::ifstream in(f.config_file);
        if (!in) throw Error(ErrorCode::IoError, "cannot read " + f.config_file);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            config_error(std::string("config is not valid JSON: ") + e.what());
        }
        cfg = config_from_json(j);
    }
    if (given("--curve")) {
        auto parts = split(f.curve, ',');
        if (parts.size() != 5) config_error("--curve needs five comma-separated coefficients");
        CurveModel c;
        for (std::size_t t = 0; t < 5; ++t) c.a[t] = parse_int(parts[t], "--curve");
        c.conductor = f.conductor;
        cfg.form = c;
    } else if (given("--level") || given("--weight")) {
        SymbolEigenform s;
        s.level = given("--level") ? f.level : 1;
        s.weight = given("--weight") ? f.weight : 2;
        if (given("--pins"))
            for (const auto& item : split(f.pins, ','))
                if (!item.empty()) s.pins.insert(parse_pair(item, "--pins"));
        cfg.form = s;
    } else if (given("--conductor")) {
        if (auto* c = std::get_if<CurveModel>(&cfg.form)) c->conductor = f.conductor;
    }
    if (given("--p")) cfg.p = f.p;
    if (given("--r")) cfg.r = f.r;
    if (given("--branch")) {
        if (f.branch == "all")
            cfg.branch.reset();
        else
            cfg.branch = static_cast<int>(parse_int(f.branch, "--branch"));
    }
    if (given("--bound")) cfg.prime_bound = f.bound;
    if (given("--max-factors")) cfg.max_factors = f.max_factors;
    if (given("--budget")) cfg.budget = f.budget;
    if (given("--nmax")) cfg.n_max = f.n_max;
    if (given("--precision")) cfg.precision = f.precision;
    if (given("--cache")) cfg.cache_path = f.cache;
    if (f.csv_out) cfg.format = "csv";
    if (f.json_out) cfg.format = "json";
    for (const auto& e : f.eta) cfg.eta_overrides.insert(parse_pair(e, "--eta"));
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--jobs")) cfg.jobs = f.jobs;
    if (given("--attestation")) cfg.attestation = f.attestation;
    return cfg;
}

void emit(const std::string& text, const Flags& f, std::ostream& out)
{
    if (f.out_file.empty()) {
        out << text;
        return;
    }
    std::ofstream file(f.out_file, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::IoError, "cannot write " + f.out_file);
    file << text;
}

std::string csv_analyze(const json& cert)
{
    std::ostringstream os;
    os << "branch,status,m,value\n";
    if (cert.contains("kurihara"))
        for (const auto& e : cert["kurihara"]) {
            os << e["branch"].get<std::string>() << ',' << e["status"].get<std::string>() << ',';
            if (e["status"] == "witness")
                os << e["certificate"]["m"].get<std::string>() << ',' << e["certificate"]["value"].get<std::string>();
            else
                os << ',';
            os << '\n';
        }
    return os.str();
}

int cmd_analyze(const JobConfig& cfg, const Flags& f, std::ostream& out)
{
    auto res = run_analyze(cfg);
    emit(cfg.format == "csv" ? csv_analyze(res.certificate) : canonical_dump(res.certificate), f, out);
    return res.exit_code;
}

int cmd_replay(const JobConfig& base, const Flags& f, std::ostream& out)
{
    std::ifstream in(f.replay_file);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + f.replay_file);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        config_error(std::string("certificate is not valid JSON: ") + e.what());
    }
    JobConfig cfg = base;
    std::vector<KuriharaCertificate> certs;
    if (doc.contains("kurihara")) {
        cfg = config_from_json(doc.at("config"));
        for (const auto& e : doc["kurihara"])
            if (e.value("status", "") == "witness") certs.push_back(kurihara_from_json(e["certificate"]));
    } else {
        certs.push_back(kurihara_from_json(doc));
    }
    auto form = Newform::resolve(cfg.form);
    json results = json::array();
    bool all = true;
    for (const auto& c : certs) {
        const i64 v = replay(c, form->symbol(), cfg.jobs);
        all = all && v == c.value;
        results.push_back({{"m", str(c.m)}, {"branch", str(c.branch)}, {"recorded", str(c.value)},
                           {"recomputed", str(v)}, {"match", v == c.value}});
    }
    emit(canonical_dump({{"replayed", str(static_cast<i64>(certs.size()))}, {"results", results}, {"all_match", all}}),
         f, out);
    return all ? kExitOk : kExitInternal;
}

int cmd_delta(const JobConfig& cfg, const Flags& f, std::ostream& out)
{
    validate(cfg);
    auto form = Newform::resolve(cfg.form);
    std::vector<PrimeRecord> factors;
    for (const auto& item : split(f.factors, ',')) {
        if (item.empty()) continue;
        const i64 ell = parse_int(item, "--factors");
        auto it = cfg.eta_overrides.find(ell);
        factors.push_back({ell, it != cfg.eta_overrides.end() ? it->second : primitive_root(ell)});
    }
    auto cert = kurihara_number(*form, cfg.p, cfg.r, factors, cfg.branch.value_or(0), cfg.jobs);
    cert.attestation = cfg.attestation;
    cert.seed = cfg.seed;
    if (cfg.format == "csv")
        emit("m,branch,value\n" + str(cert.m) + "," + str(cert.branch) + "," + str(cert.value) + "\n", f, out);
    else
        emit(canonical_dump(to_json(cert)), f, out);
    return cert.value != 0 ? kExitOk : kExitNoWitness;
}

int cmd_primes(const JobConfig& cfg, const Flags& f, std::ostream& out)
{
    validate(cfg);
    auto form = Newform::resolve(cfg.form);
    auto primes = kolyvagin_primes(*form, cfg.p, cfg.prime_bound, cfg.eta_overrides);
    if (cfg.format == "csv") {
        std::string text = "ell,eta,index\n";
        for (const auto& kp : primes) text += str(kp.ell) + "," + str(kp.eta) + "," + str(kp.index) + "\n";
        emit(text, f, out);
    } else {
        json list = json::array();
        for (const auto& kp : primes) list.push_back({{"ell", str(kp.ell)}, {"eta", str(kp.eta)}, {"index", str(kp.index)}});
        emit(canonical_dump({{"p", str(cfg.p)}, {"bound", str(cfg.prime_bound)}, {"primes", list}}), f, out);
    }
    return primes.empty() ? kExitNoWitness : kExitOk;
}

int cmd_mu(const JobConfig& cfg, const Flags& f, std::ostream& out)
{
    validate(cfg);
    auto form = Newform::resolve(cfg.form);
    json list = json::array();
    bool any = false;
    std::string text = "branch,n,exponent,value\n";
    for (int branch : branches_of(cfg)) {
        auto w = mu_witness(form->symbol(), cfg.p, branch, cfg.n_max, cfg.r);
        any = any || w.has_value();
        if (w) {
            list.push_back({{"branch", str(branch)}, {"n", str(w->n)}, {"exponent", str(w->exponent)},
                            {"b", str(w->b)}, {"value", str(w->value)}});
            text += str(branch) + "," + str(w->n) + "," + str(w->exponent) + "," + str(w->value) + "\n";
        } else {
            list.push_back({{"branch", str(branch)}, {"n", nullptr}});
            text += str(branch) + ",,,\n";
        }
    }
    emit(cfg.format == "csv" ? text : canonical_dump({{"p", str(cfg.p)}, {"witnesses", list}}), f, out);
    return any ? kExitOk : kExitNoWitness;
}

int cmd_theta(const JobConfig& cfg, const Flags& f, std::ostream& out)
{
    auto form = Newform::resolve(cfg.form);
    if (f.modulus < 1) config_error("theta needs --modulus M >= 1");
    auto th = theta(form->symbol(), f.modulus, cfg.r, cfg.jobs);
    if (cfg.format == "csv") {
        std::string text = "a,value\n";
        for (i64 a : th.element.group().units()) text += str(a) + "," + th.element.coeff(a).str() + "\n";
        emit(text, f, out);
    } else {
        json j = group_ring_to_json(th.element);
        j["r"] = str(cfg.r);
        j["form"] = form->id();
        emit(canonical_dump(j), f, out);
    }
    return kExitOk;
}

int cmd_verify_norm(const JobConfig& cfg, const Flags& f, std::ostream& out)
{
    auto form = Newform::resolve(cfg.form);
    const auto& nes = form->symbol();
    const i64 bound = f.bound > 0 ? f.bound : 100;
    ThetaTable table(nes, cfg.r, cfg.jobs);
    i64 checked = 0;
    json failures = json::array();
    for (i64 ell : primes_up_to(bound))
        for (i64 m = 1; m * ell <= bound; ++m) {
            if (gcd(m * ell, nes.level()) != 1) continue;
            ++checked;
            if (!verify_norm_relation(table, m, ell).equal) failures.push_back({{"m", str(m)}, {"ell", str(ell)}});
        }
    if (cfg.format == "csv")
        emit("checked,failed\n" + str(checked) + "," + str(static_cast<i64>(failures.size())) + "\n", f, out);
    else
        emit(canonical_dump({{"r", str(cfg.r)}, {"bound", str(bound)}, {"checked", str(checked)}, {"failures", failures}}),
             f, out);
    return failures.empty() ? kExitOk : kExitInternal;
}

int cmd_invariants(JobConfig cfg, const Flags& f, std::ostream& out)
{
    cfg.budget = 1;
    cfg.branch = cfg.branch.value_or(0);
    cfg.max_factors = 0;
    auto res = run_analyze(cfg);
    emit(canonical_dump({{"p", str(cfg.p)}, {"iwasawa", res.certificate["iwasawa"]}, {"mu", res.certificate["mu"]}}),
         f, out);
    const auto& iw = res.certificate["iwasawa"];
    const bool ok = iw.value("mu_zero", false) || iw.value("mode", "") == "pollack";
    return ok ? kExitOk : kExitNoWitness;
}

int cmd_ideal(const JobConfig& cfg, const Flags& f, std::ostream& out)
{
    validate(cfg);
    auto form = Newform::resolve(cfg.form);
    json gens = json::array();
    for (const auto& g : mt_ideal_generators(form->symbol(), cfg.p, cfg.n_max)) gens.push_back(group_ring_to_json(g));
    emit(canonical_dump({{"p", str(cfg.p)}, {"n", str(cfg.n_max)}, {"generators", gens}}), f, out);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Mazur-Tate elements, Kurihara numbers and Iwasawa invariants"};
    app.require_subcommand(1);
    Flags f;
    auto* analyze = app.add_subcommand("analyze", "run the full pipeline and print a certificate");
    auto* delta = app.add_subcommand("delta", "one Kurihara number, or replay certificates");
    auto* mu = app.add_subcommand("mu", "mu = 0 witnesses per branch");
    auto* th = app.add_subcommand("theta", "Mazur-Tate element over a modulus");
    auto* norm = app.add_subcommand("verify-norm", "norm relation suite");
    auto* inv = app.add_subcommand("invariants", "lambda and mu readings");
    auto* ideal = app.add_subcommand("ideal", "analytic ideal generators");
    auto* primes = app.add_subcommand("primes", "list Kolyvagin primes");
    for (auto* sub : {analyze, delta, mu, th, norm, inv, ideal, primes}) add_common(*sub, f);
    delta->add_option("--factors", f.factors, "primes of m, comma separated");
    delta->add_option("--replay", f.replay_file, "certificate to recompute");
    th->add_option("--modulus", f.modulus, "modulus M");
    analyze->add_flag("--ideal", f.ideal, "include analytic ideal generators");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        JobConfig cfg = build_config(*sub, f);
        if (f.ideal) cfg.ideal = true;
        if (sub == analyze) return cmd_analyze(cfg, f, out);
        if (sub == delta) return f.replay_file.empty() ? cmd_delta(cfg, f, out) : cmd_replay(cfg, f, out);
        if (sub == mu) return cmd_mu(cfg, f, out);
        if (sub == th) return cmd_theta(cfg, f, out);
        if (sub == norm) return cmd_verify_norm(cfg, f, out);
        if (sub == inv) return cmd_invariants(cfg, f, out);
        if (sub == ideal) return cmd_ideal(cfg, f, out);
        return cmd_primes(cfg, f, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace mtk
