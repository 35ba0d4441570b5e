#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "coprony/errors.hpp"
#include "coprony/presets.hpp"

namespace coprony::app {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::Config, what); }

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object())
        bad(where + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            bad("unknown key '" + key + "' in " + where);
}

double get_number(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number())
        bad(where + "." + key + " must be a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        bad(where + "." + key + " must be an integer");
    return v.get<std::int64_t>();
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
    const auto v = get_integer(obj, key, where);
    if (v < 0)
        bad(where + "." + key + " must be nonnegative");
    return static_cast<std::size_t>(v);
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string())
        bad(where + "." + key + " must be a string");
    return v.get<std::string>();
}

Backend parse_backend(const std::string& s) {
    if (s == "pencil")
        return Backend::Pencil;
    if (s == "esprit")
        return Backend::Esprit;
    bad("backend must be 'pencil' or 'esprit'");
}

}  // namespace

Recombination parse_recombination(const std::string& s) {
    if (s == "nearest")
        return Recombination::Nearest;
    if (s == "euclid")
        return Recombination::Euclid;
    if (s == "anchored")
        return Recombination::Anchored;
    bad("recombination must be 'nearest', 'anchored' or 'euclid'");
}

namespace {

Pipeline parse_pipeline(const std::string& s) {
    if (s == "full")
        return Pipeline::Full;
    if (s == "collision_free")
        return Pipeline::CollisionFree;
    bad("pipeline must be 'full' or 'collision_free'");
}

}  // namespace

const char* to_string(Pipeline p) { return p == Pipeline::Full ? "full" : "collision_free"; }

void RunConfig::validate() const {
    try {
        model.validate();
        scheme.validate(model.omega_max);
    } catch (const Error& e) {
        bad(e.what());
    }
    if (snr_db && !std::isfinite(*snr_db))
        bad("snr_db must be finite");
    for (double tol : {rank_tol, inner_rank_tol})
        if (!(tol > 0.0 && tol < 1.0))
            bad("rank tolerances must lie in (0, 1)");
    if (!(noise_factor >= 0.0))
        bad("noise_factor must be nonnegative");
    if (keep && *keep == 0)
        bad("keep must be positive");
    if (!(match_window > 0.0))
        bad("match_window must be positive");
    if (pipeline == Pipeline::Full && scheme.K_max < 2)
        bad("the full pipeline needs K_max >= 2");
    if (pipeline == Pipeline::CollisionFree && scheme.K_max < 1)
        bad("the collision-free pipeline needs K_max >= 1");
    // The shifted grids must start at a nonnegative index.
    if (scheme.rho < 0)
        bad("negative rho needs a schedule offset, which this configuration does not carry");
}

AnalysisOptions RunConfig::analysis_options() const {
    AnalysisOptions o;
    o.backend = backend;
    o.recombination = recombination;
    o.rank_tol = rank_tol;
    o.inner_rank_tol = inner_rank_tol;
    o.noise_factor = noise_factor;
    o.eager_views = eager_views;
    return o;
}

CollisionFreeOptions RunConfig::collision_free_options() const {
    CollisionFreeOptions o;
    o.backend = backend;
    o.recombination = recombination;
    o.rank_tol = rank_tol;
    o.keep = keep;
    o.shift_offset = shift_offset;
    return o;
}

RunConfig preset_config(const std::string& name) {
    const auto p = find_preset(name);
    if (!p)
        bad("unknown preset '" + name + "'");
    RunConfig c;
    c.preset = name;
    c.model = p->model;
    c.scheme = p->scheme;
    c.snr_db = p->snr_db;
    c.pipeline = p->pipeline == "full" ? Pipeline::Full : Pipeline::CollisionFree;
    c.keep = p->keep;
    c.rank_tol = p->rank_tol;
    c.inner_rank_tol = p->inner_rank_tol;
    c.eager_views = p->eager_views;
    return c;
}

RunConfig config_from_json(const json& j) {
    only_keys(j,
              {"version", "preset", "model", "scheme", "snr_db", "seed", "backend",
               "recombination", "pipeline", "keep", "rank_tol", "inner_rank_tol",
               "noise_factor", "eager_views", "shift_offset", "match_window", "outputs"},
              "config");
    if (!j.contains("version"))
        bad("config.version is required");
    if (get_integer(j, "version", "config") != kConfigVersion)
        bad("unsupported config version (expected " + std::to_string(kConfigVersion) + ")");

    RunConfig c;
    if (j.contains("preset"))
        c = preset_config(get_string(j, "preset", "config"));
    else if (!j.contains("model") || !j.contains("scheme"))
        bad("config needs a preset or both model and scheme");

    if (j.contains("model")) {
        const auto& m = j.at("model");
        only_keys(m, {"omega_max", "terms"}, "model");
        if (!m.contains("omega_max") || !m.contains("terms") || !m.at("terms").is_array())
            bad("model needs omega_max and a terms array");
        c.model = {};
        c.model.omega_max = get_number(m, "omega_max", "model");
        for (const auto& t : m.at("terms")) {
            only_keys(t, {"beta", "gamma", "psi", "omega"}, "model.terms[]");
            ExponentialTerm term;
            term.beta = get_number(t, "beta", "term");
            term.gamma = t.contains("gamma") ? get_number(t, "gamma", "term") : 0.0;
            term.psi = t.contains("psi") ? get_number(t, "psi", "term") : 0.0;
            term.omega = get_number(t, "omega", "term");
            c.model.terms.push_back(term);
        }
    }
    if (j.contains("scheme")) {
        const auto& s = j.at("scheme");
        only_keys(s, {"delta", "r", "rho", "M", "N", "m", "K_max"}, "scheme");
        for (const char* key : {"delta", "r", "rho", "M", "N", "m", "K_max"})
            if (!s.contains(key) && !c.preset)
                bad(std::string("scheme.") + key + " is required");
        if (s.contains("delta"))
            c.scheme.delta = get_number(s, "delta", "scheme");
        if (s.contains("r"))
            c.scheme.r = get_integer(s, "r", "scheme");
        if (s.contains("rho"))
            c.scheme.rho = get_integer(s, "rho", "scheme");
        if (s.contains("M"))
            c.scheme.M = get_count(s, "M", "scheme");
        if (s.contains("N"))
            c.scheme.N = get_count(s, "N", "scheme");
        if (s.contains("m"))
            c.scheme.m = get_count(s, "m", "scheme");
        if (s.contains("K_max"))
            c.scheme.K_max = get_count(s, "K_max", "scheme");
    }
    if (j.contains("snr_db")) {
        if (j.at("snr_db").is_null())
            c.snr_db.reset();
        else
            c.snr_db = get_number(j, "snr_db", "config");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            bad("config.seed must be an unsigned integer");
        if (j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() < 0)
            bad("config.seed must be an unsigned integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("backend"))
        c.backend = parse_backend(get_string(j, "backend", "config"));
    if (j.contains("recombination"))
        c.recombination = parse_recombination(get_string(j, "recombination", "config"));
    if (j.contains("pipeline"))
        c.pipeline = parse_pipeline(get_string(j, "pipeline", "config"));
    if (j.contains("keep")) {
        if (j.at("keep").is_null())
            c.keep.reset();
        else
            c.keep = get_count(j, "keep", "config");
    }
    if (j.contains("rank_tol"))
        c.rank_tol = get_number(j, "rank_tol", "config");
    if (j.contains("inner_rank_tol"))
        c.inner_rank_tol = get_number(j, "inner_rank_tol", "config");
    if (j.contains("noise_factor"))
        c.noise_factor = get_number(j, "noise_factor", "config");
    if (j.contains("eager_views")) {
        if (!j.at("eager_views").is_boolean())
            bad("config.eager_views must be a boolean");
        c.eager_views = j.at("eager_views").get<bool>();
    }
    if (j.contains("shift_offset"))
        c.shift_offset = get_count(j, "shift_offset", "config");
    if (j.contains("match_window"))
        c.match_window = get_number(j, "match_window", "config");
    if (j.contains("outputs")) {
        only_keys(j.at("outputs"), {"dir"}, "outputs");
        if (j.at("outputs").contains("dir"))
            c.out_dir = get_string(j.at("outputs"), "dir", "outputs");
    }
    c.validate();
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["version"] = kConfigVersion;
    if (c.preset)
        j["preset"] = *c.preset;
    json terms = json::array();
    for (const auto& t : c.model.terms)
        terms.push_back({{"beta", t.beta}, {"gamma", t.gamma}, {"psi", t.psi}, {"omega", t.omega}});
    j["model"] = {{"omega_max", c.model.omega_max}, {"terms", terms}};
    j["scheme"] = {{"delta", c.scheme.delta}, {"r", c.scheme.r},     {"rho", c.scheme.rho},
                   {"M", c.scheme.M},         {"N", c.scheme.N},     {"m", c.scheme.m},
                   {"K_max", c.scheme.K_max}};
    j["snr_db"] = c.snr_db ? json(*c.snr_db) : json(nullptr);
    j["seed"] = c.seed;
    j["backend"] = to_string(c.backend);
    j["recombination"] = to_string(c.recombination);
    j["pipeline"] = to_string(c.pipeline);
    j["keep"] = c.keep ? json(*c.keep) : json(nullptr);
    j["rank_tol"] = c.rank_tol;
    j["inner_rank_tol"] = c.inner_rank_tol;
    j["noise_factor"] = c.noise_factor;
    j["eager_views"] = c.eager_views;
    j["shift_offset"] = c.shift_offset;
    j["match_window"] = c.match_window;
    j["outputs"] = {{"dir", c.out_dir}};
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        bad("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        bad("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

}  // namespace coprony::app
