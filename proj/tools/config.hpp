#pragma once

// Run configuration: JSON schema version 1.
//
//   {
//     "version": 1,
//     "preset": "table2",                       optional, fills every other field
//     "model": {"omega_max": 1000, "terms": [{"beta", "gamma", "psi", "omega"}]},
//     "scheme": {"delta", "r", "rho", "M", "N", "m", "K_max"},
//     "snr_db": 20 | null, "seed": 1,
//     "backend": "pencil" | "esprit", "recombination": "nearest" | "anchored" | "euclid",
//     "pipeline": "full" | "collision_free", "keep": 20 | null,
//     "rank_tol", "inner_rank_tol", "noise_factor", "eager_views", "shift_offset",
//     "match_window",
//     "outputs": {"dir": "out"}
//   }
//
// Explicit fields override the preset. Unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "coprony/collision.hpp"
#include "coprony/model.hpp"
#include "coprony/prony.hpp"
#include "coprony/subnyquist.hpp"

namespace coprony::app {

inline constexpr int kConfigVersion = 1;

enum class Pipeline { Full, CollisionFree };

struct RunConfig {
    std::optional<std::string> preset;
    SignalModel model;
    SamplingScheme scheme;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
    Backend backend = Backend::Pencil;
    Recombination recombination = Recombination::Nearest;
    Pipeline pipeline = Pipeline::Full;
    std::optional<std::size_t> keep;
    double rank_tol = kNoiselessRankTol;
    double inner_rank_tol = kNoiselessRankTol;
    double noise_factor = 3.0;
    bool eager_views = false;
    std::size_t shift_offset = 0;
    double match_window = 0.5;
    std::string out_dir = "out";

    // Throws Error(Config) on any schema or consistency problem.
    void validate() const;

    AnalysisOptions analysis_options() const;
    CollisionFreeOptions collision_free_options() const;
};

const char* to_string(Pipeline p);

// "nearest", "anchored" or "euclid"; throws Error(Config) otherwise.
Recombination parse_recombination(const std::string& s);

RunConfig preset_config(const std::string& name);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);

}  // namespace coprony::app
