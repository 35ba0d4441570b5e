#pragma once

// The three worked signals (plus the 7-term collision signal) with their
// default sampling schemes.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coprony/model.hpp"

namespace coprony {

struct Preset {
    std::string name;
    SignalModel model;
    SamplingScheme scheme;
    std::optional<double> snr_db;
    std::string pipeline;  // "full" or "collision_free"
    std::optional<std::size_t> keep;
    double rank_tol = kNoiselessRankTol;
    double inner_rank_tol = kNoiselessRankTol;
    bool eager_views = false;
};

// 20 damped terms in five clusters, bandwidth 1000.
SignalModel table1_model();
// 6 undamped terms colliding into 3 at r = 100.
SignalModel table2_model();
// 7 terms with a cancelling group at r = 5.
SignalModel cancel7_model();
// 7 terms with alternating signs, bandwidth 100.
SignalModel collide7_model();

std::vector<std::string> preset_names();
std::optional<Preset> find_preset(std::string_view name);

}  // namespace coprony
