#include "coprony/presets.hpp"

#include <cmath>

namespace coprony {

namespace {

ExponentialTerm term(double beta, double gamma, double psi, double omega, double omega_max) {
    return {beta, gamma, psi, wrap_frequency(omega, omega_max)};
}

// sign * exp(i 2 pi phase_cycles), unit modulus, undamped
ExponentialTerm unit(double sign, double phase_cycles, double omega) {
    double gamma = kTwoPi * phase_cycles;
    if (sign < 0)
        gamma += kTwoPi / 2;
    return {1.0, gamma, 0.0, omega};
}

}  // namespace

SignalModel table1_model() {
    constexpr double W = 1000.0;
    struct Row {
        double beta, gamma, psi, omega;
    };
    static const Row rows[] = {
        {6.5, 0.15, -0.19, -453.1},   {6.8, 0.0, -0.132, -452.19},
        {6.8, 0.3, -0.183, -451.02},  {6.4, 0.9, -0.11, -450.21},
        {7.1, 0.7, -0.21, -448.39},   {4.71, 0.12, -0.106, -132.5},
        {3.9, 0.1, -0.129, -131.4},   {7.2, -0.234, -0.203, -130.01},
        {7.43, 0.2, -0.16, -129.17},  {4.4, -0.52, -0.19, -128.39},
        {3.0, 0.21, -0.101, 9.1},     {3.0, -0.8, -0.127, 11.81},
        {7.2, -0.106, -0.21, 126.01}, {6.53, 0.2, -0.15, 127.62},
        {6.7, -0.3, -0.173, 128.98},  {6.8, -0.15, -0.11, 334.01},
        {6.0, 0.26, -0.12, 335.18},   {7.1, -0.2, -0.157, 336.01},
        {7.1, 0.0, -0.120, 337.91},   {6.0, -0.1, -0.18, 339.61},
    };
    SignalModel m;
    m.omega_max = W;
    for (const auto& r : rows)
        m.terms.push_back(term(r.beta, r.gamma, r.psi, r.omega, W));
    return m;
}

SignalModel table2_model() {
    constexpr double pi = kTwoPi / 2;
    SignalModel m;
    m.omega_max = 1000.0;
    m.terms = {
        {18.0, 0.0, 0.0, 191.9}, {20.0, pi, 0.0, 291.9}, {20.0, 0.0, 0.0, 391.9},
        {5.0, 0.0, 0.0, 526.2},  {5.0, 0.0, 0.0, 858.1}, {11.0, 0.0, 0.0, 958.1},
    };
    return m;
}

SignalModel cancel7_model() {
    SignalModel m;
    m.omega_max = 100.0;
    m.terms = {
        unit(1, 0, 1),     unit(-1, 0, 21),     unit(1, 0, 41), unit(-1, 0, 61),
        unit(1, 0.72, 11), unit(-1, 0.32, 31),  unit(1, 0, 9),
    };
    return m;
}

SignalModel collide7_model() {
    SignalModel m;
    m.omega_max = 100.0;
    m.terms = {
        unit(1, 0, 1),  unit(-1, 0, 21), unit(1, 0, 41), unit(-1, 0, 61),
        unit(1, 0, 11), unit(-1, 0, 31), unit(1, 0, 51),
    };
    return m;
}

std::vector<std::string> preset_names() { return {"table1", "table2", "cancel7", "collide7"}; }

std::optional<Preset> find_preset(std::string_view name) {
    Preset p;
    p.name = std::string(name);
    if (name == "table1") {
        p.model = table1_model();
        p.scheme = {1e-3, 11, 5, 180, 60, 60, 1};
        p.snr_db = 32.0;
        p.pipeline = "collision_free";
        p.keep = 20;
        p.rank_tol = kNoiselessRankTol;
        p.inner_rank_tol = kNoiselessRankTol;
        return p;
    }
    if (name == "table2") {
        p.model = table2_model();
        p.scheme = {1e-3, 100, 133, 60, 30, 10, 11};
        p.snr_db = 20.0;
        p.pipeline = "full";
        p.rank_tol = kNoisyRankTol;
        p.inner_rank_tol = kNoisyRankTol;
        p.eager_views = true;
        return p;
    }
    if (name == "cancel7") {
        p.model = cancel7_model();
        p.scheme = {0.01, 5, 12, 16, 8, 16, 15};
        p.pipeline = "full";
        return p;
    }
    if (name == "collide7") {
        p.model = collide7_model();
        p.scheme = {0.01, 5, 12, 16, 8, 16, 15};
        p.pipeline = "full";
        return p;
    }
    return std::nullopt;
}

}  // namespace coprony
