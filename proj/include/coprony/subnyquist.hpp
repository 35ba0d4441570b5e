#pragma once

// Aliasing arithmetic for two coprime decimations r and rho, and the
// collision-free pipeline (stride-r analysis + one identification shift).

#include <cstdint>
#include <optional>
#include <vector>

#include "coprony/linalg.hpp"
#include "coprony/model.hpp"
#include "coprony/prony.hpp"

namespace coprony {

// p1 * r + p2 * rho = 1 (which also holds mod omega_max).
struct BezoutPair {
    std::int64_t p1 = 0;
    std::int64_t p2 = 0;
    std::int64_t r = 0;
    std::int64_t rho = 0;
    std::int64_t omega_max = 0;
};

// Smallest |p1| + |p2| (ties: smaller |p1|). Throws NotCoprime when gcd(r, |rho|) != 1.
BezoutPair bezout(std::int64_t r, std::int64_t rho, std::int64_t omega_max);

// The `factor` frequencies in [0, period) consistent with one aliased eigenvalue,
// period = 1 / delta (= omega_max when delta = 1 / omega_max).
struct CandidateSet {
    double base = 0.0;  // in [0, period / factor)
    std::int64_t factor = 1;
    double period = 0.0;

    double spacing() const { return period / static_cast<double>(factor); }
    std::vector<double> candidates() const;
};

// lambda_pow = exp(phi * factor * delta); a negative factor is handled through 1 / lambda.
CandidateSet candidate_set(Complex lambda_pow, std::int64_t factor, double omega_max, double delta);

// Bezout recombination of two aliased eigenvalues into a frequency in [0, 1/delta).
double recombine_euclid(Complex lambda_r, Complex lambda_rho, const BezoutPair& pair, double delta);

struct NearestMatch {
    double omega = 0.0;
    double gap = 0.0;  // circular distance between the two matched candidates
    double anchor = 0.0;  // the matched candidate from the lambda_r set
};

// Midpoint of the closest pair drawn from the two candidate sets.
NearestMatch recombine_nearest(Complex lambda_r, Complex lambda_rho, std::int64_t r,
                               std::int64_t rho, double omega_max, double delta);

// psi = ln|lambda_r| / (r delta)
double recover_damping(Complex lambda_r, std::int64_t r, double delta);

// Nearest reports the midpoint of the closest pair, Anchored the lambda_r member
// of that pair.
enum class Recombination { Euclid, Nearest, Anchored };

const char* to_string(Recombination r);

// Frequency of one term from its stride-r and stride-rho eigenvalues (both de-damped first).
NearestMatch recombine(Complex lambda_r, Complex lambda_rho, std::int64_t r, std::int64_t rho,
                       double omega_max, double delta, Recombination method);

inline constexpr double kDegenerateCoefficientTol = 1e-8;

// lambda_i^rho for each base term, from the shifted rows f_{jr+rho}, j = h..h+rows-1.
std::vector<Complex> shift_pair(const StrideAnalysis& base, SampleSource& source,
                                const SamplingScheme& scheme, std::size_t h_offset = 0,
                                std::size_t rows = 0);

struct CollisionFreeOptions {
    Backend backend = Backend::Pencil;
    Recombination recombination = Recombination::Nearest;
    double rank_tol = kNoiselessRankTol;
    std::optional<std::size_t> keep;  // amplitude filter applied after pairing
    std::size_t shift_offset = 0;
};

struct CollisionFreeResult {
    SignalModel model;  // sorted by omega
    std::size_t n_detected = 0;
    RankEstimate base_rank;
    std::vector<Complex> lambda_r;
    std::vector<Complex> lambda_rho;
    std::vector<Complex> alpha;
    std::vector<double> gaps;
    std::size_t samples_consumed = 0;
    bool ill_conditioned = false;
};

CollisionFreeResult analyze_collision_free(SampleSource& source, const SamplingScheme& scheme,
                                           double omega_max, const CollisionFreeOptions& options);

}  // namespace coprony
