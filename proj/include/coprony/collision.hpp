#pragma once

// Full sub-Nyquist analysis with collisions and cancellations:
//   A0  collided order n0, aliased eigenvalues lambda^(0), coefficients alpha^(0)
//   A1  per group: coefficient views alpha^(1)(k), multiplicity, inner analysis
//   out recombination of every (lambda^(0), lambda^(1)) pair into phi_l, alpha_l

#include <optional>
#include <string>
#include <vector>

#include "coprony/errors.hpp"
#include "coprony/linalg.hpp"
#include "coprony/model.hpp"
#include "coprony/prony.hpp"
#include "coprony/subnyquist.hpp"

namespace coprony {

struct AnalysisOptions {
    Backend backend = Backend::Pencil;
    Recombination recombination = Recombination::Nearest;
    double rank_tol = kNoiselessRankTol;
    double inner_rank_tol = kNoiselessRankTol;
    // Collect every view up to K_max before the group analysis instead of
    // pulling shifts on demand.
    bool eager_views = false;
    // Inner ranks also ignore singular values below
    // noise_factor * tau * sqrt(size), tau the estimated noise of one view.
    // 0 disables the noise floor.
    double noise_factor = 3.0;
};

struct ProbeRank {
    SampleIndex k = 0;
    std::size_t rank = 0;
    std::vector<double> singular_values;
};

struct StageA0Result {
    std::size_t n0 = 0;
    std::vector<Complex> lambda0;
    std::vector<Complex> alpha0;
    std::vector<ProbeRank> probes;  // k = 0 first
    SampleIndex eigen_shift = 0;    // probe the eigenvalues were extracted from
    bool ill_conditioned = false;
};

StageA0Result stage_a0(SampleSource& source, const SamplingScheme& scheme,
                       const AnalysisOptions& options);

// Coefficients of the aliased terms seen at shift k. The Vandermonde
// factorizations (M rows for k = 0, m rows for k > 0) are built once.
class CoefficientViewer {
public:
    CoefficientViewer(std::span<const Complex> lambda0, const SamplingScheme& scheme);

    std::vector<Complex> view(SampleSource& source, SampleIndex k) const;

    struct Fit {
        std::vector<Complex> coefficients;
        double noise = 0.0;  // estimated standard deviation of each coefficient
    };
    Fit view_fit(SampleSource& source, SampleIndex k) const;

private:
    SamplingScheme scheme_;
    LeastSquaresSolver base_;
    LeastSquaresSolver shifted_;
};

std::vector<Complex> coefficient_views(std::span<const Complex> lambda0, SampleSource& source,
                                       const SamplingScheme& scheme, SampleIndex k);

// Result of the rank-plateau test on one group's coefficient sequence.
struct GroupOrder {
    std::optional<std::size_t> multiplicity;  // empty: more views needed
    std::size_t required_length = 0;          // sequence length the next test needs
    std::vector<std::size_t> rank_profile;    // rank of the s x s Hankel, s = 1, 2, ...
};

// Smallest kappa with rank(H_kappa) = kappa = rank(H_{kappa+1}), where H_s is the
// s x s Hankel matrix of alpha_seq. Ranks use rel_tol times the leading singular
// value of the larger matrix; nothing counts below zero_floor or below
// noise_level * sqrt(kappa + 1).
GroupOrder group_order(std::span<const Complex> alpha_seq, double rel_tol,
                       double zero_floor = 0.0, double noise_level = 0.0);

struct CollisionGroup {
    Complex lambda0{};
    std::vector<Complex> alpha_seq;  // alpha^(1)(k), k = 0..K
    std::size_t multiplicity = 0;
    std::vector<Complex> inner_eigenvalues;   // lambda^(1) = exp(phi rho delta)
    std::vector<Complex> inner_coefficients;  // alpha
    std::vector<std::size_t> rank_profile;
};

struct InnerTerms {
    std::vector<Complex> eigenvalues;
    std::vector<Complex> coefficients;
};

// Inner pencil + Vandermonde on the group's coefficient sequence, keeping the
// `multiplicity` strongest components.
InnerTerms group_disentangle(const CollisionGroup& group);

struct RecoveredTerm {
    ExponentialTerm term;
    std::size_t group = 0;
    Complex lambda0{};
    Complex lambda1{};
    double gap = 0.0;
};

struct RecoveryReport {
    std::size_t n0 = 0;
    std::vector<CollisionGroup> groups;
    SignalModel terms;  // sorted by omega
    std::vector<RecoveredTerm> details;
    std::size_t samples_consumed = 0;
    std::vector<ProbeRank> probes;
    std::size_t views = 0;  // shifts k = 0..views-1 were used
    double view_noise = 0.0;  // pooled noise estimate of one coefficient view
    Recombination recombination_method = Recombination::Nearest;
    std::vector<std::string> warnings;
};

// Stage failure inside analyze_full, carrying what was computed so far.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause, RecoveryReport partial);

    const std::string& stage() const noexcept { return stage_; }
    ErrorKind cause() const noexcept { return cause_; }
    std::optional<SampleIndex> missing_index() const noexcept { return missing_; }
    const RecoveryReport& partial() const noexcept { return partial_; }

private:
    std::string stage_;
    ErrorKind cause_;
    std::optional<SampleIndex> missing_;
    RecoveryReport partial_;
};

RecoveryReport analyze_full(SampleSource& source, const SamplingScheme& scheme, double omega_max,
                            const AnalysisOptions& options);

}  // namespace coprony
