#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "coprony/linalg.hpp"

namespace coprony {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// alpha = beta * exp(i gamma), phi = psi + i 2 pi omega
struct ExponentialTerm {
    double beta = 0.0;   // amplitude, >= 0
    double gamma = 0.0;  // phase [rad]
    double psi = 0.0;    // damping [1/time]
    double omega = 0.0;  // frequency [cycles/time], in [0, omega_max)

    Complex alpha() const { return std::polar(beta, gamma); }
    Complex phi() const { return {psi, kTwoPi * omega}; }

    // Builds a term from a complex coefficient; beta = |alpha|, gamma = arg(alpha).
    static ExponentialTerm from_alpha(Complex alpha, double psi, double omega);
};

struct SignalModel {
    std::vector<ExponentialTerm> terms;
    double omega_max = 0.0;  // bandwidth, positive integer

    // Throws Error(InvalidInput) on an empty term list, a non-integer bandwidth
    // or a frequency outside [0, omega_max).
    void validate() const;
};

// Maps any real frequency into [0, period).
double wrap_frequency(double omega, double period);

Complex evaluate(const SignalModel& model, double t);

// evaluate(model, j * delta) with the phase reduced before the exponential.
Complex evaluate_at_index(const SignalModel& model, SampleIndex j, double delta);

struct SamplingScheme {
    double delta = 0.0;     // time step, delta * omega_max <= 1
    std::int64_t r = 2;     // decimation factor > 1
    std::int64_t rho = 1;   // shift factor, nonzero, gcd(r, |rho|) = 1
    std::size_t M = 0;      // base-grid sample count
    std::size_t N = 0;      // modeled term budget, M >= 2N
    std::size_t m = 0;      // samples per shift
    std::size_t K_max = 0;  // largest shift index that may be requested

    void validate(double omega_max) const;
};

std::int64_t gcd_abs(std::int64_t a, std::int64_t b);

// j * r + k * rho; throws Error(InvalidSchedule) if negative.
SampleIndex shifted_index(const SamplingScheme& scheme, SampleIndex j, SampleIndex k);

// sigma of circular complex Gaussian noise for the requested SNR, with the
// signal power averaged over the noiseless base grid j * r, j < M.
double add_noise_calibration(const SignalModel& model, const SamplingScheme& scheme,
                             double snr_db);

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Delivers f_j = phi(j delta) (+ noise) on demand. Every index gets exactly one
// value for the lifetime of the source; the noise of index j depends only on
// (seed, j), so read order never changes the stream. Not thread safe.
class SampleSource {
public:
    static SampleSource generator(SignalModel model, double delta,
                                  std::optional<NoiseSpec> noise = std::nullopt);
    static SampleSource trace(std::map<SampleIndex, Complex> values, double delta);

    Complex sample(SampleIndex j);

    // Reader bound to this source; the source must outlive it.
    SampleReader reader();

    bool is_trace() const { return !model_.has_value(); }
    double delta() const { return delta_; }
    const std::set<SampleIndex>& consumed() const { return consumed_; }
    std::size_t consumed_count() const { return consumed_.size(); }

private:
    SampleSource() = default;

    std::optional<SignalModel> model_;
    std::optional<NoiseSpec> noise_;
    double delta_ = 0.0;
    std::map<SampleIndex, Complex> values_;  // trace entries or cached draws
    std::set<SampleIndex> consumed_;
};

Complex sample_index(SampleSource& source, SampleIndex j);

// Circular complex Gaussian draw for one index, a pure function of (seed, j, sigma).
Complex noise_draw(std::uint64_t seed, SampleIndex j, double sigma);

// Trace CSV: header `index,re,im`, one row per time index.
std::map<SampleIndex, Complex> read_trace_csv(std::istream& in);
void write_trace_csv(std::ostream& out, const std::map<SampleIndex, Complex>& values);

}  // namespace coprony
