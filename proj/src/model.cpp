#include "coprony/model.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "coprony/errors.hpp"

namespace coprony {

ExponentialTerm ExponentialTerm::from_alpha(Complex alpha, double psi, double omega) {
    return {std::abs(alpha), std::arg(alpha), psi, omega};
}

void SignalModel::validate() const {
    if (terms.empty())
        throw Error(ErrorKind::InvalidInput, "signal model needs at least one term");
    if (!(omega_max > 0.0) || std::floor(omega_max) != omega_max)
        throw Error(ErrorKind::InvalidInput, "omega_max must be a positive integer");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (!std::isfinite(t.beta) || !std::isfinite(t.gamma) || !std::isfinite(t.psi) ||
            !std::isfinite(t.omega))
            throw Error(ErrorKind::InvalidInput, "term " + std::to_string(i) + " is not finite");
        if (t.beta < 0.0)
            throw Error(ErrorKind::InvalidInput, "term " + std::to_string(i) + " has beta < 0");
        if (t.omega < 0.0 || t.omega >= omega_max)
            throw Error(ErrorKind::InvalidInput,
                        "term " + std::to_string(i) + " frequency outside [0, omega_max)");
    }
}

double wrap_frequency(double omega, double period) {
    double w = std::fmod(omega, period);
    if (w < 0.0)
        w += period;
    if (w >= period)
        w -= period;
    return w;
}

namespace {

Complex term_value(const ExponentialTerm& term, double t) {
    double cycles = term.omega * t;
    cycles -= std::floor(cycles);
    return std::polar(term.beta * std::exp(term.psi * t), term.gamma + kTwoPi * cycles);
}

}  // namespace

Complex evaluate(const SignalModel& model, double t) {
    Complex sum{0.0, 0.0};
    for (const auto& term : model.terms)
        sum += term_value(term, t);
    return sum;
}

Complex evaluate_at_index(const SignalModel& model, SampleIndex j, double delta) {
    return evaluate(model, static_cast<double>(j) * delta);
}

void SamplingScheme::validate(double omega_max) const {
    if (!(delta > 0.0))
        throw Error(ErrorKind::InvalidInput, "delta must be positive");
    if (delta * omega_max > 1.0 + 1e-12)
        throw Error(ErrorKind::InvalidInput, "delta * omega_max must not exceed 1");
    if (r <= 1)
        throw Error(ErrorKind::InvalidInput, "decimation factor r must exceed 1");
    if (rho == 0)
        throw Error(ErrorKind::InvalidInput, "shift factor rho must be nonzero");
    if (gcd_abs(r, rho) != 1)
        throw Error(ErrorKind::NotCoprime, "gcd(r, |rho|) must be 1, got " +
                                               std::to_string(gcd_abs(r, rho)));
    if (N < 1 || M < 2 * N)
        throw Error(ErrorKind::InvalidInput, "need N >= 1 and M >= 2N");
    if (m < 2)
        throw Error(ErrorKind::InvalidInput, "need at least two samples per shift");
}

std::int64_t gcd_abs(std::int64_t a, std::int64_t b) {
    return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

SampleIndex shifted_index(const SamplingScheme& scheme, SampleIndex j, SampleIndex k) {
    if (j < 0 || k < 0)
        throw Error(ErrorKind::InvalidSchedule, "base and shift indices must be nonnegative");
    const SampleIndex idx = j * scheme.r + k * scheme.rho;
    if (idx < 0)
        throw Error(ErrorKind::InvalidSchedule,
                    "schedule reaches negative time index " + std::to_string(idx));
    return idx;
}

double add_noise_calibration(const SignalModel& model, const SamplingScheme& scheme,
                             double snr_db) {
    if (!std::isfinite(snr_db))
        throw Error(ErrorKind::InvalidCalibration, "snr_db must be finite");
    if (scheme.M == 0)
        throw Error(ErrorKind::InvalidCalibration, "empty base grid");
    double power = 0.0;
    for (std::size_t j = 0; j < scheme.M; ++j)
        power += std::norm(
            evaluate_at_index(model, static_cast<SampleIndex>(j) * scheme.r, scheme.delta));
    power /= static_cast<double>(scheme.M);
    if (!(power > 0.0))
        throw Error(ErrorKind::InvalidCalibration, "signal is zero on the base grid");
    return std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
}

Complex noise_draw(std::uint64_t seed, SampleIndex j, double sigma) {
    const auto uj = static_cast<std::uint64_t>(j);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(uj), static_cast<std::uint32_t>(uj >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
    const double re = gauss(rng);
    const double im = gauss(rng);
    return {re, im};
}

SampleSource SampleSource::generator(SignalModel model, double delta,
                                     std::optional<NoiseSpec> noise) {
    model.validate();
    if (!(delta > 0.0))
        throw Error(ErrorKind::InvalidInput, "delta must be positive");
    SampleSource src;
    src.model_ = std::move(model);
    src.noise_ = noise;
    src.delta_ = delta;
    return src;
}

SampleSource SampleSource::trace(std::map<SampleIndex, Complex> values, double delta) {
    SampleSource src;
    src.values_ = std::move(values);
    src.delta_ = delta;
    return src;
}

Complex SampleSource::sample(SampleIndex j) {
    if (j < 0)
        throw SampleUnavailable(j);
    if (auto it = values_.find(j); it != values_.end()) {
        consumed_.insert(j);
        return it->second;
    }
    if (!model_)
        throw SampleUnavailable(j);
    Complex value = evaluate_at_index(*model_, j, delta_);
    if (noise_ && noise_->sigma > 0.0)
        value += noise_draw(noise_->seed, j, noise_->sigma);
    values_.emplace(j, value);
    consumed_.insert(j);
    return value;
}

SampleReader SampleSource::reader() {
    return [this](SampleIndex j) { return sample(j); };
}

Complex sample_index(SampleSource& source, SampleIndex j) { return source.sample(j); }

}  // namespace coprony
