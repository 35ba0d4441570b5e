#include "coprony/prony.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coprony/errors.hpp"

namespace coprony {

const char* to_string(Backend b) { return b == Backend::Pencil ? "pencil" : "esprit"; }

HankelShape base_shape(const SamplingScheme& scheme) { return {scheme.M - scheme.N, scheme.N}; }

RankEstimate detect_order(SampleSource& source, SampleIndex start, SampleIndex stride,
                          HankelShape shape, double rel_tol) {
    return numerical_rank(build_hankel(source.reader(), shape.rows, shape.cols, start, stride),
                          rel_tol);
}

RankEstimate detect_order(SampleSource& source, const SamplingScheme& scheme, SampleIndex start,
                          SampleIndex stride, double rel_tol) {
    return detect_order(source, start, stride, base_shape(scheme), rel_tol);
}

std::vector<Complex> extract_eigenvalues(SampleSource& source, std::size_t n, SampleIndex start,
                                         SampleIndex stride, HankelShape shape, Backend backend) {
    if (n < 1)
        throw Error(ErrorKind::InvalidInput, "need at least one eigenvalue");
    const auto reader = source.reader();
    if (backend == Backend::Pencil)
        return pencil_eigenvalues(reader, n, shape.rows, start, stride, shape.cols);
    // Same samples as the pencil: rows + cols of them.
    const std::size_t count = shape.rows + shape.cols;
    const std::size_t window = std::max(shape.cols, n + 1);
    return esprit_eigenvalues(reader, n, window, count, start, stride);
}

CoefficientFit extract_coefficients(std::span<const Complex> eigenvalues, SampleSource& source,
                                    std::size_t rows, SampleIndex start, SampleIndex stride) {
    if (rows < eigenvalues.size())
        throw Error(ErrorKind::InvalidInput, "Vandermonde needs rows >= number of eigenvalues");
    ComplexVector rhs(static_cast<Eigen::Index>(rows));
    for (std::size_t j = 0; j < rows; ++j)
        rhs(static_cast<Eigen::Index>(j)) =
            source.sample(start + static_cast<SampleIndex>(j) * stride);
    const auto sol = solve_least_squares(build_vandermonde(eigenvalues, rows), rhs);
    CoefficientFit fit;
    fit.coefficients.assign(sol.x.data(), sol.x.data() + sol.x.size());
    fit.ill_conditioned = sol.ill_conditioned;
    return fit;
}

namespace {

StrideAnalysis select(const StrideAnalysis& analysis, std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    StrideAnalysis out = analysis;
    out.eigenvalues.clear();
    out.coefficients.clear();
    for (std::size_t i : idx) {
        out.eigenvalues.push_back(analysis.eigenvalues[i]);
        out.coefficients.push_back(analysis.coefficients[i]);
    }
    out.n_detected = idx.size();
    return out;
}

}  // namespace

StrideAnalysis filter_by_amplitude(const StrideAnalysis& analysis, std::size_t keep) {
    const std::size_t n = analysis.coefficients.size();
    if (analysis.eigenvalues.size() != n)
        throw Error(ErrorKind::InvalidInput, "eigenvalue/coefficient lengths differ");
    if (keep > n)
        throw Error(ErrorKind::InvalidInput, "cannot keep more terms than present");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(analysis.coefficients[a]) > std::abs(analysis.coefficients[b]);
    });
    order.resize(keep);
    return select(analysis, std::move(order));
}

StrideAnalysis filter_by_relative_amplitude(const StrideAnalysis& analysis, double rel) {
    double peak = 0.0;
    for (const auto& a : analysis.coefficients)
        peak = std::max(peak, std::abs(a));
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < analysis.coefficients.size(); ++i)
        if (std::abs(analysis.coefficients[i]) > rel * peak)
            idx.push_back(i);
    return select(analysis, std::move(idx));
}

StrideAnalysis analyze_stride(SampleSource& source, SampleIndex start, SampleIndex stride,
                              const StrideOptions& options) {
    StrideAnalysis out;
    out.start = start;
    out.stride = stride;
    const RankEstimate rank = detect_order(source, start, stride, options.shape, options.rank_tol);
    out.rank_profile = rank.singular_values;
    out.n_detected = options.order.value_or(rank.rank);
    if (out.n_detected == 0)
        throw OrderMismatch(1, 0);
    out.eigenvalues =
        extract_eigenvalues(source, out.n_detected, start, stride, options.shape, options.backend);
    const std::size_t rows = options.vandermonde_rows ? options.vandermonde_rows
                                                      : options.shape.rows + options.shape.cols;
    auto fit = extract_coefficients(out.eigenvalues, source, rows, start, stride);
    out.coefficients = std::move(fit.coefficients);
    out.ill_conditioned = fit.ill_conditioned;
    return out;
}

SignalModel analyze_classical(SampleSource& source, std::size_t count, std::size_t order,
                              std::size_t window, std::size_t keep, Backend backend,
                              double omega_max) {
    if (window <= order || count < window + order)
        throw Error(ErrorKind::InvalidInput, "classical analysis: window/count too small");
    StrideOptions opt;
    opt.shape = {count - window, window};
    opt.vandermonde_rows = count;
    opt.backend = backend;
    opt.order = order;
    StrideAnalysis sa = analyze_stride(source, 0, 1, opt);
    sa = filter_by_amplitude(sa, std::min(keep, sa.coefficients.size()));

    const double delta = source.delta();
    SignalModel model;
    model.omega_max = omega_max;
    for (std::size_t i = 0; i < sa.eigenvalues.size(); ++i) {
        const Complex lam = sa.eigenvalues[i];
        const double omega = wrap_frequency(std::arg(lam) / (kTwoPi * delta), 1.0 / delta);
        const double psi = std::log(std::abs(lam)) / delta;
        model.terms.push_back(ExponentialTerm::from_alpha(sa.coefficients[i], psi, omega));
    }
    std::sort(model.terms.begin(), model.terms.end(),
              [](const auto& a, const auto& b) { return a.omega < b.omega; });
    return model;
}

}  // namespace coprony
