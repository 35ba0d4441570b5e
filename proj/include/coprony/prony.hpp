#pragma once

// Classical exponential analysis on a single uniform grid f_{start + j*stride}.

#include <optional>
#include <vector>

#include "coprony/linalg.hpp"
#include "coprony/model.hpp"

namespace coprony {

enum class Backend { Pencil, Esprit };

const char* to_string(Backend b);

struct HankelShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

// (M - N) x N, the default rectangular Hankel on M base-grid samples.
HankelShape base_shape(const SamplingScheme& scheme);

struct StrideAnalysis {
    SampleIndex start = 0;
    SampleIndex stride = 1;
    std::size_t n_detected = 0;
    std::vector<Complex> eigenvalues;   // lambda^stride
    std::vector<Complex> coefficients;  // alpha, paired by position with eigenvalues
    std::vector<double> rank_profile;   // singular values used for detection
    bool ill_conditioned = false;
};

RankEstimate detect_order(SampleSource& source, SampleIndex start, SampleIndex stride,
                          HankelShape shape, double rel_tol = kNoisyRankTol);

// Rank of H_N^(start) in its (M - N) x N form.
RankEstimate detect_order(SampleSource& source, const SamplingScheme& scheme, SampleIndex start,
                          SampleIndex stride, double rel_tol = kNoisyRankTol);

// Both backends read the same rows + cols samples.
std::vector<Complex> extract_eigenvalues(SampleSource& source, std::size_t n, SampleIndex start,
                                         SampleIndex stride, HankelShape shape, Backend backend);

struct CoefficientFit {
    std::vector<Complex> coefficients;
    bool ill_conditioned = false;
};

// Least-squares Vandermonde solve against f_{start + j*stride}, j < rows.
CoefficientFit extract_coefficients(std::span<const Complex> eigenvalues, SampleSource& source,
                                    std::size_t rows, SampleIndex start, SampleIndex stride);

// Keeps the `keep` entries of largest |alpha|, preserving their relative order.
StrideAnalysis filter_by_amplitude(const StrideAnalysis& analysis, std::size_t keep);

// Keeps entries with |alpha| > rel * max |alpha|.
StrideAnalysis filter_by_relative_amplitude(const StrideAnalysis& analysis, double rel = 0.05);

struct StrideOptions {
    HankelShape shape;
    std::size_t vandermonde_rows = 0;
    Backend backend = Backend::Pencil;
    double rank_tol = kNoisyRankTol;
    std::optional<std::size_t> order;  // fixed order instead of the detected rank
};

// detect_order + extract_eigenvalues + extract_coefficients on one grid.
StrideAnalysis analyze_stride(SampleSource& source, SampleIndex start, SampleIndex stride,
                              const StrideOptions& options);

// Single-grid analysis at stride 1 on `count` consecutive samples, returning
// the `keep` strongest terms with frequencies wrapped into [0, 1/delta).
SignalModel analyze_classical(SampleSource& source, std::size_t count, std::size_t order,
                              std::size_t window, std::size_t keep, Backend backend,
                              double omega_max);

}  // namespace coprony
