#pragma once

// Structured matrices and the small set of dense kernels the analysis is
// built on: Hankel/Vandermonde construction, SVD rank, least squares and
// the two eigenvalue extractors (matrix pencil, ESPRIT).

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace coprony {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using SampleIndex = std::int64_t;

// Indexed access to f_j. Throws SampleUnavailable for indices it cannot serve.
using SampleReader = std::function<Complex(SampleIndex)>;

// Reader over a contiguous buffer f_0, f_1, ...; the span must outlive the reader.
SampleReader reader_from(std::span<const Complex> samples);

inline constexpr double kNoiselessRankTol = 1e-10;
inline constexpr double kNoisyRankTol = 1e-1;
inline constexpr double kZeroFloor = 1e-300;
// Relative floor below which the pencil/ESPRIT subspace is considered rank deficient.
inline constexpr double kSubspaceRankFloor = 1e-13;

struct RankEstimate {
    std::size_t rank = 0;
    std::vector<double> singular_values;  // nonincreasing
    double rel_tol = 0.0;
};

// entry (i, j) = samples[start + (i + j) * stride]
ComplexMatrix build_hankel(const SampleReader& samples, std::size_t rows, std::size_t cols,
                           SampleIndex start, SampleIndex stride);

// Same as above over an in-memory sequence (used for the coefficient views).
ComplexMatrix build_hankel(std::span<const Complex> seq, std::size_t rows, std::size_t cols,
                           std::size_t start = 0);

// rank = #{k : sigma_k > rel_tol * sigma_1}; zero when sigma_1 < kZeroFloor.
RankEstimate numerical_rank(const ComplexMatrix& m, double rel_tol);

// rank = #{k : sigma_k > threshold}.
RankEstimate rank_above(const ComplexMatrix& m, double threshold);

std::vector<double> singular_values(const ComplexMatrix& m);

struct LeastSquaresResult {
    ComplexVector x;
    std::size_t rank = 0;
    bool ill_conditioned = false;
};

// Rank-revealing (complete orthogonal decomposition) solve, factorized once
// and reused for several right-hand sides.
class LeastSquaresSolver {
public:
    explicit LeastSquaresSolver(const ComplexMatrix& a);

    LeastSquaresResult solve(const ComplexVector& b) const;

    const ComplexMatrix& matrix() const { return a_; }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    bool ill_conditioned() const { return ill_conditioned_; }

private:
    ComplexMatrix a_;
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    bool ill_conditioned_;
};

LeastSquaresResult solve_least_squares(const ComplexMatrix& a, const ComplexVector& b);

// Generalized eigenvalues of H1 v = lambda H0 v after projecting both blocks onto
// the rank-n dominant subspace of H0 (H0, H1 of equal shape, rows, cols >= n).
std::vector<Complex> pencil_eigenvalues(const ComplexMatrix& h0, const ComplexMatrix& h1,
                                        std::size_t n);

// Shifted/unshifted Hankel pencil of shape rows x cols (cols defaults to n)
// filled from samples[start + (i + j) * stride].
std::vector<Complex> pencil_eigenvalues(const SampleReader& samples, std::size_t n,
                                        std::size_t rows, SampleIndex start, SampleIndex stride,
                                        std::size_t cols = 0);

// ESPRIT on the Hankel data matrix with `window` columns built from `count`
// samples; signal subspace of dimension n, shift invariance solved in least squares.
std::vector<Complex> esprit_eigenvalues(const SampleReader& samples, std::size_t n,
                                        std::size_t window, std::size_t count,
                                        SampleIndex start, SampleIndex stride);

// entry (j, i) = nodes[i]^(first_power + j)
ComplexMatrix build_vandermonde(std::span<const Complex> nodes, std::size_t rows,
                                std::size_t first_power = 0);

}  // namespace coprony
