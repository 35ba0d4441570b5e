#include "coprony/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "coprony/errors.hpp"

namespace coprony {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::SampleUnavailable: return "sample-unavailable";
    case ErrorKind::OrderMismatch: return "order-mismatch";
    case ErrorKind::NotCoprime: return "not-coprime";
    case ErrorKind::InvalidEigenvalue: return "invalid-eigenvalue";
    case ErrorKind::InvalidSchedule: return "invalid-schedule";
    case ErrorKind::InvalidCalibration: return "invalid-calibration";
    case ErrorKind::DegenerateCoefficient: return "degenerate-coefficient";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::InconclusiveOrder: return "inconclusive-order";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

SampleReader reader_from(std::span<const Complex> samples) {
    return [samples](SampleIndex j) -> Complex {
        if (j < 0 || static_cast<std::size_t>(j) >= samples.size())
            throw SampleUnavailable(j);
        return samples[static_cast<std::size_t>(j)];
    };
}

ComplexMatrix build_hankel(const SampleReader& samples, std::size_t rows, std::size_t cols,
                           SampleIndex start, SampleIndex stride) {
    // Read each anti-diagonal once.
    std::vector<Complex> diag(rows + cols - 1);
    for (std::size_t d = 0; d < diag.size(); ++d)
        diag[d] = samples(start + static_cast<SampleIndex>(d) * stride);

    ComplexMatrix h(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = diag[i + j];
    return h;
}

ComplexMatrix build_hankel(std::span<const Complex> seq, std::size_t rows, std::size_t cols,
                           std::size_t start) {
    if (start + rows + cols - 1 > seq.size())
        throw SampleUnavailable(static_cast<SampleIndex>(start + rows + cols - 2));
    ComplexMatrix h(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = seq[start + i + j];
    return h;
}

namespace {

void require_finite(const ComplexMatrix& m) {
    if (!m.allFinite())
        throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
}

}  // namespace

std::vector<double> singular_values(const ComplexMatrix& m) {
    require_finite(m);
    if (m.size() == 0)
        return {};
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

RankEstimate rank_above(const ComplexMatrix& m, double threshold) {
    RankEstimate est;
    est.singular_values = singular_values(m);
    est.rel_tol = 0.0;
    for (double s : est.singular_values)
        if (s > threshold)
            ++est.rank;
    return est;
}

RankEstimate numerical_rank(const ComplexMatrix& m, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw Error(ErrorKind::InvalidInput, "rel_tol must lie in (0, 1)");
    RankEstimate est;
    est.singular_values = singular_values(m);
    est.rel_tol = rel_tol;
    if (est.singular_values.empty() || est.singular_values.front() < kZeroFloor)
        return est;
    const double cut = rel_tol * est.singular_values.front();
    for (double s : est.singular_values)
        if (s > cut)
            ++est.rank;
    return est;
}

LeastSquaresSolver::LeastSquaresSolver(const ComplexMatrix& a)
    : a_(a), cod_(a), rows_(a.rows()), cols_(a.cols()), ill_conditioned_(false) {
    require_finite(a);
    if (a.cols() < 1 || a.rows() < a.cols())
        throw Error(ErrorKind::InvalidInput, "least squares needs rows >= cols >= 1");
    const Eigen::Index rank = cod_.rank();
    ill_conditioned_ = rank < a.cols();
    if (!ill_conditioned_) {
        // Pivoted QR diagonal gives a cheap condition estimate.
        const auto r = cod_.matrixQTZ().diagonal().cwiseAbs();
        if (r.minCoeff() < 1e-12 * r.maxCoeff())
            ill_conditioned_ = true;
    }
}

LeastSquaresResult LeastSquaresSolver::solve(const ComplexVector& b) const {
    if (b.size() != rows_)
        throw Error(ErrorKind::InvalidInput, "right-hand side length does not match rows");
    LeastSquaresResult out;
    out.x = cod_.solve(b);
    out.rank = static_cast<std::size_t>(cod_.rank());
    out.ill_conditioned = ill_conditioned_;
    return out;
}

LeastSquaresResult solve_least_squares(const ComplexMatrix& a, const ComplexVector& b) {
    return LeastSquaresSolver(a).solve(b);
}

namespace {

std::vector<Complex> eigenvalues_of(const ComplexMatrix& small) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(small, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::InvalidInput, "eigenvalue iteration did not converge");
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::size_t effective_rank(const Eigen::VectorXd& s) {
    if (s.size() == 0 || s(0) < kZeroFloor)
        return 0;
    std::size_t rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > kSubspaceRankFloor * s(0))
            ++rank;
    return rank;
}

}  // namespace

std::vector<Complex> pencil_eigenvalues(const ComplexMatrix& h0, const ComplexMatrix& h1,
                                        std::size_t n) {
    require_finite(h0);
    require_finite(h1);
    if (n < 1 || h0.rows() != h1.rows() || h0.cols() != h1.cols() ||
        static_cast<std::size_t>(std::min(h0.rows(), h0.cols())) < n)
        throw Error(ErrorKind::InvalidInput, "pencil blocks must share a shape with rows, cols >= n");

    Eigen::JacobiSVD<ComplexMatrix> svd(h0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const std::size_t rank = effective_rank(s);
    if (rank < n)
        throw OrderMismatch(n, rank);

    const auto ni = static_cast<Eigen::Index>(n);
    const ComplexMatrix un = svd.matrixU().leftCols(ni);
    const ComplexMatrix vn = svd.matrixV().leftCols(ni);
    ComplexMatrix reduced = un.adjoint() * h1 * vn;
    for (Eigen::Index i = 0; i < ni; ++i)
        reduced.row(i) /= s(i);
    return eigenvalues_of(reduced);
}

std::vector<Complex> pencil_eigenvalues(const SampleReader& samples, std::size_t n,
                                        std::size_t rows, SampleIndex start, SampleIndex stride,
                                        std::size_t cols) {
    if (cols == 0)
        cols = n;
    if (n < 1 || rows < n || cols < n)
        throw Error(ErrorKind::InvalidInput, "pencil needs rows >= n and cols >= n >= 1");
    // One pass over the union of both blocks.
    ComplexMatrix full = build_hankel(samples, rows, cols + 1, start, stride);
    const auto ci = static_cast<Eigen::Index>(cols);
    return pencil_eigenvalues(full.leftCols(ci), full.rightCols(ci), n);
}

std::vector<Complex> esprit_eigenvalues(const SampleReader& samples, std::size_t n,
                                        std::size_t window, std::size_t count,
                                        SampleIndex start, SampleIndex stride) {
    if (n < 1 || window <= n || count < window + n)
        throw Error(ErrorKind::InvalidInput, "ESPRIT needs window > n and enough samples");
    const std::size_t rows = count - window + 1;
    const ComplexMatrix x = build_hankel(samples, rows, window, start, stride);
    require_finite(x);

    Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeThinU);
    const std::size_t rank = effective_rank(svd.singularValues());
    if (rank < n)
        throw OrderMismatch(n, rank);

    const auto ni = static_cast<Eigen::Index>(n);
    const auto ri = static_cast<Eigen::Index>(rows);
    const ComplexMatrix un = svd.matrixU().leftCols(ni);
    const ComplexMatrix upper = un.topRows(ri - 1);
    const ComplexMatrix lower = un.bottomRows(ri - 1);
    const ComplexMatrix rotation = upper.completeOrthogonalDecomposition().solve(lower);
    return eigenvalues_of(rotation);
}

ComplexMatrix build_vandermonde(std::span<const Complex> nodes, std::size_t rows,
                                std::size_t first_power) {
    ComplexMatrix v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Complex z = nodes[i];
        Complex p = first_power == 0 ? Complex{1.0, 0.0}
                                     : std::pow(z, static_cast<double>(first_power));
        for (std::size_t j = 0; j < rows; ++j) {
            v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p;
            p *= z;
        }
    }
    return v;
}

}  // namespace coprony
