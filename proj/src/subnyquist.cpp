#include "coprony/subnyquist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <tuple>

#include "coprony/errors.hpp"

namespace coprony {

const char* to_string(Recombination r) {
    switch (r) {
    case Recombination::Euclid:
        return "euclid";
    case Recombination::Anchored:
        return "anchored";
    default:
        return "nearest";
    }
}

namespace {

// x * a + y * b = gcd(a, b) for a, b >= 0.
void extended_euclid(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::tie(old_r, r) = std::pair{r, old_r - q * r};
        std::tie(old_s, s) = std::pair{s, old_s - q * s};
        std::tie(old_t, t) = std::pair{t, old_t - q * t};
    }
    x = old_s;
    y = old_t;
}

double unit_cycles(Complex z) {
    // arg(z) / 2pi in [0, 1)
    double c = std::arg(z) / kTwoPi;
    if (c < 0.0)
        c += 1.0;
    if (c >= 1.0)
        c -= 1.0;
    return c;
}

Complex require_nonzero(Complex z) {
    if (!(std::abs(z) > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(ErrorKind::InvalidEigenvalue, "eigenvalue must be finite and nonzero");
    return z;
}

Complex de_damp(Complex z) {
    require_nonzero(z);
    return z / std::abs(z);
}

}  // namespace

BezoutPair bezout(std::int64_t r, std::int64_t rho, std::int64_t omega_max) {
    if (r == 0 || rho == 0 || gcd_abs(r, rho) != 1)
        throw Error(ErrorKind::NotCoprime, "bezout: gcd(" + std::to_string(r) + ", " +
                                               std::to_string(rho) + ") != 1");
    const std::int64_t ar = std::abs(r), arho = std::abs(rho);
    std::int64_t x = 0, y = 0;
    extended_euclid(ar, arho, x, y);
    // Back to signed factors: x0 * r + y0 * rho = 1.
    const std::int64_t x0 = r < 0 ? -x : x;
    const std::int64_t y0 = rho < 0 ? -y : y;

    // All solutions: (x0 + t*rho, y0 - t*r). The cost |p1| + |p2| is convex in t;
    // its minimum sits near one of the two kinks.
    const auto cost = [&](std::int64_t t) {
        return std::abs(x0 + t * rho) + std::abs(y0 - t * r);
    };
    const double k1 = -static_cast<double>(x0) / static_cast<double>(rho);
    const double k2 = static_cast<double>(y0) / static_cast<double>(r);
    const auto lo = static_cast<std::int64_t>(std::floor(std::min(k1, k2))) - 1;
    const auto hi = static_cast<std::int64_t>(std::ceil(std::max(k1, k2))) + 1;
    std::int64_t best = lo;
    for (std::int64_t t = lo; t <= hi; ++t) {
        const auto c = cost(t), cb = cost(best);
        if (c < cb || (c == cb && std::abs(x0 + t * rho) < std::abs(x0 + best * rho)))
            best = t;
    }
    BezoutPair pair{x0 + best * rho, y0 - best * r, r, rho, omega_max};
    return pair;
}

std::vector<double> CandidateSet::candidates() const {
    std::vector<double> out(static_cast<std::size_t>(factor));
    for (std::int64_t k = 0; k < factor; ++k)
        out[static_cast<std::size_t>(k)] = base + static_cast<double>(k) * spacing();
    return out;
}

CandidateSet candidate_set(Complex lambda_pow, std::int64_t factor, double /*omega_max*/,
                           double delta) {
    require_nonzero(lambda_pow);
    if (factor == 0)
        throw Error(ErrorKind::InvalidInput, "candidate set needs a nonzero factor");
    if (factor < 0) {
        lambda_pow = 1.0 / lambda_pow;
        factor = -factor;
    }
    CandidateSet set;
    set.factor = factor;
    set.period = 1.0 / delta;
    set.base = unit_cycles(lambda_pow) * set.spacing();
    return set;
}

double recombine_euclid(Complex lambda_r, Complex lambda_rho, const BezoutPair& pair,
                        double delta) {
    const double cr = std::arg(de_damp(lambda_r)) / kTwoPi;
    const double crho = std::arg(de_damp(lambda_rho)) / kTwoPi;
    // The integer h of the identity is absorbed by the reduction mod 1.
    double x = static_cast<double>(pair.p1) * cr + static_cast<double>(pair.p2) * crho;
    x -= std::floor(x);
    return wrap_frequency(x / delta, 1.0 / delta);
}

NearestMatch recombine_nearest(Complex lambda_r, Complex lambda_rho, std::int64_t r,
                               std::int64_t rho, double omega_max, double delta) {
    if (r == 0 || rho == 0 || gcd_abs(r, rho) != 1)
        throw Error(ErrorKind::NotCoprime, "recombine_nearest needs coprime factors");
    const CandidateSet a = candidate_set(de_damp(lambda_r), r, omega_max, delta);
    const CandidateSet b = candidate_set(de_damp(lambda_rho), rho, omega_max, delta);
    const double period = a.period;
    const double bcycles = b.base / b.spacing();  // in [0, 1)

    NearestMatch best{0.0, std::numeric_limits<double>::infinity()};
    for (std::int64_t k = 0; k < a.factor; ++k) {
        const double ak = a.base + static_cast<double>(k) * a.spacing();
        // Closest member of the b lattice (spacing period / b.factor) to ak.
        const double l = std::round(ak / b.spacing() - bcycles);
        const double bl = (bcycles + l) * b.spacing();
        const double diff = bl - ak;
        const double gap = std::abs(diff);
        if (gap < best.gap) {
            best.gap = gap;
            best.omega = wrap_frequency(ak + 0.5 * diff, period);
            best.anchor = wrap_frequency(ak, period);
        }
    }
    return best;
}

double recover_damping(Complex lambda_r, std::int64_t r, double delta) {
    require_nonzero(lambda_r);
    return std::log(std::abs(lambda_r)) / (static_cast<double>(r) * delta);
}

NearestMatch recombine(Complex lambda_r, Complex lambda_rho, std::int64_t r, std::int64_t rho,
                       double omega_max, double delta, Recombination method) {
    if (method == Recombination::Nearest)
        return recombine_nearest(lambda_r, lambda_rho, r, rho, omega_max, delta);
    if (method == Recombination::Anchored) {
        auto match = recombine_nearest(lambda_r, lambda_rho, r, rho, omega_max, delta);
        match.omega = match.anchor;
        return match;
    }
    const auto pair = bezout(r, rho, static_cast<std::int64_t>(omega_max));
    return {recombine_euclid(lambda_r, lambda_rho, pair, delta), 0.0};
}

std::vector<Complex> shift_pair(const StrideAnalysis& base, SampleSource& source,
                                const SamplingScheme& scheme, std::size_t h_offset,
                                std::size_t rows) {
    const std::size_t n = base.eigenvalues.size();
    if (base.coefficients.size() != n || n == 0)
        throw Error(ErrorKind::InvalidInput, "shift_pair needs a nonempty paired analysis");
    if (rows == 0)
        rows = std::max(scheme.m, n);

    double peak = 0.0;
    for (const auto& a : base.coefficients)
        peak = std::max(peak, std::abs(a));
    for (std::size_t i = 0; i < n; ++i)
        if (!(std::abs(base.coefficients[i]) > kDegenerateCoefficientTol * peak))
            throw DegenerateCoefficient(i);

    ComplexVector rhs(static_cast<Eigen::Index>(rows));
    for (std::size_t j = 0; j < rows; ++j) {
        const auto jj = static_cast<SampleIndex>(h_offset + j);
        rhs(static_cast<Eigen::Index>(j)) = source.sample(shifted_index(scheme, jj, 1));
    }
    const auto sol = solve_least_squares(build_vandermonde(base.eigenvalues, rows, h_offset), rhs);

    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = sol.x(static_cast<Eigen::Index>(i)) / base.coefficients[i];
    return out;
}

CollisionFreeResult analyze_collision_free(SampleSource& source, const SamplingScheme& scheme,
                                           double omega_max, const CollisionFreeOptions& options) {
    scheme.validate(omega_max);
    CollisionFreeResult out;

    out.base_rank = detect_order(source, scheme, 0, scheme.r, options.rank_tol);
    const std::size_t order = std::min(out.base_rank.rank, scheme.N);
    if (order == 0)
        throw OrderMismatch(1, 0);

    StrideOptions sopt;
    sopt.shape = base_shape(scheme);
    sopt.vandermonde_rows = scheme.M;
    sopt.backend = options.backend;
    sopt.rank_tol = options.rank_tol;
    sopt.order = order;
    const StrideAnalysis sa = analyze_stride(source, 0, scheme.r, sopt);

    const std::vector<Complex> lam_rho =
        shift_pair(sa, source, scheme, options.shift_offset, std::max(scheme.m, order));

    std::vector<std::size_t> idx(order);
    std::iota(idx.begin(), idx.end(), 0);
    if (options.keep && *options.keep < order) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(sa.coefficients[a]) > std::abs(sa.coefficients[b]);
        });
        idx.resize(*options.keep);
    }

    struct Row {
        ExponentialTerm term;
        Complex lr, lrho, alpha;
        double gap;
    };
    std::vector<Row> rows;
    for (std::size_t i : idx) {
        const Complex lr = sa.eigenvalues[i];
        const Complex lrho = lam_rho[i];
        const NearestMatch match = recombine(lr, lrho, scheme.r, scheme.rho, omega_max,
                                             scheme.delta, options.recombination);
        const double psi = recover_damping(lr, scheme.r, scheme.delta);
        rows.push_back({ExponentialTerm::from_alpha(sa.coefficients[i], psi, match.omega), lr,
                        lrho, sa.coefficients[i], match.gap});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.term.omega < b.term.omega; });

    out.model.omega_max = omega_max;
    for (const auto& row : rows) {
        out.model.terms.push_back(row.term);
        out.lambda_r.push_back(row.lr);
        out.lambda_rho.push_back(row.lrho);
        out.alpha.push_back(row.alpha);
        out.gaps.push_back(row.gap);
    }
    out.n_detected = rows.size();
    out.ill_conditioned = sa.ill_conditioned;
    out.samples_consumed = source.consumed_count();
    return out;
}

}  // namespace coprony
