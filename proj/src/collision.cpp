#include "coprony/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coprony {

namespace {

HankelShape probe_shape(const SamplingScheme& scheme) {
    const std::size_t cols = scheme.m / 2;
    return {scheme.m - cols, cols};
}

ComplexVector view_rhs(SampleSource& source, const SamplingScheme& scheme, SampleIndex k,
                       std::size_t rows) {
    ComplexVector rhs(static_cast<Eigen::Index>(rows));
    for (std::size_t j = 0; j < rows; ++j)
        rhs(static_cast<Eigen::Index>(j)) =
            source.sample(shifted_index(scheme, static_cast<SampleIndex>(j), k));
    return rhs;
}

SampleIndex probe_limit(const SamplingScheme& scheme) {
    return std::min<SampleIndex>(2 * static_cast<SampleIndex>(scheme.N) - 1,
                                 static_cast<SampleIndex>(scheme.K_max));
}

}  // namespace

StageA0Result stage_a0(SampleSource& source, const SamplingScheme& scheme,
                       const AnalysisOptions& options) {
    StageA0Result out;
    const auto base = detect_order(source, scheme, 0, scheme.r, options.rank_tol);
    out.probes.push_back({0, base.rank, base.singular_values});

    std::size_t best = base.rank;
    SampleIndex best_k = 0;
    const HankelShape shape = probe_shape(scheme);
    if (shape.cols >= 1) {
        int stale = 0;
        for (SampleIndex k = 1; k <= probe_limit(scheme) && stale < 2; ++k) {
            const auto est = numerical_rank(
                build_hankel(source.reader(), shape.rows, shape.cols,
                             shifted_index(scheme, 0, k), scheme.r),
                options.rank_tol);
            out.probes.push_back({k, est.rank, est.singular_values});
            if (est.rank > best) {
                best = est.rank;
                best_k = k;
                stale = 0;
            } else {
                ++stale;
            }
        }
    }

    if (best == 0)
        throw OrderMismatch(1, 0);
    if (best > scheme.N)
        throw Error(ErrorKind::BudgetExceeded,
                    "collided order " + std::to_string(best) + " exceeds N = " +
                        std::to_string(scheme.N) + "; raise N");
    out.n0 = best;
    out.eigen_shift = best_k;
    if (best_k == 0) {
        out.lambda0 = extract_eigenvalues(source, best, 0, scheme.r, base_shape(scheme),
                                          options.backend);
    } else {
        out.lambda0 = extract_eigenvalues(source, best, shifted_index(scheme, 0, best_k),
                                          scheme.r, shape, options.backend);
    }

    const CoefficientViewer viewer(out.lambda0, scheme);
    out.alpha0 = viewer.view(source, 0);
    out.ill_conditioned = LeastSquaresSolver(build_vandermonde(out.lambda0, scheme.M))
                              .ill_conditioned();
    return out;
}

CoefficientViewer::CoefficientViewer(std::span<const Complex> lambda0,
                                     const SamplingScheme& scheme)
    : scheme_(scheme),
      base_(build_vandermonde(lambda0, std::max(scheme.M, lambda0.size()))),
      shifted_(build_vandermonde(lambda0, std::max(scheme.m, lambda0.size()))) {}

CoefficientViewer::Fit CoefficientViewer::view_fit(SampleSource& source, SampleIndex k) const {
    if (k < 0)
        throw Error(ErrorKind::InvalidSchedule, "coefficient view needs k >= 0");
    const LeastSquaresSolver& solver = k == 0 ? base_ : shifted_;
    const auto rows = static_cast<std::size_t>(solver.rows());
    const ComplexVector rhs = view_rhs(source, scheme_, k, rows);
    const auto sol = solver.solve(rhs);
    Fit fit;
    fit.coefficients.assign(sol.x.data(), sol.x.data() + sol.x.size());
    const auto n = static_cast<std::size_t>(solver.cols());
    if (rows > n) {
        // per-sample variance from the residual, then ~1/rows for each coefficient
        const double res = (solver.matrix() * sol.x - rhs).squaredNorm();
        fit.noise = std::sqrt(res / static_cast<double>(rows - n) / static_cast<double>(rows));
    }
    return fit;
}

std::vector<Complex> CoefficientViewer::view(SampleSource& source, SampleIndex k) const {
    return view_fit(source, k).coefficients;
}

std::vector<Complex> coefficient_views(std::span<const Complex> lambda0, SampleSource& source,
                                       const SamplingScheme& scheme, SampleIndex k) {
    return CoefficientViewer(lambda0, scheme).view(source, k);
}

GroupOrder group_order(std::span<const Complex> alpha_seq, double rel_tol, double zero_floor,
                       double noise_level) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw Error(ErrorKind::InvalidInput, "group_order: rel_tol must lie in (0, 1)");
    GroupOrder out;
    const std::size_t len = alpha_seq.size();
    for (std::size_t kappa = 1;; ++kappa) {
        if (2 * kappa + 1 > len) {
            out.required_length = 2 * kappa + 1;
            return out;
        }
        const auto outer = build_hankel(alpha_seq, kappa + 1, kappa + 1);
        const auto sv_outer = singular_values(outer);
        const double thr =
            std::max({rel_tol * sv_outer.front(), zero_floor, kZeroFloor,
                      noise_level * std::sqrt(static_cast<double>(kappa + 1))});
        const std::size_t r_in = rank_above(build_hankel(alpha_seq, kappa, kappa), thr).rank;
        const std::size_t r_out = static_cast<std::size_t>(
            std::count_if(sv_outer.begin(), sv_outer.end(), [&](double s) { return s > thr; }));
        if (out.rank_profile.size() < kappa)
            out.rank_profile.push_back(r_in);
        out.rank_profile.push_back(r_out);
        if (r_in == kappa && r_out == kappa) {
            out.multiplicity = kappa;
            out.required_length = 2 * kappa + 1;
            return out;
        }
    }
}

InnerTerms group_disentangle(const CollisionGroup& group) {
    const std::size_t n = group.multiplicity;
    const std::size_t len = group.alpha_seq.size();
    if (n == 0)
        throw Error(ErrorKind::InvalidInput, "group_disentangle: multiplicity unknown");
    if (len < 2 * n)
        throw Error(ErrorKind::InvalidInput, "group_disentangle: need 2 * multiplicity views");
    const std::size_t cols = len / 2;
    const std::size_t rows = len - cols;

    InnerTerms out;
    const auto reader = reader_from(group.alpha_seq);
    out.eigenvalues = pencil_eigenvalues(reader, n, rows, 0, 1, cols);

    ComplexVector rhs(static_cast<Eigen::Index>(len));
    for (std::size_t k = 0; k < len; ++k)
        rhs(static_cast<Eigen::Index>(k)) = group.alpha_seq[k];
    const auto sol = solve_least_squares(build_vandermonde(out.eigenvalues, len), rhs);
    out.coefficients.assign(sol.x.data(), sol.x.data() + sol.x.size());

    if (out.coefficients.size() > n) {
        std::vector<std::size_t> idx(out.coefficients.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(out.coefficients[a]) > std::abs(out.coefficients[b]);
        });
        idx.resize(n);
        std::sort(idx.begin(), idx.end());
        InnerTerms kept;
        for (std::size_t i : idx) {
            kept.eigenvalues.push_back(out.eigenvalues[i]);
            kept.coefficients.push_back(out.coefficients[i]);
        }
        return kept;
    }
    return out;
}

StageError::StageError(std::string stage, const Error& cause, RecoveryReport partial)
    : Error(cause.kind(), stage + ": " + cause.what()),
      stage_(std::move(stage)),
      cause_(cause.kind()),
      partial_(std::move(partial)) {
    if (const auto* miss = dynamic_cast<const SampleUnavailable*>(&cause))
        missing_ = miss->index();
}

RecoveryReport analyze_full(SampleSource& source, const SamplingScheme& scheme, double omega_max,
                            const AnalysisOptions& options) {
    scheme.validate(omega_max);
    RecoveryReport report;
    report.recombination_method = options.recombination;
    report.terms.omega_max = omega_max;

    const auto fail = [&](const char* stage, const Error& e) -> StageError {
        report.samples_consumed = source.consumed_count();
        return StageError(stage, e, report);
    };

    StageA0Result a0;
    try {
        a0 = stage_a0(source, scheme, options);
    } catch (const Error& e) {
        throw fail("A0", e);
    }
    report.n0 = a0.n0;
    report.probes = a0.probes;
    if (a0.ill_conditioned)
        report.warnings.push_back("A0: ill-conditioned Vandermonde solve");

    const std::size_t n0 = a0.n0;
    std::vector<std::vector<Complex>> seqs(n0);
    for (std::size_t i = 0; i < n0; ++i)
        seqs[i].push_back(a0.alpha0[i]);

    std::optional<CoefficientViewer> viewer;
    try {
        viewer.emplace(a0.lambda0, scheme);
    } catch (const Error& e) {
        throw fail("A1 views", e);
    }
    const auto kmax = static_cast<SampleIndex>(scheme.K_max);
    SampleIndex have = 0;  // views 0..have are in seqs
    double noise_sq = 0.0;  // sum of squared per-view noise estimates, k >= 1
    const auto extend_to = [&](SampleIndex k) {
        for (; have < k; ) {
            ++have;
            const auto v = viewer->view_fit(source, have);
            noise_sq += v.noise * v.noise;
            for (std::size_t i = 0; i < n0; ++i)
                seqs[i].push_back(v.coefficients[i]);
        }
    };
    const auto view_noise = [&] {
        return have > 0 ? std::sqrt(noise_sq / static_cast<double>(have)) : 0.0;
    };

    try {
        if (options.eager_views)
            extend_to(kmax);
    } catch (const Error& e) {
        throw fail("A1 views", e);
    }

    // Largest view magnitude over all groups. A group is only dropped when all
    // of its views stay below inner_rank_tol times this value.
    const auto view_peak = [&] {
        double peak = 0.0;
        for (const auto& s : seqs)
            for (const auto& a : s)
                peak = std::max(peak, std::abs(a));
        return peak;
    };

    std::vector<GroupOrder> orders(n0);
    std::vector<bool> done(n0, false);
    try {
        for (;;) {
            const double peak = view_peak();
            const double floor = options.inner_rank_tol * peak;
            SampleIndex need = have;
            bool pending = false;
            for (std::size_t i = 0; i < n0; ++i) {
                if (done[i])
                    continue;
                orders[i] = group_order(seqs[i], options.inner_rank_tol, kSubspaceRankFloor * peak,
                                        options.noise_factor * view_noise());
                if (orders[i].multiplicity) {
                    done[i] = true;
                    continue;
                }
                pending = true;
                need = std::max(need, static_cast<SampleIndex>(orders[i].required_length) - 1);
            }
            if (!pending)
                break;
            if (need > kmax || need == have) {
                // Remaining groups hit K_max without a plateau.
                for (std::size_t i = 0; i < n0; ++i) {
                    if (done[i])
                        continue;
                    const bool empty = std::all_of(seqs[i].begin(), seqs[i].end(), [&](Complex a) {
                        return !(std::abs(a) > floor);
                    });
                    if (!empty)
                        throw InconclusiveOrder(
                            "group " + std::to_string(i) + ": no rank plateau up to K_max = " +
                                std::to_string(scheme.K_max),
                            orders[i].rank_profile);
                    report.warnings.push_back("dropped group " + std::to_string(i) +
                                              ": coefficient views stay below tolerance");
                    done[i] = true;
                    orders[i].multiplicity = 0;
                }
                break;
            }
            extend_to(need);
        }
    } catch (const Error& e) {
        throw fail("A1 order", e);
    }
    report.views = static_cast<std::size_t>(have) + 1;
    report.view_noise = view_noise();

    for (std::size_t i = 0; i < n0; ++i) {
        if (orders[i].multiplicity.value_or(0) == 0)
            continue;
        CollisionGroup g;
        g.lambda0 = a0.lambda0[i];
        g.alpha_seq = seqs[i];
        g.multiplicity = *orders[i].multiplicity;
        g.rank_profile = orders[i].rank_profile;
        try {
            auto inner = group_disentangle(g);
            g.inner_eigenvalues = std::move(inner.eigenvalues);
            g.inner_coefficients = std::move(inner.coefficients);
        } catch (const Error& e) {
            throw fail("A1 disentangle", e);
        }
        report.groups.push_back(std::move(g));
    }

    try {
        for (std::size_t gi = 0; gi < report.groups.size(); ++gi) {
            const auto& g = report.groups[gi];
            const double psi = recover_damping(g.lambda0, scheme.r, scheme.delta);
            for (std::size_t l = 0; l < g.multiplicity; ++l) {
                const auto match = recombine(g.lambda0, g.inner_eigenvalues[l], scheme.r,
                                             scheme.rho, omega_max, scheme.delta,
                                             options.recombination);
                RecoveredTerm t;
                t.term = ExponentialTerm::from_alpha(g.inner_coefficients[l], psi, match.omega);
                t.group = gi;
                t.lambda0 = g.lambda0;
                t.lambda1 = g.inner_eigenvalues[l];
                t.gap = match.gap;
                report.details.push_back(t);
            }
        }
    } catch (const Error& e) {
        throw fail("output", e);
    }
    std::stable_sort(report.details.begin(), report.details.end(),
                     [](const RecoveredTerm& a, const RecoveredTerm& b) {
                         return a.term.omega < b.term.omega;
                     });
    for (const auto& d : report.details)
        report.terms.terms.push_back(d.term);
    report.samples_consumed = source.consumed_count();
    return report;
}

}  // namespace coprony
