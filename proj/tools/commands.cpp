#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "coprony/collision.hpp"
#include "coprony/errors.hpp"
#include "coprony/subnyquist.hpp"

namespace coprony::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 12 significant digits for every emitted number.
double r12(double x) {
    if (!std::isfinite(x))
        return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json complex_json(Complex z) { return json::array({r12(z.real()), r12(z.imag())}); }

json complex_list(const std::vector<Complex>& zs) {
    json out = json::array();
    for (const auto& z : zs)
        out.push_back(complex_json(z));
    return out;
}

json number_list(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs)
        out.push_back(r12(x));
    return out;
}

json terms_json(const SignalModel& model) {
    json out = json::array();
    for (const auto& t : model.terms)
        out.push_back({{"psi", r12(t.psi)},
                       {"omega", r12(t.omega)},
                       {"beta", r12(t.beta)},
                       {"gamma", r12(t.gamma)}});
    return out;
}

double circular_distance(double a, double b, double period) {
    const double d = std::fabs(wrap_frequency(a - b, period));
    return std::min(d, period - d);
}

double median(std::vector<double> xs) {
    if (xs.empty())
        return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty())
        return 0.0;
    std::sort(xs.begin(), xs.end());
    const auto pos = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size()))) - 1;
    return xs[std::min(pos, xs.size() - 1)];
}

json quantiles_json(const std::vector<double>& xs) {
    return {{"median", r12(quantile(xs, 0.5))},
            {"p90", r12(quantile(xs, 0.9))},
            {"max", r12(xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end()))}};
}


void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "'");
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json full_report(const RecoveryReport& rep) {
    json groups = json::array();
    for (const auto& g : rep.groups)
        groups.push_back({{"lambda0", complex_json(g.lambda0)},
                          {"multiplicity", g.multiplicity},
                          {"rank_profile", g.rank_profile},
                          {"alpha_seq", complex_list(g.alpha_seq)},
                          {"inner_eigenvalues", complex_list(g.inner_eigenvalues)},
                          {"inner_coefficients", complex_list(g.inner_coefficients)}});
    json profiles = json::array();
    for (const auto& p : rep.probes)
        profiles.push_back({{"stage", "A0"},
                            {"k", p.k},
                            {"rank", p.rank},
                            {"singular_values", number_list(p.singular_values)}});
    return {{"pipeline", "full"},
            {"n0", rep.n0},
            {"n", rep.terms.terms.size()},
            {"terms", terms_json(rep.terms)},
            {"groups", groups},
            {"samples_consumed", rep.samples_consumed},
            {"singular_profiles", profiles},
            {"views", rep.views},
            {"view_noise", r12(rep.view_noise)},
            {"recombination_method", to_string(rep.recombination_method)},
            {"warnings", rep.warnings}};
}

json collision_free_report(const CollisionFreeResult& res, Recombination method) {
    json groups = json::array();
    for (std::size_t i = 0; i < res.lambda_r.size(); ++i)
        groups.push_back({{"lambda0", complex_json(res.lambda_r[i])},
                          {"multiplicity", 1},
                          {"inner_eigenvalues", json::array({complex_json(res.lambda_rho[i])})},
                          {"inner_coefficients", json::array({complex_json(res.alpha[i])})},
                          {"gap", r12(res.gaps[i])}});
    json profiles = json::array();
    profiles.push_back({{"stage", "base"},
                        {"k", 0},
                        {"rank", res.base_rank.rank},
                        {"singular_values", number_list(res.base_rank.singular_values)}});
    json warnings = json::array();
    if (res.ill_conditioned)
        warnings.push_back("ill-conditioned Vandermonde solve");
    return {{"pipeline", "collision_free"},
            {"n0", res.base_rank.rank},
            {"n", res.model.terms.size()},
            {"terms", terms_json(res.model)},
            {"groups", groups},
            {"samples_consumed", res.samples_consumed},
            {"singular_profiles", profiles},
            {"recombination_method", to_string(method)},
            {"warnings", warnings}};
}

void log_terms(std::ostream& log, const SignalModel& model) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-4s %16s %14s %14s %12s\n", "#", "omega", "beta", "psi",
                  "gamma");
    log << line;
    for (std::size_t i = 0; i < model.terms.size(); ++i) {
        const auto& t = model.terms[i];
        std::snprintf(line, sizeof line, "  %-4zu %16.9f %14.9f %14.9f %12.9f\n", i, t.omega,
                      t.beta, t.psi, t.gamma);
        log << line;
    }
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::Io:
    case ErrorKind::NotCoprime:
        return kExitConfig;
    case ErrorKind::SampleUnavailable:
        return kExitSampleUnavailable;
    default:
        return kExitAnalysis;
    }
}

std::set<SampleIndex> required_indices(const RunConfig& config) {
    const auto& s = config.scheme;
    std::set<SampleIndex> out;
    for (std::size_t j = 0; j < s.M; ++j)
        out.insert(shifted_index(s, static_cast<SampleIndex>(j), 0));
    const bool full = config.pipeline == Pipeline::Full;
    const std::size_t kmax = full ? s.K_max : 1;
    const std::size_t first = full ? 0 : config.shift_offset;
    for (std::size_t k = 1; k <= kmax; ++k)
        for (std::size_t j = first; j < first + s.m; ++j)
            out.insert(
                shifted_index(s, static_cast<SampleIndex>(j), static_cast<SampleIndex>(k)));
    return out;
}

SampleSource make_source(const RunConfig& config, std::uint64_t seed) {
    std::optional<NoiseSpec> noise;
    if (config.snr_db)
        noise = NoiseSpec{add_noise_calibration(config.model, config.scheme, *config.snr_db), seed};
    return SampleSource::generator(config.model, config.scheme.delta, noise);
}

std::vector<SampleIndex> missing_indices(const std::map<SampleIndex, Complex>& trace,
                                         const std::set<SampleIndex>& required) {
    std::vector<SampleIndex> out;
    for (SampleIndex j : required)
        if (!trace.count(j))
            out.push_back(j);
    return out;
}

AnalysisRun run_analysis(const RunConfig& config, SampleSource& source) {
    AnalysisRun run;
    if (config.pipeline == Pipeline::Full) {
        const auto rep = analyze_full(source, config.scheme, config.model.omega_max,
                                      config.analysis_options());
        run.terms = rep.terms;
        run.report = full_report(rep);
        run.samples_consumed = rep.samples_consumed;
    } else {
        const auto res = analyze_collision_free(source, config.scheme, config.model.omega_max,
                                                config.collision_free_options());
        run.terms = res.model;
        run.report = collision_free_report(res, config.recombination);
        run.samples_consumed = res.samples_consumed;
    }
    run.report["config"] = config_to_json(config);
    return run;
}

MatchResult match_terms(const SignalModel& truth, const SignalModel& recovered) {
    const double period = truth.omega_max;
    struct Pair {
        double dist, amp;
        std::size_t t, r;
    };
    std::vector<Pair> pairs;
    for (std::size_t t = 0; t < truth.terms.size(); ++t)
        for (std::size_t r = 0; r < recovered.terms.size(); ++r)
            pairs.push_back({circular_distance(truth.terms[t].omega, recovered.terms[r].omega, period),
                             std::fabs(truth.terms[t].beta - recovered.terms[r].beta), t, r});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return a.dist != b.dist ? a.dist < b.dist : a.amp < b.amp;
    });

    MatchResult out;
    out.errors.assign(truth.terms.size(), kInf);
    std::vector<bool> used_t(truth.terms.size()), used_r(recovered.terms.size());
    for (const auto& p : pairs) {
        if (used_t[p.t] || used_r[p.r])
            continue;
        used_t[p.t] = used_r[p.r] = true;
        out.errors[p.t] = p.dist;
    }
    out.max_error = out.errors.empty() ? 0.0 : *std::max_element(out.errors.begin(), out.errors.end());
    out.median_error = median(out.errors);
    return out;
}

void write_terms_csv(std::ostream& out, const SignalModel& model) {
    auto terms = model.terms;
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& a, const auto& b) { return a.omega < b.omega; });
    out << "omega,beta,psi,gamma\n";
    for (const auto& t : terms)
        out << fmt12(t.omega) << ',' << fmt12(t.beta) << ',' << fmt12(t.psi) << ','
            << fmt12(t.gamma) << '\n';
}

int cmd_generate(const RunConfig& config, const std::string& trace_out, std::ostream& log) {
    auto source = make_source(config, config.seed);
    std::map<SampleIndex, Complex> values;
    for (SampleIndex j : required_indices(config))
        values.emplace(j, source.sample(j));
    const fs::path path(trace_out);
    if (path.has_parent_path())
        ensure_dir(path.parent_path().string());
    auto out = open_out(path);
    write_trace_csv(out, values);
    if (!out)
        throw Error(ErrorKind::Io, "write failed for '" + trace_out + "'");
    log << "wrote " << values.size() << " samples to " << trace_out << '\n';
    return kExitOk;
}

int cmd_analyze(const RunConfig& config, const std::optional<std::string>& trace_in,
                std::ostream& log) {
    std::optional<SampleSource> source;
    if (trace_in) {
        std::ifstream in(*trace_in);
        if (!in)
            throw Error(ErrorKind::Io, "cannot open trace '" + *trace_in + "'");
        auto values = read_trace_csv(in);
        const auto missing = missing_indices(values, required_indices(config));
        if (!missing.empty()) {
            log << "trace is missing " << missing.size() << " required indices:";
            for (SampleIndex j : missing)
                log << ' ' << j;
            log << '\n';
            return kExitSampleUnavailable;
        }
        source = SampleSource::trace(std::move(values), config.scheme.delta);
    } else {
        source = make_source(config, config.seed);
    }

    AnalysisRun run;
    try {
        run = run_analysis(config, *source);
    } catch (const StageError& e) {
        log << "analysis failed in stage " << e.stage() << ": " << e.what() << '\n';
        if (e.missing_index())
            log << "missing trace index: " << *e.missing_index() << '\n';
        return exit_code_for(e);
    }

    ensure_dir(config.out_dir);
    const fs::path dir(config.out_dir);
    write_json(dir / "report.json", run.report);
    {
        auto out = open_out(dir / "terms.csv");
        write_terms_csv(out, run.terms);
    }
    log << "n0 = " << run.report["n0"].get<std::size_t>() << ", n = " << run.terms.terms.size()
        << ", samples consumed = " << run.samples_consumed << '\n';
    log_terms(log, run.terms);
    log << "wrote " << (dir / "report.json").string() << " and " << (dir / "terms.csv").string()
        << '\n';
    return kExitOk;
}

std::vector<TrialRow> run_trials(const RunConfig& config, std::size_t trials, bool baseline) {
    std::vector<TrialRow> rows(trials);
    const std::size_t budget_default = config.scheme.M + config.scheme.m;
    const auto n_true = config.model.terms.size();

    const auto run_trial = [&](std::size_t i) {
        TrialRow& row = rows[i];
        row.seed = trial_seed(config.seed, i);
        std::size_t budget = budget_default;
        try {
            auto source = make_source(config, row.seed);
            const auto run = run_analysis(config, source);
            row.sub = match_terms(config.model, run.terms);
            row.n_detected = run.terms.terms.size();
            row.success = row.sub.max_error <= config.match_window;
            budget = run.samples_consumed;
        } catch (const Error& e) {
            row.sub.errors.assign(n_true, kInf);
            row.sub.max_error = row.sub.median_error = kInf;
            row.failure = e.what();
        }
        if (baseline) {
            const std::size_t order = config.scheme.N;
            const std::size_t keep = config.keep.value_or(n_true);
            try {
                auto source = make_source(config, row.seed);
                const auto model = analyze_classical(source, budget, order, order + 1, keep,
                                                     Backend::Esprit, config.model.omega_max);
                row.base = match_terms(config.model, model);
            } catch (const Error&) {
                MatchResult m;
                m.errors.assign(n_true, kInf);
                m.max_error = m.median_error = kInf;
                row.base = m;
            }
            row.base_success = row.base->max_error <= config.match_window;
        }
    };

    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(trials, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < trials;)
                run_trial(i);
        });
    for (auto& t : pool)
        t.join();

    return rows;
}

int cmd_montecarlo(const RunConfig& config, std::size_t trials, bool baseline,
                   std::ostream& log) {
    if (trials < 1)
        throw Error(ErrorKind::Config, "montecarlo needs at least one trial");
    const auto rows = run_trials(config, trials, baseline);

    ensure_dir(config.out_dir);
    const fs::path dir(config.out_dir);
    {
        auto out = open_out(dir / "trials.csv");
        out << "seed,max_freq_err,median_freq_err,n_detected,success";
        if (baseline)
            out << ",baseline_max_freq_err,baseline_success";
        out << '\n';
        for (const auto& r : rows) {
            out << r.seed << ',' << fmt12(r.sub.max_error) << ',' << fmt12(r.sub.median_error)
                << ',' << r.n_detected << ',' << (r.success ? 1 : 0);
            if (baseline)
                out << ',' << fmt12(r.base->max_error) << ',' << (r.base_success ? 1 : 0);
            out << '\n';
        }
    }

    std::vector<double> maxes, medians, base_maxes;
    std::size_t ok = 0, base_ok = 0, better = 0, failures = 0;
    for (const auto& r : rows) {
        maxes.push_back(r.sub.max_error);
        medians.push_back(r.sub.median_error);
        ok += r.success;
        failures += !r.failure.empty();
        if (baseline) {
            base_maxes.push_back(r.base->max_error);
            base_ok += r.base_success;
            better += r.sub.max_error < r.base->max_error;
        }
    }
    const double n = static_cast<double>(trials);
    json summary = {{"trials", trials},
                    {"success_rate", r12(static_cast<double>(ok) / n)},
                    {"analysis_failures", failures},
                    {"match_window", config.match_window},
                    {"max_freq_err", quantiles_json(maxes)},
                    {"median_freq_err", quantiles_json(medians)},
                    {"config", config_to_json(config)}};
    if (baseline)
        summary["baseline"] = {{"method", "esprit"},
                               {"success_rate", r12(static_cast<double>(base_ok) / n)},
                               {"max_freq_err", quantiles_json(base_maxes)},
                               {"subnyquist_better_rate", r12(static_cast<double>(better) / n)}};
    write_json(dir / "summary.json", summary);

    log << "trials = " << trials << ", success rate = " << static_cast<double>(ok) / n
        << ", median max error = " << quantile(maxes, 0.5) << '\n';
    if (baseline)
        log << "esprit baseline success rate = " << static_cast<double>(base_ok) / n
            << ", sub-Nyquist better in " << static_cast<double>(better) / n << " of trials\n";
    log << "wrote " << (dir / "trials.csv").string() << " and " << (dir / "summary.json").string()
        << '\n';
    return kExitOk;
}

int cmd_diagnose(const RunConfig& config, const std::string& what, std::size_t term,
                 std::ostream& log) {
    const auto& s = config.scheme;
    const auto& model = config.model;
    ensure_dir(config.out_dir);
    const fs::path path = fs::path(config.out_dir) / (what + ".csv");

    if (what == "eigenvalue-map") {
        auto out = open_out(path);
        out << "set,index,re,im\n";
        std::vector<Complex> one, dec;
        for (const auto& t : model.terms) {
            one.push_back(std::exp(t.phi() * s.delta));
            dec.push_back(std::exp(t.phi() * (static_cast<double>(s.r) * s.delta)));
        }
        const auto emit = [&](const char* set, const std::vector<Complex>& zs) {
            double dmin = kInf;
            for (std::size_t i = 0; i < zs.size(); ++i) {
                out << set << ',' << i << ',' << fmt12(zs[i].real()) << ',' << fmt12(zs[i].imag())
                    << '\n';
                for (std::size_t j = i + 1; j < zs.size(); ++j)
                    dmin = std::min(dmin, std::abs(zs[i] - zs[j]));
            }
            log << set << ": min pairwise distance " << dmin << '\n';
        };
        emit("stride1", one);
        emit("stride_r", dec);
    } else if (what == "svd-profile") {
        auto source = make_source(config, config.seed);
        const auto est = detect_order(source, config.scheme, 0, s.r, config.rank_tol);
        auto out = open_out(path);
        out << "index,sigma\n";
        for (std::size_t i = 0; i < est.singular_values.size(); ++i)
            out << i << ',' << fmt12(est.singular_values[i]) << '\n';
        log << "numerical rank " << est.rank << " at rel_tol " << est.rel_tol << '\n';
    } else if (what == "candidate-sets") {
        if (term >= model.terms.size())
            throw Error(ErrorKind::Config, "term index out of range");
        const auto phi = model.terms[term].phi();
        const auto a = candidate_set(std::exp(phi * (static_cast<double>(s.r) * s.delta)), s.r,
                                     model.omega_max, s.delta);
        const auto b = candidate_set(std::exp(phi * (static_cast<double>(s.rho) * s.delta)), s.rho,
                                     model.omega_max, s.delta);
        auto out = open_out(path);
        out << "set,index,omega\n";
        const auto ca = a.candidates(), cb = b.candidates();
        for (std::size_t i = 0; i < ca.size(); ++i)
            out << "r," << i << ',' << fmt12(ca[i]) << '\n';
        for (std::size_t i = 0; i < cb.size(); ++i)
            out << "rho," << i << ',' << fmt12(cb[i]) << '\n';
        log << ca.size() << " + " << cb.size() << " candidates for term " << term << '\n';
    } else {
        log << "unknown diagnostic '" << what
            << "' (expected eigenvalue-map, svd-profile or candidate-sets)\n";
        return kExitConfig;
    }
    log << "wrote " << path.string() << '\n';
    return kExitOk;
}

int cmd_repro(const std::string& name, const RunConfig& config, std::ostream& log) {
    auto source = make_source(config, config.seed);
    AnalysisRun run;
    try {
        run = run_analysis(config, source);
    } catch (const StageError& e) {
        log << name << ": stage " << e.stage() << " failed: " << e.what() << '\n';
        return exit_code_for(e);
    }
    const auto match = match_terms(config.model, run.terms);
    log << name << " (" << to_string(config.pipeline) << ", r = " << config.scheme.r
        << ", rho = " << config.scheme.rho << ", "
        << (config.snr_db ? "snr " + fmt12(*config.snr_db) + " dB" : std::string("noiseless"))
        << ")\n";
    log << "n0 = " << run.report["n0"].get<std::size_t>() << ", n = " << run.terms.terms.size()
        << ", samples consumed = " << run.samples_consumed << '\n';
    for (const auto& p : run.report["singular_profiles"])
        log << "  rank at shift k = " << p["k"].get<std::int64_t>() << ": "
            << p["rank"].get<std::size_t>() << '\n';
    for (const auto& g : run.report["groups"])
        if (g.contains("rank_profile"))
            log << "  group multiplicity " << g["multiplicity"].get<std::size_t>() << '\n';
    log_terms(log, run.terms);
    log << "max frequency error vs truth: " << match.max_error << '\n';

    ensure_dir(config.out_dir);
    const fs::path dir(config.out_dir);
    write_json(dir / "report.json", run.report);
    auto out = open_out(dir / "terms.csv");
    write_terms_csv(out, run.terms);
    return kExitOk;
}

}  // namespace coprony::app
