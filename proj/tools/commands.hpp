#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "coprony/model.hpp"

namespace coprony::app {

// Every index the configured pipeline may read: j*r for j < M, plus
// j*r + k*rho for the m rows of each shift k = 1..K (K = 1 without collisions).
std::set<SampleIndex> required_indices(const RunConfig& config);

// Generator source for the configuration, noisy when snr_db is set.
SampleSource make_source(const RunConfig& config, std::uint64_t seed);

// Trace indices from `required` that are absent, in increasing order.
std::vector<SampleIndex> missing_indices(const std::map<SampleIndex, Complex>& trace,
                                         const std::set<SampleIndex>& required);

struct AnalysisRun {
    SignalModel terms;
    nlohmann::json report;
    std::size_t samples_consumed = 0;
};

// Runs the configured pipeline on `source`. Throws coprony::Error on failure.
AnalysisRun run_analysis(const RunConfig& config, SampleSource& source);

// Greedy nearest circular-frequency assignment of recovered terms to the truth.
struct MatchResult {
    std::vector<double> errors;  // per true term, infinity when unmatched
    double max_error = 0.0;
    double median_error = 0.0;
};
MatchResult match_terms(const SignalModel& truth, const SignalModel& recovered);

// Per-trial noise seed derived from the master seed.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

// One Monte Carlo trial: seed trial_seed(config.seed, i), sub-Nyquist analysis and
// optionally the stride-1 ESPRIT baseline on the same number of samples.
struct TrialRow {
    std::uint64_t seed = 0;
    MatchResult sub;
    std::size_t n_detected = 0;
    bool success = false;
    std::optional<MatchResult> base;
    bool base_success = false;
    std::string failure;
};
std::vector<TrialRow> run_trials(const RunConfig& config, std::size_t trials, bool baseline);

void write_terms_csv(std::ostream& out, const SignalModel& model);

// Each command returns the process exit code and writes diagnostics to `log`.
int cmd_generate(const RunConfig& config, const std::string& trace_out, std::ostream& log);
int cmd_analyze(const RunConfig& config, const std::optional<std::string>& trace_in,
                std::ostream& log);
int cmd_montecarlo(const RunConfig& config, std::size_t trials, bool baseline,
                   std::ostream& log);
int cmd_diagnose(const RunConfig& config, const std::string& what, std::size_t term,
                 std::ostream& log);
int cmd_repro(const std::string& name, const RunConfig& config, std::ostream& log);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSampleUnavailable = 3;
inline constexpr int kExitAnalysis = 4;

// Maps a library error to the command-line exit code.
int exit_code_for(const Error& e);

}  // namespace coprony::app
