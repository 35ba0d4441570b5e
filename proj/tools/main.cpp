#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "coprony/errors.hpp"

using namespace coprony;
using namespace coprony::app;

namespace {

struct Overrides {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<double> snr_db;
    bool noiseless = false;
    std::string backend;
    std::string recombine;
    std::string out_dir;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "run configuration (JSON)");
    cmd->add_option("--preset", o.preset, "named preset: table1, table2, cancel7, collide7");
    cmd->add_option("--seed", o.seed, "noise seed");
    cmd->add_option("--snr-db", o.snr_db, "signal-to-noise ratio in dB");
    cmd->add_flag("--noiseless", o.noiseless, "drop the noise from the configuration");
    cmd->add_option("--backend", o.backend, "pencil or esprit")
        ->check(CLI::IsMember({"pencil", "esprit"}));
    cmd->add_option("--recombine", o.recombine, "nearest, anchored or euclid")
        ->check(CLI::IsMember({"nearest", "anchored", "euclid"}));
    cmd->add_option("--out", o.out_dir, "output directory");
}

RunConfig resolve(const Overrides& o, const std::string& fallback_preset = {}) {
    RunConfig c;
    if (!o.config_path.empty())
        c = load_config(o.config_path);
    else if (!o.preset.empty())
        c = preset_config(o.preset);
    else if (!fallback_preset.empty())
        c = preset_config(fallback_preset);
    else
        throw Error(ErrorKind::Config, "need --config or --preset");
    if (!o.config_path.empty() && !o.preset.empty())
        throw Error(ErrorKind::Config, "--config and --preset are exclusive");
    if (o.seed)
        c.seed = *o.seed;
    if (o.snr_db)
        c.snr_db = *o.snr_db;
    if (o.noiseless)
        c.snr_db.reset();
    if (!o.backend.empty())
        c.backend = o.backend == "esprit" ? Backend::Esprit : Backend::Pencil;
    if (!o.recombine.empty())
        c.recombination = parse_recombination(o.recombine);
    if (!o.out_dir.empty())
        c.out_dir = o.out_dir;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sub-Nyquist multi-exponential analysis with coprime decimation and shift"};
    app.require_subcommand(1);

    Overrides o;
    std::string trace;
    std::size_t trials = 100;
    std::string baseline;
    std::string what;
    std::size_t term = 0;
    std::string repro_name;

    auto* gen = app.add_subcommand("generate", "write the samples an analysis may request");
    add_common(gen, o);
    gen->add_option("--trace", trace, "output trace CSV")->required();

    auto* ana = app.add_subcommand("analyze", "recover the exponential terms");
    add_common(ana, o);
    ana->add_option("--trace", trace, "input trace CSV (default: generator mode)");

    auto* mc = app.add_subcommand("montecarlo", "repeat the analysis over noise seeds");
    add_common(mc, o);
    mc->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    mc->add_option("--baseline", baseline, "stride-1 comparison method")
        ->check(CLI::IsMember({"esprit"}));

    auto* diag = app.add_subcommand("diagnose", "CSV data for plots");
    add_common(diag, o);
    diag->add_option("what", what, "eigenvalue-map, svd-profile or candidate-sets")->required();
    diag->add_option("--term", term, "term index for candidate-sets");

    auto* rep = app.add_subcommand("repro", "rerun one of the worked examples");
    add_common(rep, o);
    rep->add_option("name", repro_name, "table1, table2, cancel7 or collide7")
        ->required()
        ->check(CLI::IsMember({"table1", "table2", "cancel7", "collide7"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen)
            return cmd_generate(resolve(o), trace, std::cout);
        if (*ana)
            return cmd_analyze(resolve(o), trace.empty() ? std::nullopt
                                                         : std::optional<std::string>(trace),
                               std::cout);
        if (*mc)
            return cmd_montecarlo(resolve(o), trials, baseline == "esprit", std::cout);
        if (*diag)
            return cmd_diagnose(resolve(o), what, term, std::cout);
        if (*rep) {
            if (o.preset.empty() && o.config_path.empty())
                o.preset = repro_name;
            return cmd_repro(repro_name, resolve(o), std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAnalysis;
    }
    return kExitConfig;
}
