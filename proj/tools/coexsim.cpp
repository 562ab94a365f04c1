#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coexsim/commands.hpp"
#include "coexsim/errors.hpp"
#include "coexsim/version.hpp"

namespace {

std::string config_path; // shared --config holder; one subcommand runs per process

void add_common(CLI::App* sub, coexsim::CommonOptions& opts) {
    sub->add_option("--config", config_path,
                    "Flat key=value config file; command-line flags win");
    sub->add_option("--out", opts.out, "Output path stem (writes <out>.csv / <out>.json)");
    sub->add_option("--format", opts.format, "Output format: csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--seed", opts.seed, "Root seed; all per-trial streams derive from it");
    sub->add_option("--trials", opts.trials, "Monte Carlo trial count (0 = subcommand default)");
}

void add_grid(CLI::App* sub, coexsim::GridOptions& grid) {
    sub->add_option("-M,--subcarriers", grid.m, "Subcarrier count (power of two)");
    sub->add_option("--cp-len", grid.cp, "CP-OFDM cyclic prefix in samples (-1 = M/8)");
    sub->add_option("-K,--overlap", grid.k, "OQAM overlapping factor (2, 3 or 4)");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Flat key=value file applied to the active subcommand's options.  Values
// given on the command line keep precedence; unknown keys are rejected.
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw coexsim::config_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw coexsim::config_error(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw coexsim::config_error(path + ":" + std::to_string(lineno) +
                                        ": unknown config key '" + key + "'");
        if (opt->count() > 0) continue; // flags win
        std::size_t start = 0; // comma lists feed multi-valued options
        while (start <= value.size()) {
            const auto comma = value.find(',', start);
            const std::string item =
                trim(comma == std::string::npos ? value.substr(start)
                                                : value.substr(start, comma - start));
            if (!item.empty()) opt->add_result(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        opt->run_callback();
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coexsim: cross-waveform interference and coexistence simulator"};
    app.set_version_flag("--version", std::string("coexsim ") + coexsim::kVersion);
    app.require_subcommand(1);

    coexsim::TableCmd table;
    auto* table_app = app.add_subcommand("table", "Build an interference table I(l)");
    add_common(table_app, table.common);
    add_grid(table_app, table.grid);
    table_app->add_option("--victim", table.victim, "Victim waveform: cp-ofdm or oqam");
    table_app->add_option("--aggressor", table.aggressor, "Aggressor waveform: cp-ofdm or oqam");
    table_app->add_option("--model", table.model, "Interference model: evm or psd")
        ->check(CLI::IsMember({"evm", "psd"}));
    table_app->add_option("--sync", table.sync, "Timing model: aligned or uniform-offset")
        ->check(CLI::IsMember({"aligned", "uniform-offset"}));
    table_app->add_option("--lmax", table.l_max, "Largest tabulated spectral distance");
    table_app->add_option("--symbols", table.symbols, "Victim symbols measured per trial");

    coexsim::PsdCmd psd;
    auto* psd_app = app.add_subcommand("psd", "Estimate a per-subcarrier PSD");
    add_common(psd_app, psd.common);
    add_grid(psd_app, psd.grid);
    psd_app->add_option("--waveform", psd.waveform, "Waveform: cp-ofdm or oqam");
    psd_app->add_flag("--truncated", psd.truncated,
                      "PSD after the CP-OFDM receive windows instead of the raw signal");
    psd_app->add_flag("--aligned", psd.aligned, "Align receive windows with the transmit grid");
    psd_app->add_option("--segment", psd.segment_len, "Estimator segment length (0 = auto)");
    psd_app->add_option("--psd-overlap", psd.overlap_frac, "Segment overlap fraction [0,1)");

    coexsim::GuardBandCmd guard;
    auto* guard_app =
        app.add_subcommand("guardband", "Minimum guard width over a constraint sweep");
    add_common(guard_app, guard.common);
    add_grid(guard_app, guard.grid);
    guard_app->add_option("--models", guard.models, "Models to evaluate (evm, psd)");
    guard_app->add_option("--secondaries", guard.secondaries, "Secondary waveforms to evaluate");
    guard_app->add_option("--constraint-start", guard.constraint_start_db,
                          "Loosest constraint in dB (e.g. -20)");
    guard_app->add_option("--constraint-stop", guard.constraint_stop_db,
                          "Tightest constraint in dB (e.g. -50)");
    guard_app->add_option("--constraint-step", guard.constraint_step_db, "Sweep step in dB (> 0)");
    guard_app->add_option("--incumbent-width", guard.incumbent_width, "Incumbent block width");
    guard_app->add_option("--secondary-width", guard.secondary_width, "Secondary block width");
    guard_app->add_option("--ceiling", guard.ceiling, "Largest guard width searched");
    guard_app->add_option("--lmax", guard.l_max, "Tabulated distance range before tail model");
    guard_app->add_option("--symbols", guard.symbols, "Victim symbols measured per trial");

    coexsim::AllocateCmd alloc;
    auto* alloc_app =
        app.add_subcommand("allocate", "Secondary capacity under an interference budget sweep");
    add_common(alloc_app, alloc.common);
    add_grid(alloc_app, alloc.grid);
    alloc_app->add_option("--secondaries", alloc.secondaries, "Secondary waveforms to evaluate");
    alloc_app->add_option("--ptotal", alloc.p_total, "Total secondary transmit power in W");
    alloc_app->add_option("--snr-db", alloc.snr_db, "Equal-split per-subcarrier SNR in dB");
    alloc_app->add_option("--ith-min", alloc.i_th_min, "Smallest interference budget");
    alloc_app->add_option("--ith-max", alloc.i_th_max, "Largest interference budget");
    alloc_app->add_option("--points", alloc.points, "Sweep points (log spaced)");
    alloc_app->add_option("--lmax", alloc.l_max, "Tabulated distance range before tail model");
    alloc_app->add_option("--symbols", alloc.symbols, "Victim symbols measured per trial");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        CLI::App* active = table_app->parsed() ? static_cast<CLI::App*>(table_app)
                           : psd_app->parsed() ? static_cast<CLI::App*>(psd_app)
                           : guard_app->parsed() ? static_cast<CLI::App*>(guard_app)
                                                 : static_cast<CLI::App*>(alloc_app);
        if (!config_path.empty()) apply_config_file(active, config_path);

        if (*table_app) return coexsim::run_table(table);
        if (*psd_app) return coexsim::run_psd(psd);
        if (*guard_app) return coexsim::run_guardband(guard);
        if (*alloc_app) return coexsim::run_allocate(alloc);
    } catch (const coexsim::config_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
