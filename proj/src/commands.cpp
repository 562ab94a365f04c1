#include "coexsim/commands.hpp"

#include <algorithm>
#include <cmath>

#include "coexsim/coexistence.hpp"
#include "coexsim/errors.hpp"
#include "coexsim/interference.hpp"
#include "coexsim/psd.hpp"
#include "coexsim/serialize.hpp"

namespace coexsim {

namespace {

bool want_csv(const CommonOptions& c) { return c.format == "csv" || c.format == "both"; }
bool want_json(const CommonOptions& c) { return c.format == "json" || c.format == "both"; }

void check_format(const CommonOptions& c) {
    if (c.format != "csv" && c.format != "json" && c.format != "both")
        throw config_error("format must be one of csv, json, both");
}

SyncModel parse_sync(const std::string& s) {
    if (s == "aligned") return SyncModel::Aligned;
    if (s == "uniform-offset") return SyncModel::UniformOffset;
    throw config_error("sync must be 'aligned' or 'uniform-offset', got '" + s + "'");
}

InterferenceTable build_table(const std::string& model, const WaveformSpec& victim,
                              const WaveformSpec& aggressor, int l_max, std::size_t trials,
                              SyncModel sync, std::uint64_t seed, std::size_t symbols) {
    if (model == "evm") {
        EvmOptions opts;
        opts.n_symbols = symbols;
        return evm_interference_table(victim, aggressor, l_max, trials, sync, seed, opts);
    }
    if (model == "psd") {
        auto psd = subcarrier_psd(aggressor, std::max<std::size_t>(1, trials / 25), seed);
        auto table = psd_interference_table(psd, l_max);
        table.victim_label = victim.label();
        return table;
    }
    throw config_error("model must be 'evm' or 'psd', got '" + model + "'");
}

} // namespace

WaveformSpec make_spec(const std::string& kind, const GridOptions& grid) {
    if (kind == "cp-ofdm") {
        const std::size_t cp =
            grid.cp < 0 ? grid.m / 8 : static_cast<std::size_t>(grid.cp);
        return WaveformSpec::cp_ofdm(grid.m, cp);
    }
    if (kind == "oqam" || kind == "oqam-phydyas") return WaveformSpec::oqam(grid.m, grid.k);
    throw config_error("waveform must be 'cp-ofdm' or 'oqam', got '" + kind + "'");
}

int run_table(const TableCmd& cmd) {
    check_format(cmd.common);
    const auto victim = make_spec(cmd.victim, cmd.grid);
    const auto aggressor = make_spec(cmd.aggressor, cmd.grid);
    const std::size_t trials = cmd.common.trials ? cmd.common.trials : 2000;
    const auto table = build_table(cmd.model, victim, aggressor, cmd.l_max, trials,
                                   parse_sync(cmd.sync), cmd.common.seed, cmd.symbols);

    MetaList cfg;
    cfg.emplace_back("command", "table");
    cfg.emplace_back("symbols_per_trial", std::to_string(cmd.symbols));
    if (want_csv(cmd.common)) write_interference_table_csv(cmd.common.out + ".csv", table, cfg);
    if (want_json(cmd.common)) write_interference_table_json(cmd.common.out + ".json", table, cfg);
    return 0;
}

int run_psd(const PsdCmd& cmd) {
    check_format(cmd.common);
    const auto aggressor = make_spec(cmd.waveform, cmd.grid);
    const std::size_t trials = cmd.common.trials ? cmd.common.trials : 50;

    PsdOptions opts;
    opts.segment_len = cmd.segment_len;
    opts.overlap_frac = cmd.overlap_frac;
    opts.aligned = cmd.aligned;

    PsdEstimate psd;
    MetaList cfg;
    cfg.emplace_back("command", "psd");
    if (cmd.truncated) {
        const auto victim = make_spec("cp-ofdm", cmd.grid);
        psd = truncated_psd(aggressor, victim, trials, cmd.common.seed, opts);
        cfg.emplace_back("victim_window", victim.label());
    } else {
        psd = subcarrier_psd(aggressor, trials, cmd.common.seed, opts);
    }
    if (want_csv(cmd.common)) write_psd_csv(cmd.common.out + ".csv", psd, cfg);
    if (want_json(cmd.common)) write_psd_json(cmd.common.out + ".json", psd, cfg);
    return 0;
}

int run_guardband(const GuardBandCmd& cmd) {
    check_format(cmd.common);
    if (cmd.constraint_step_db <= 0.0) throw config_error("constraint step must be positive dB");
    if (cmd.constraint_stop_db > cmd.constraint_start_db)
        throw config_error("constraint sweep must go from loose (start) to tight (stop)");
    const auto incumbent = make_spec("cp-ofdm", cmd.grid);
    const std::size_t trials = cmd.common.trials ? cmd.common.trials : 600;

    MetaList cfg;
    cfg.emplace_back("command", "guardband");
    cfg.emplace_back("incumbent", incumbent.label());
    cfg.emplace_back("incumbent_width", std::to_string(cmd.incumbent_width));
    cfg.emplace_back("secondary_width", std::to_string(cmd.secondary_width));
    cfg.emplace_back("constraint_metric",
                     "mean interference per incumbent subcarrier (I_tot / incumbent_width)");
    cfg.emplace_back("seed", std::to_string(cmd.common.seed));
    cfg.emplace_back("trials", std::to_string(trials));
    cfg.emplace_back("l_max", std::to_string(cmd.l_max));
    cfg.emplace_back("ceiling", std::to_string(cmd.ceiling));

    std::vector<std::vector<std::string>> rows;
    for (const auto& model : cmd.models) {
        for (const auto& secondary_kind : cmd.secondaries) {
            const auto secondary = make_spec(secondary_kind, cmd.grid);
            const auto table =
                build_table(model, incumbent, secondary, cmd.l_max, trials,
                            SyncModel::UniformOffset, cmd.common.seed, cmd.symbols);
            for (double c = cmd.constraint_start_db; c >= cmd.constraint_stop_db - 1e-9;
                 c -= cmd.constraint_step_db) {
                const auto res = required_guard_band(table, cmd.incumbent_width,
                                                     cmd.secondary_width, c, cmd.ceiling);
                rows.push_back({format_double(c), model, secondary_kind,
                                std::to_string(res.guard), res.satisfiable ? "1" : "0",
                                format_double(res.achieved_db)});
            }
        }
    }
    const std::vector<std::string> header = {"constraint_db", "model",       "secondary",
                                             "guard",         "satisfiable", "achieved_db"};
    if (want_csv(cmd.common)) write_rows_csv(cmd.common.out + ".csv", cfg, header, rows);
    if (want_json(cmd.common)) write_rows_json(cmd.common.out + ".json", cfg, header, rows);
    return 0;
}

int run_allocate(const AllocateCmd& cmd) {
    check_format(cmd.common);
    const auto incumbent = make_spec("cp-ofdm", cmd.grid);
    const std::size_t trials = cmd.common.trials ? cmd.common.trials : 600;

    CoexScenario scenario = CoexScenario::standard_60();
    scenario.p_total = cmd.p_total;
    scenario.snr_db = cmd.snr_db;
    const auto sweep = log_spaced(cmd.i_th_min, cmd.i_th_max, cmd.points);

    MetaList cfg;
    cfg.emplace_back("command", "allocate");
    cfg.emplace_back("incumbent", incumbent.label());
    cfg.emplace_back("band", "60 subcarriers; incumbent 20-39; secondary 0-19,40-59");
    cfg.emplace_back("p_total_w", format_double(cmd.p_total));
    cfg.emplace_back("snr_db", format_double(cmd.snr_db));
    cfg.emplace_back("channel", "unit gains, flat noise (equal-split SNR as configured)");
    cfg.emplace_back("noise_per_subcarrier", format_double(scenario.noise_per_subcarrier()));
    cfg.emplace_back("i_th_constraint", "aggregate over the incumbent band");
    cfg.emplace_back("seed", std::to_string(cmd.common.seed));
    cfg.emplace_back("trials", std::to_string(trials));
    cfg.emplace_back("l_max", std::to_string(cmd.l_max));

    std::vector<std::vector<std::string>> rows;
    for (const auto& secondary_kind : cmd.secondaries) {
        const auto secondary = make_spec(secondary_kind, cmd.grid);
        const auto table_psd =
            build_table("psd", incumbent, secondary, cmd.l_max, trials, SyncModel::UniformOffset,
                        cmd.common.seed, cmd.symbols);
        const auto table_evm =
            build_table("evm", incumbent, secondary, cmd.l_max, trials, SyncModel::UniformOffset,
                        cmd.common.seed, cmd.symbols);
        const auto curve = secondary_capacity_curve(scenario, table_psd, table_evm, sweep);
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            const auto emit = [&](const PowerAllocationResult& r, const char* model) {
                rows.push_back({format_double(sweep[i]), model, secondary_kind,
                                format_double(r.capacity), format_double(r.total_power),
                                format_double(r.total_interference), to_string(r.binding)});
            };
            emit(curve.psd[i], "psd");
            emit(curve.evm[i], "evm");
        }
    }
    const std::vector<std::string> header = {"i_th",      "model",        "secondary",
                                             "capacity_bits_per_hz", "power_sum_w",
                                             "interference", "binding"};
    if (want_csv(cmd.common)) write_rows_csv(cmd.common.out + ".csv", cfg, header, rows);
    if (want_json(cmd.common)) write_rows_json(cmd.common.out + ".json", cfg, header, rows);
    return 0;
}

} // namespace coexsim
