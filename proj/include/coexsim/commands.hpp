#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coexsim/waveform.hpp"

namespace coexsim {

// Options shared by every subcommand.  `format` selects which of the CSV and
// JSON outputs get written; the default writes both.
struct CommonOptions {
    std::string out = "coexsim_out";
    std::string format = "both"; // csv | json | both
    std::uint64_t seed = 1;
    std::size_t trials = 0; // 0 -> subcommand default
};

struct GridOptions {
    std::size_t m = 128;
    std::int64_t cp = -1; // -1 -> M/8
    std::size_t k = 4;
};

WaveformSpec make_spec(const std::string& kind, const GridOptions& grid);

struct TableCmd {
    CommonOptions common;
    GridOptions grid;
    std::string victim = "cp-ofdm";
    std::string aggressor = "oqam";
    std::string model = "evm";         // evm | psd
    std::string sync = "uniform-offset"; // aligned | uniform-offset
    int l_max = 20;
    std::size_t symbols = 32;
};

struct PsdCmd {
    CommonOptions common;
    GridOptions grid;
    std::string waveform = "oqam";
    bool truncated = false; // pass the signal through the CP-OFDM receive windows
    bool aligned = false;
    std::size_t segment_len = 0;
    double overlap_frac = 0.5;
};

struct GuardBandCmd {
    CommonOptions common;
    GridOptions grid;
    std::vector<std::string> models = {"psd", "evm"};
    std::vector<std::string> secondaries = {"cp-ofdm", "oqam"};
    double constraint_start_db = -20.0;
    double constraint_stop_db = -50.0;
    double constraint_step_db = 5.0;
    std::size_t incumbent_width = 20;
    std::size_t secondary_width = 20;
    std::size_t ceiling = 10000;
    int l_max = 24;
    std::size_t symbols = 32;
};

struct AllocateCmd {
    CommonOptions common;
    GridOptions grid;
    std::vector<std::string> secondaries = {"cp-ofdm", "oqam"};
    double p_total = 1.0;
    double snr_db = 55.0;
    double i_th_min = 3e-5;
    double i_th_max = 3e-1;
    std::size_t points = 13;
    int l_max = 59;
    std::size_t symbols = 32;
};

int run_table(const TableCmd& cmd);
int run_psd(const PsdCmd& cmd);
int run_guardband(const GuardBandCmd& cmd);
int run_allocate(const AllocateCmd& cmd);

} // namespace coexsim
