#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coexsim/commands.hpp"
#include "coexsim/errors.hpp"

using namespace coexsim;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "coexsim_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::size_t rows = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string("\"") + COEXSIM_CLI_BIN + "\" " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

TableCmd small_table_cmd(const fs::path& out) {
    TableCmd cmd;
    cmd.grid.m = 64;
    cmd.common.out = out.string();
    cmd.common.seed = 7;
    cmd.common.trials = 60;
    cmd.l_max = 20;
    cmd.symbols = 8;
    return cmd;
}

} // namespace

TEST_CASE("table command writes csv and json with metadata") {
    const auto out = work_dir() / "tab_a";
    REQUIRE(run_table(small_table_cmd(out)) == 0);

    const auto csv = slurp(out.string() + ".csv");
    CHECK(data_rows(csv) == 41); // 2 * l_max + 1 spectral distances
    CHECK(csv.find("# tool = coexsim") != std::string::npos);
    CHECK(csv.find("# seed = 7") != std::string::npos);
    CHECK(csv.find("l,I_linear,I_db,stderr_db") != std::string::npos);
    CHECK(csv.find("# warning") != std::string::npos); // 60 trials < 1000

    const auto json = slurp(out.string() + ".json");
    CHECK(json.find("\"seed\": \"7\"") != std::string::npos);
    CHECK(json.find("\"entries\"") != std::string::npos);
}

TEST_CASE("identical seed and config give byte-identical outputs") {
    const auto out1 = work_dir() / "det_1";
    const auto out2 = work_dir() / "det_2";
    REQUIRE(run_table(small_table_cmd(out1)) == 0);
    REQUIRE(run_table(small_table_cmd(out2)) == 0);
    CHECK(slurp(out1.string() + ".csv") == slurp(out2.string() + ".csv"));
    CHECK(slurp(out1.string() + ".json") == slurp(out2.string() + ".json"));

    auto different = small_table_cmd(work_dir() / "det_3");
    different.common.seed = 8;
    REQUIRE(run_table(different) == 0);
    CHECK(slurp(out1.string() + ".csv") != slurp((work_dir() / "det_3.csv")));
}

TEST_CASE("format flag restricts outputs") {
    auto cmd = small_table_cmd(work_dir() / "fmt_csv");
    cmd.common.format = "csv";
    std::error_code ec;
    fs::remove(work_dir() / "fmt_csv.json", ec);
    REQUIRE(run_table(cmd) == 0);
    CHECK(fs::exists(work_dir() / "fmt_csv.csv"));
    CHECK(!fs::exists(work_dir() / "fmt_csv.json"));

    cmd.common.format = "nonsense";
    CHECK_THROWS_AS(run_table(cmd), config_error);
}

TEST_CASE("invalid waveform or model names are configuration errors") {
    auto cmd = small_table_cmd(work_dir() / "bad");
    cmd.victim = "gfdm";
    CHECK_THROWS_AS(run_table(cmd), config_error);
    cmd = small_table_cmd(work_dir() / "bad");
    cmd.model = "magic";
    CHECK_THROWS_AS(run_table(cmd), config_error);
}

TEST_CASE("psd command emits the psd schema") {
    PsdCmd cmd;
    cmd.grid.m = 64;
    cmd.common.out = (work_dir() / "psd_a").string();
    cmd.common.trials = 4;
    cmd.common.seed = 3;
    REQUIRE(run_psd(cmd) == 0);
    const auto csv = slurp(work_dir() / "psd_a.csv");
    CHECK(csv.find("freq_over_dF,psd_linear,psd_db") != std::string::npos);
    CHECK(data_rows(csv) >= 1024);

    cmd.truncated = true;
    cmd.common.out = (work_dir() / "psd_b").string();
    REQUIRE(run_psd(cmd) == 0);
    CHECK(slurp(work_dir() / "psd_b.csv").find("victim_window") != std::string::npos);
}

TEST_CASE("guardband command sweeps constraints for all model/waveform pairs") {
    GuardBandCmd cmd;
    cmd.grid.m = 64;
    cmd.common.out = (work_dir() / "gb").string();
    cmd.common.trials = 40;
    cmd.constraint_start_db = -20.0;
    cmd.constraint_stop_db = -30.0;
    cmd.constraint_step_db = 5.0;
    cmd.l_max = 12;
    cmd.symbols = 8;
    REQUIRE(run_guardband(cmd) == 0);
    const auto csv = slurp(work_dir() / "gb.csv");
    CHECK(csv.find("constraint_db,model,secondary,guard,satisfiable,achieved_db") !=
          std::string::npos);
    CHECK(data_rows(csv) == 12); // 2 models x 2 secondaries x 3 constraints

    // Guard columns are monotone as the constraint tightens.
    std::istringstream in(csv);
    std::string line;
    long prev_guard = -1;
    int seen = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.find("evm,cp-ofdm") == std::string::npos)
            continue;
        std::size_t pos = 0;
        for (int c = 0; c < 3; ++c) pos = line.find(',', pos) + 1;
        const long guard = std::stol(line.substr(pos));
        CHECK(guard >= prev_guard);
        prev_guard = guard;
        ++seen;
    }
    CHECK(seen == 3);
}

TEST_CASE("allocate command emits monotone capacities and respects the power budget") {
    AllocateCmd cmd;
    cmd.grid.m = 64;
    cmd.common.out = (work_dir() / "alloc").string();
    cmd.common.trials = 40;
    cmd.points = 4;
    cmd.l_max = 31;
    cmd.symbols = 8;
    cmd.secondaries = {"oqam"};
    REQUIRE(run_allocate(cmd) == 0);
    const auto csv = slurp(work_dir() / "alloc.csv");
    CHECK(data_rows(csv) == 8); // 4 points x 2 models
    CHECK(csv.find("i_th,model,secondary,capacity_bits_per_hz,power_sum_w,interference,binding") !=
          std::string::npos);

    std::istringstream in(csv);
    std::string line;
    double prev_evm = -1.0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.find(",evm,") == std::string::npos) continue;
        std::size_t pos = 0;
        for (int c = 0; c < 3; ++c) pos = line.find(',', pos) + 1;
        const double capacity = std::stod(line.substr(pos));
        pos = line.find(',', pos) + 1;
        const double power = std::stod(line.substr(pos));
        CHECK(capacity >= prev_evm);
        CHECK(power <= 1.0 + 1e-9);
        prev_evm = capacity;
    }
}

TEST_CASE("binary: exit codes and config file handling") {
    const auto dir = work_dir();

    SUBCASE("successful run returns 0") {
        const auto out = dir / "bin_ok";
        CHECK(run_binary("table --victim cp-ofdm --aggressor oqam -M 64 --lmax 6 --trials 20 "
                         "--symbols 8 --seed 1 --out " +
                         out.string()) == 0);
        CHECK(fs::exists(dir / "bin_ok.csv"));
    }

    SUBCASE("bad flag values return 2") {
        CHECK(run_binary("table --model bogus --out /tmp/x") == 2);
        CHECK(run_binary("table --victim gfdm -M 64 --lmax 4 --trials 5 --out /tmp/x") == 2);
        CHECK(run_binary("nonexistent-subcommand") == 2);
    }

    SUBCASE("config file drives a run; flags win; unknown keys are rejected") {
        const auto cfg = dir / "run.cfg";
        {
            std::ofstream out(cfg);
            out << "victim=cp-ofdm\naggressor=oqam\nsubcarriers=64\nlmax=5\ntrials=20\n"
                << "symbols=8\nseed=3\nout=" << (dir / "bin_cfg").string() << "\n";
        }
        CHECK(run_binary("table --config " + cfg.string()) == 0);
        const auto base = slurp(dir / "bin_cfg.csv");
        CHECK(data_rows(base) == 11);

        // A flag overrides the file.
        CHECK(run_binary("table --config " + cfg.string() + " --lmax 7 --out " +
                         (dir / "bin_cfg2").string()) == 0);
        CHECK(data_rows(slurp(dir / "bin_cfg2.csv")) == 15);

        // Unknown key in the file: configuration error.
        {
            std::ofstream out(cfg, std::ios::app);
            out << "no_such_option=1\n";
        }
        CHECK(run_binary("table --config " + cfg.string()) == 2);
    }

    SUBCASE("binary reruns are byte-identical") {
        const auto a = dir / "bin_det_a";
        const auto b = dir / "bin_det_b";
        const std::string args = "table --victim cp-ofdm --aggressor oqam -M 64 --lmax 6 "
                                 "--trials 25 --symbols 8 --seed 11 --out ";
        REQUIRE(run_binary(args + a.string()) == 0);
        REQUIRE(run_binary(args + b.string()) == 0);
        CHECK(slurp(dir / "bin_det_a.csv") == slurp(dir / "bin_det_b.csv"));
        CHECK(slurp(dir / "bin_det_a.json") == slurp(dir / "bin_det_b.json"));
    }
}
