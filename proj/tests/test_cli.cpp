// End-to-end checks of the command-line tool: exit codes, artifact layout,
// overrides, replay, and byte-level reproducibility. Takes the CLI binary
// path as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

#define CHECK(cond)                                                              \
    do {                                                                         \
        if (!(cond)) {                                                           \
            ++g_failures;                                                        \
            std::cerr << "CHECK failed at " << __FILE__ << ':' << __LINE__       \
                      << ": " #cond "\n";                                        \
        }                                                                        \
    } while (0)

std::string g_cli;
fs::path g_work;

int run(const std::string& args) {
    const std::string cmd =
        g_cli + " " + args + " > " + (g_work / "out.log").string() + " 2> " +
        (g_work / "err.log").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string desk_config(const std::string& extra_experiment = "") {
    return std::string(R"({
  "parameters": ")") +
           SOFTLAND_SOURCE_DIR + R"(/params/desk_default.json",
  "trajectory": {"operation": "closing", "duration_s": 3.5e-3},
  "feedforward": {"dt_s": 1e-6},
  "simulation": {"dt_s": 1e-6, "t_end_s": 10e-3},
  "experiment": {"n_experiments": 4, "n_operations": 6, "rng_seed": 11)" +
           extra_experiment + R"(}
})";
}

int count_rows_with(const fs::path& csv, const std::string& needle) {
    std::ifstream in(csv);
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        if (line.find(needle) != std::string::npos) ++n;
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli <softland-binary>\n";
        return 2;
    }
    g_cli = argv[1];
    g_work = fs::temp_directory_path() / "softland_cli_test";
    fs::remove_all(g_work);
    fs::create_directories(g_work);

    const fs::path cfg = g_work / "config.json";
    write_file(cfg, desk_config());

    // feedforward: artifacts, phases, sample-period override
    const fs::path ff_dir = g_work / "ff";
    CHECK(run("feedforward --config " + cfg.string() + " --out-dir " + ff_dir.string()) == 0);
    CHECK(fs::exists(ff_dir / "signal.csv"));
    CHECK(fs::exists(ff_dir / "manifest.json"));
    CHECK(count_rows_with(ff_dir / "signal.csv", ",precharge") == 2000);
    CHECK(count_rows_with(ff_dir / "signal.csv", ",tracking") == 3500);
    CHECK(count_rows_with(ff_dir / "signal.csv", ",hold") == 4500);

    const fs::path ff2_dir = g_work / "ff2";
    CHECK(run("feedforward --config " + cfg.string() + " --out-dir " + ff2_dir.string() +
              " --dt 2e-6") == 0);
    CHECK(count_rows_with(ff2_dir / "signal.csv", ",tracking") == 1750);

    // malformed JSON and schema violations exit 2
    const fs::path bad = g_work / "bad.json";
    write_file(bad, "{ not json ");
    CHECK(run("feedforward --config " + bad.string()) == 2);
    write_file(bad, R"({"trajectory": {}})");  // missing parameters key
    CHECK(run("feedforward --config " + bad.string()) == 2);

    // published verbatim parameters demand flux beyond saturation: fault, exit 3
    const fs::path t1cfg = g_work / "table1.json";
    write_file(t1cfg, std::string(R"({"parameters": ")") + SOFTLAND_SOURCE_DIR +
                          R"(/params/paper_table1.json"})");
    CHECK(run("feedforward --config " + t1cfg.string() + " --out-dir " +
              (g_work / "t1").string()) == 3);
    CHECK(slurp(g_work / "err.log").find("fault") != std::string::npos);

    // simulate: trace + result, then replay the synthesized signal
    const fs::path sim_dir = g_work / "sim";
    CHECK(run("simulate --config " + cfg.string() + " --out-dir " + sim_dir.string()) == 0);
    CHECK(fs::exists(sim_dir / "trace.csv"));
    CHECK(fs::exists(sim_dir / "result.json"));
    CHECK(slurp(sim_dir / "result.json").find("\"contact\": true") != std::string::npos);

    const fs::path replay_dir = g_work / "replay";
    CHECK(run("simulate --config " + cfg.string() + " --signal " +
              (ff_dir / "signal.csv").string() + " --out-dir " + replay_dir.string()) == 0);
    CHECK(slurp(replay_dir / "result.json").find("\"contact\": true") != std::string::npos);

    // baseline summary
    const fs::path base_dir = g_work / "base";
    CHECK(run("baseline --config " + cfg.string() + " --out-dir " + base_dir.string()) == 0);
    const std::string base_json = slurp(base_dir / "baseline.json");
    CHECK(base_json.find("j_unc_mps") != std::string::npos);
    CHECK(fs::exists(base_dir / "manifest.json"));

    // montecarlo: determinism (byte-identical percentiles for a fixed seed)
    const fs::path mc1 = g_work / "mc1", mc2 = g_work / "mc2";
    CHECK(run("montecarlo --config " + cfg.string() + " --out-dir " + mc1.string() +
              " --workers 2") == 0);
    CHECK(run("montecarlo --config " + cfg.string() + " --out-dir " + mc2.string() +
              " --workers 1") == 0);
    CHECK(fs::exists(mc1 / "percentiles.csv"));
    CHECK(slurp(mc1 / "percentiles.csv") == slurp(mc2 / "percentiles.csv"));
    CHECK(slurp(mc1 / "percentiles.csv").find("J_unc") != std::string::npos);
    CHECK(slurp(mc1 / "manifest.json").find("median_curve_mps") != std::string::npos);

    // --experiments 1 collapses the percentiles
    const fs::path mc3 = g_work / "mc3";
    CHECK(run("montecarlo --config " + cfg.string() + " --out-dir " + mc3.string() +
              " --experiments 1 --operations 3") == 0);
    {
        std::ifstream in(mc3 / "percentiles.csv");
        std::string line;
        std::getline(in, line);  // header
        int rows = 0;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string n, p10, p50, p90;
            std::getline(row, n, ',');
            std::getline(row, p10, ',');
            std::getline(row, p50, ',');
            std::getline(row, p90, ',');
            CHECK(p10 == p50);
            CHECK(p50 == p90);
            ++rows;
        }
        CHECK(rows == 3);
    }

    // per-experiment histories on request
    const fs::path mc4 = g_work / "mc4";
    write_file(cfg, desk_config(", \"emit_histories\": true"));
    CHECK(run("montecarlo --config " + cfg.string() + " --out-dir " + mc4.string() +
              " --experiments 2 --operations 4") == 0);
    CHECK(fs::exists(mc4 / "history_0.csv"));
    CHECK(fs::exists(mc4 / "history_1.csv"));
    CHECK(count_rows_with(mc4 / "history_0.csv", ",") == 5);  // header + 4 operations

    if (g_failures == 0) {
        std::cout << "test_cli: all checks passed\n";
        return 0;
    }
    std::cerr << "test_cli: " << g_failures << " checks failed\n";
    return 1;
}
