#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "epi/commands.hpp"
#include "epi/error.hpp"
#include "epi/synthetic.hpp"

using namespace epi;
using namespace epi::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("epi_cmd_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_synthetic(const fs::path& dir, int days) {
    SyntheticSpec spec;
    spec.days = days;
    const fs::path csv = dir / "series.csv";
    cmd_synth(spec, csv);
    return csv;
}

ModelOptions small_mlp() {
    ModelOptions m;
    m.hidden_layers = 2;
    m.neurons = 6;
    m.max_iter = 100;
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EPI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("stats writes json and csv reports") {
    TempDir dir;
    const auto csv = dir.path / "tiny.csv";
    std::ofstream(csv) << "date,tests,confirmed,deaths\n2021-01-01,10,1,0\n2021-01-02,20,2,0\n2021-01-03,,3,1\n"
                          "2021-01-04,40,4,1\n";
    GlobalOptions g;
    g.out_dir = dir.path;
    const auto r = cmd_stats(csv, g);
    CHECK(r["columns"]["confirmed"]["count"] == 4);
    CHECK(r["columns"]["confirmed"]["q25"].get<double>() == doctest::Approx(1.75));
    CHECK(r["columns"]["tests"]["count"] == 3);
    CHECK(r["manifest"]["command"] == "stats");
    CHECK(r["manifest"]["tool_version"] == kToolVersion);
    CHECK(r["manifest"]["input"]["rows"] == 4);
    CHECK(json::parse(slurp(dir.path / "stats.json")) == r);
    const auto table = slurp(dir.path / "stats.csv");
    CHECK(table.rfind("statistic,day_index,tests,confirmed,deaths\nCount,4,3,4,4\n", 0) == 0);
    CHECK(table.find("\n25%,0.75,") != std::string::npos);
}

TEST_CASE("train then eval reproduces the test score") {
    TempDir dir;
    const auto csv = write_synthetic(dir.path, 90);
    GlobalOptions g;
    g.out_dir = dir.path;
    g.split_mode = SplitMode::Chronological;
    for (const std::string family : {"mlp", "svr", "linreg"}) {
        TrainOptions t;
        t.model = small_mlp();
        t.model.family = family;
        t.target = Column::Deaths;
        t.model_file = dir.path / (family + ".json");
        const auto tr = cmd_train(csv, t, g);
        REQUIRE(fs::exists(*t.model_file));
        CHECK(tr["family"] == family);
        const auto ev = cmd_eval(*t.model_file, csv, false, g);
        CHECK(ev["r2"].get<double>() == tr["r2"].get<double>());
        CHECK(ev["original"]["n"] == 18);
        CHECK(cmd_eval(*t.model_file, csv, true, g)["original"]["n"] == 90);
    }
}

TEST_CASE("grid reports are identical across runs and worker counts") {
    TempDir dir;
    const auto csv = write_synthetic(dir.path, 80);
    GlobalOptions g;
    const auto a = cmd_grid(csv, small_mlp(), g);
    const auto b = cmd_grid(csv, small_mlp(), g);
    CHECK(a["manifest"].contains("timestamps"));
    CHECK(without_timestamps(a) == without_timestamps(b));
    g.workers = 3;
    const auto c = cmd_grid(csv, small_mlp(), g);
    CHECK(c["cells"] == a["cells"]);
    CHECK(c["best"] == a["best"]);
    CHECK(a["cells"].size() == 30);
    CHECK(a["best"].contains("svr"));
}

TEST_CASE("forecast replays from its manifest") {
    TempDir dir;
    const auto csv = write_synthetic(dir.path, 70);
    GlobalOptions g;
    g.out_dir = dir.path;
    TrainOptions t;
    t.model.family = "linreg";
    t.model_file = dir.path / "m.json";
    cmd_train(csv, t, g);
    ForecastOptions f;
    f.history_csv = csv;
    f.scale = PlotScale::Log;
    const auto first = cmd_forecast(*t.model_file, f, g);
    CHECK(first["predictions"].size() == 30);
    CHECK(fs::exists(dir.path / "forecast_plot.csv"));
    const auto again = replay_forecast(first["manifest"], g);
    CHECK(without_timestamps(first) == without_timestamps(again));

    std::ofstream(*t.model_file, std::ios::app) << " ";
    CHECK_THROWS_AS(replay_forecast(first["manifest"], g), Error);
}

TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorCode::Io) == 2);
    CHECK(exit_code(ErrorCode::GapInDates) == 2);
    CHECK(exit_code(ErrorCode::Divergence) == 3);
    CHECK(exit_code(ErrorCode::NonFiniteLoss) == 3);
    CHECK(exit_code(ErrorCode::NotConverged) == 4);
    CHECK(exit_code(ErrorCode::LineSearchFailure) == 4);
}

TEST_CASE("command-line front end") {
    TempDir dir;
    const auto csv = write_synthetic(dir.path, 60);
    const std::string q = "'" + csv.string() + "'";
    CHECK(run_cli("stats " + q) == 0);
    CHECK(run_cli("stats " + q + " --out-dir '" + dir.path.string() + "' --format csv") == 0);
    CHECK(fs::exists(dir.path / "stats.csv"));
    CHECK_FALSE(fs::exists(dir.path / "stats.json"));
    CHECK(run_cli("stats /nonexistent/file.csv") == 2);
    CHECK(run_cli("train " + q + " --model nothing") == 2);
    CHECK(run_cli("bogus") == 2);
    CHECK(run_cli("train " + q + " --model linreg --lr 1e6 --iterations 50 --model-file '" +
                  (dir.path / "x.json").string() + "'") == 3);

    const auto gap = dir.path / "gap.csv";
    std::ofstream(gap) << "date,tests,confirmed,deaths\n2021-01-01,1,1,1\n2021-01-03,1,1,1\n";
    CHECK(run_cli("stats '" + gap.string() + "'") == 2);
    CHECK(run_cli("stats '" + gap.string() + "' --fill-gaps") == 0);
}
