#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#ifdef __unix__
#include <sys/wait.h>
#endif

#include <nlohmann/json.hpp>

#ifndef GSCP_CLI_PATH
#error "GSCP_CLI_PATH must point at the built binary"
#endif

namespace {

using nlohmann::json;

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("gscp_cli_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Runs the CLI, returns its exit code. Output is captured into files so
// individual tests can inspect it.
int run_cli(const std::string& args, const std::string& out_file = "/dev/null",
            const std::string& err_file = "/dev/null") {
    std::string cmd = std::string(GSCP_CLI_PATH) + " " + args + " >" + out_file +
                      " 2>" + err_file;
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
#ifdef WEXITSTATUS
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
#else
    return status;
#endif
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("simulate writes a reproducible bundle") {
    TempDir a, b;
    REQUIRE(run_cli("simulate --scenario I --nodes 25 --seed 7 --out " +
                    a.path.string()) == 0);
    for (const char* name : {"signal.csv", "edges.txt", "truth.json", "manifest.json"})
        CHECK(std::filesystem::exists(a.path / name));

    REQUIRE(run_cli("simulate --scenario I --nodes 25 --seed 7 --out " +
                    b.path.string()) == 0);
    for (const char* name : {"signal.csv", "edges.txt", "truth.json", "manifest.json"})
        CHECK(slurp(a.file(name)) == slurp(b.file(name)));

    json truth = load_json(a.file("truth.json"));
    CHECK(truth["T"].get<int>() > 0);
    CHECK(truth["seed"].get<int>() == 7);
    CHECK(truth["change_points"].is_array());
}

TEST_CASE("simulate scenario II plants exactly four change-points") {
    TempDir dir;
    REQUIRE(run_cli("simulate --scenario II --nodes 25 --seed 3 --out " +
                    dir.path.string()) == 0);
    json truth = load_json(dir.file("truth.json"));
    CHECK(truth["change_points"].size() == 4);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("simulate --scenario I --nodes 25 --seed 1") == 2);  // no --out
    CHECK(run_cli("definitely-not-a-command") == 2);
    CHECK(run_cli("detect") == 2);
    CHECK(run_cli("detect --signal x.csv --edges e.txt --out r.json --method bogus") ==
          2);
}

TEST_CASE("detect emits a schema-complete result") {
    TempDir dir;
    REQUIRE(run_cli("simulate --scenario I --nodes 25 --seed 11 --out " +
                    dir.path.string()) == 0);
    std::string result = dir.file("result.json");
    REQUIRE(run_cli("detect --signal " + dir.file("signal.csv") + " --edges " +
                    dir.file("edges.txt") + " --method varsel --window 10 --out " +
                    result) == 0);
    json r = load_json(result);
    json truth = load_json(dir.file("truth.json"));
    REQUIRE(r.contains("change_points"));
    CHECK(r["change_points"].back().get<int>() == truth["T"].get<int>());
    CHECK(r["d"].get<int>() == static_cast<int>(r["change_points"].size()));
    CHECK(r.contains("lambda"));
    CHECK(r.contains("means_sparse"));
    CHECK(r.contains("cost_curve"));
    CHECK(r["constants"]["detector"] == "variable_selection");
}

TEST_CASE("kernel detection omits mean estimates") {
    TempDir dir;
    REQUIRE(run_cli("simulate --scenario I --nodes 20 --seed 13 --out " +
                    dir.path.string()) == 0);
    std::string result = dir.file("result.json");
    REQUIRE(run_cli("detect --signal " + dir.file("signal.csv") + " --edges " +
                    dir.file("edges.txt") + " --method kernel-gaussian --out " +
                    result) == 0);
    json r = load_json(result);
    CHECK_FALSE(r.contains("means_sparse"));
    CHECK_FALSE(r.contains("lambda"));
    CHECK(r["constants"]["detector"] == "kernel_gaussian");
}

TEST_CASE("detect rejects malformed input with a line diagnostic") {
    TempDir dir;
    std::ofstream(dir.file("signal.csv")) << "1,2\n3,broken\n";
    std::ofstream(dir.file("edges.txt")) << "0 1\n";
    std::string err = dir.file("stderr.txt");
    int rc = run_cli("detect --signal " + dir.file("signal.csv") + " --edges " +
                         dir.file("edges.txt") + " --method kernel-linear --out " +
                         dir.file("r.json"),
                     "/dev/null", err);
    CHECK(rc == 1);
    CHECK(slurp(err).find(":2:") != std::string::npos);
}

TEST_CASE("evaluate scores a prediction against the truth") {
    TempDir dir;
    REQUIRE(run_cli("simulate --scenario I --nodes 20 --seed 5 --out " +
                    dir.path.string()) == 0);
    json truth = load_json(dir.file("truth.json"));
    // a perfect prediction: the truth itself plus the horizon
    json pred;
    pred["change_points"] = truth["change_points"];
    pred["change_points"].push_back(truth["T"]);
    std::ofstream(dir.file("pred.json")) << pred.dump();

    std::string out = dir.file("metrics.txt");
    REQUIRE(run_cli("evaluate --pred " + dir.file("pred.json") + " --truth " +
                    dir.file("truth.json"),
                    out) == 0);
    json metrics = json::parse(slurp(out));
    CHECK(metrics["hausdorff"].get<double>() == 0.0);
    CHECK(metrics["rand"].get<double>() == 1.0);
    CHECK(metrics["precision"].get<double>() == 1.0);
    CHECK(metrics["recall"].get<double>() == 1.0);
    CHECK(metrics["f1"].get<double>() == 1.0);
    CHECK(metrics["margin"].get<int>() == 10);
}

TEST_CASE("evaluate fails cleanly on missing files") {
    CHECK(run_cli("evaluate --pred /nonexistent/p.json --truth /nonexistent/t.json") ==
          1);
}

TEST_CASE("benchmark smoke run emits both report formats") {
    TempDir dir;
    std::string out = dir.file("table.txt");
    REQUIRE(run_cli("benchmark --scenario I --nodes 20 --instances 2 --seed 2"
                    " --detectors kernel-linear --out " +
                        dir.path.string(),
                    out) == 0);
    CHECK(std::filesystem::exists(dir.path / "report.json"));
    CHECK(std::filesystem::exists(dir.path / "report.txt"));
    json rep = load_json(dir.file("report.json"));
    CHECK(rep["instances"].get<int>() == 2);
    REQUIRE(rep["detectors"].size() == 1);
    CHECK(rep["detectors"][0]["name"] == "Linear kernel");
    std::string table = slurp(out);
    CHECK(table.find("Hausdorff") != std::string::npos);

    // determinism: a second run writes byte-identical reports
    TempDir dir2;
    REQUIRE(run_cli("benchmark --scenario I --nodes 20 --instances 2 --seed 2"
                    " --detectors kernel-linear --out " +
                    dir2.path.string()) == 0);
    CHECK(slurp(dir.file("report.json")) == slurp(dir2.file("report.json")));
}
