#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>

// End-to-end checks of the batch front-end binary.

namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qgibbs_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = std::string(QGIBBS_CLI_PATH) + " " + args + " > " +
                            stdout_file.string() + " 2> " + stdout_file.string() + ".err";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}
}  // namespace

TEST_CASE("cli: validate") {
    TempDir tmp;
    const fs::path good = tmp.path / "good.cfg";
    std::ofstream(good) << "[params]\nalpha = 1\nmu = 1\nbeta = 0\nN = 5\n";
    CHECK(run("validate --config " + good.string(), tmp.path / "o1") == 0);
    // beta = 0 is a warning, not an error
    const std::string err = slurp(tmp.path / "o1.err");
    CHECK(err.find("warning") != std::string::npos);

    const fs::path bad = tmp.path / "bad.cfg";
    std::ofstream(bad) << "[params]\nmu = 1\nbeta = 1\nN = 5\n";
    CHECK(run("validate --config " + bad.string(), tmp.path / "o2") == 2);
    CHECK(slurp(tmp.path / "o2.err").find("params.alpha") != std::string::npos);

    CHECK(run("validate --config " + (tmp.path / "absent.cfg").string(), tmp.path / "o3") == 2);
}

TEST_CASE("cli: deterministic reports, fresh directories, exit codes") {
    TempDir tmp;
    const std::string common =
        "run --experiment regularity --seed 7 --out-dir " + (tmp.path / "runs").string();
    REQUIRE(run(common, tmp.path / "r1") == 0);
    REQUIRE(run(common, tmp.path / "r2") == 0);
    std::string dir1 = slurp(tmp.path / "r1"), dir2 = slurp(tmp.path / "r2");
    dir1.erase(dir1.find_last_not_of("\n") + 1);
    dir2.erase(dir2.find_last_not_of("\n") + 1);
    CHECK(dir1 != dir2);  // append-only artifact directories
    CHECK(slurp(fs::path(dir1) / "report.json") == slurp(fs::path(dir2) / "report.json"));
    CHECK(slurp(fs::path(dir1) / "regularity_profiles.csv") ==
          slurp(fs::path(dir2) / "regularity_profiles.csv"));
    CHECK(fs::exists(fs::path(dir1) / "manifest.json"));

    // failing experiment: judge a tiny ensemble against a wrong variance
    const int rc = run(
        "run --experiment invariance --seed 7 --out-dir " + (tmp.path / "runs").string() +
            " --set invariance.M=300 --set invariance.T=0 --set invariance.control_M=0" +
            " --set invariance.variance_scale=2.0",
        tmp.path / "r3");
    CHECK(rc == 1);

    // schema violation
    CHECK(run("run --set params.N=0", tmp.path / "r4") == 2);
}
