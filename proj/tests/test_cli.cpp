// Runs the built polaron binary end to end on tiny configurations.
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string small = " --K 6 --M 3 --n-max 4 ";

fs::path fresh(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("polaron_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(POLARON_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli: usage errors and help") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("hessian --K notanumber") == 2);
    CHECK(run("hessian -c /nonexistent/x.toml") == 2);
    const fs::path d = fresh("bad");
    std::ofstream(d / "bad.toml") << "[alpha]\nvalues = []\n";
    CHECK(run("sweep -c " + (d / "bad.toml").string()) == 2);
    std::ofstream(d / "unknown.toml") << "[domain]\nshape = 1\n";
    CHECK(run("hessian -c " + (d / "unknown.toml").string()) == 2);
    CHECK(run("validate --only 11" + small + "-o " + d.string()) == 2);
}

TEST_CASE("cli: interaction off gives the free electron") {
    const fs::path d = fresh("off");
    REQUIRE(run("solve-pekar --coupling-scale 0" + small + "-o " + d.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(d / "pekar.json"));
    CHECK(j["e_pek"].get<double>() == doctest::Approx(j["lambda_1"].get<double>()).epsilon(1e-12));
    CHECK(j["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("cli: outputs are deterministic") {
    const fs::path a = fresh("det_a"), b = fresh("det_b");
    for (const auto& d : {a, b}) {
        REQUIRE(run("hessian" + small + "-o " + d.string()) == 0);
        REQUIRE(run("series --b-max 4 --levels 1 2" + small + "-o " + d.string()) == 0);
    }
    for (const char* f : {"tau.csv", "ladder.csv", "series.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
}

TEST_CASE("cli: series odd orders vanish") {
    const fs::path d = fresh("series");
    REQUIRE(run("series --b-max 4 --levels 1" + small + "-o " + d.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(d / "series.json"));
    const auto E = j["levels"][0]["E"].get<std::vector<double>>();
    REQUIRE(E.size() == 5);
    CHECK(E[1] == 0.0);
    CHECK(E[3] == 0.0);
    CHECK(E[2] != 0.0);
}

TEST_CASE("cli: sweep then gross-check") {
    const fs::path d = fresh("sweep");
    REQUIRE(run("sweep --b-max 2 --levels 1 --alpha-min 20 --alpha-max 80 --alpha-count 4" + small + "-o " +
                d.string()) == 0);
    CHECK(fs::exists(d / "sweep.csv"));
    const auto j = nlohmann::json::parse(slurp(d / "fits.json"));
    CHECK(j["fits"].size() == 3);
    REQUIRE(run("gross-check" + small + "-o " + d.string()) == 0);
    CHECK(fs::exists(d / "gross.csv"));
}
