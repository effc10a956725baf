#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "antilde/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("antilde-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Result cli(const std::string& args, const fs::path& dir) {
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + ANTILDE_CLI_PATH + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                            "\" 2> \"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(raw));
    return {WEXITSTATUS(raw), slurp(err)};
}

} // namespace

TEST_CASE("all stages succeed inside the envelope") {
    for (const char* prime : {"2", "3"}) {
        const auto dir = scratch(std::string("all-") + prime);
        const auto r = cli(std::string("all --prime ") + prime + " --out \"" + (dir / "out").string() + "\"", dir);
        CHECK(r.status == antilde::kExitOk);
        for (const char* f : {"geometry.txt", "building.txt", "search.txt", "validation.txt", "coinvariants.txt",
                              "abelianization.txt", "certificate.txt", "presentation-0.txt"})
            CHECK(fs::exists(dir / "out" / f));
        const auto geometry = slurp(dir / "out" / "geometry.txt");
        CHECK(geometry.find("format-version = antilde-report-1") != std::string::npos);
        CHECK(geometry.find("table-checksum = ") != std::string::npos);
        CHECK(slurp(dir / "out" / "coinvariants.txt").find("upper-bound presentation") != std::string::npos);
        CHECK(slurp(dir / "out" / "certificate.txt").find("verdict = CERTIFIED") != std::string::npos);
    }
}

TEST_CASE("reports are deterministic") {
    const auto dir = scratch("determinism");
    REQUIRE(cli("all --seed 7 --out \"" + (dir / "a").string() + "\"", dir).status == 0);
    REQUIRE(cli("all --seed 7 --out \"" + (dir / "b").string() + "\"", dir).status == 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        ++files;
        CHECK(slurp(entry.path()) == slurp(dir / "b" / entry.path().filename()));
    }
    CHECK(files >= 8);
}

TEST_CASE("stages run on a given presentation") {
    const auto dir = scratch("given");
    REQUIRE(cli("search --out \"" + dir.string() + "\"", dir).status == 0);
    const auto file = (dir / "presentation-0.txt").string();
    for (const char* stage : {"validate", "coinvariants", "abelianization", "certify"})
        CHECK(cli(std::string(stage) + " --presentation \"" + file + "\" --out \"" + dir.string() + "\"", dir).status ==
              0);
    CHECK(slurp(dir / "validation.txt").find("presentation = " + file) != std::string::npos);
}

TEST_CASE("a corrupted presentation fails with a witness") {
    const auto dir = scratch("corrupt");
    REQUIRE(cli("search --out \"" + dir.string() + "\"", dir).status == 0);
    auto text = slurp(dir / "presentation-0.txt");
    // Drop the last tuple from the S array.
    const auto close = text.rfind("]]");
    const auto prev = text.rfind(", [", close);
    REQUIRE(prev != std::string::npos);
    text.erase(prev, close + 1 - prev);
    std::ofstream(dir / "bad.txt", std::ios::binary) << text;
    const auto r = cli("validate --presentation \"" + (dir / "bad.txt").string() + "\" --out \"" + dir.string() + "\"", dir);
    CHECK(r.status == antilde::kExitAssertion);
    const auto report = slurp(dir / "validation.txt");
    CHECK(report.find("failure V2: rotation") != std::string::npos);
    CHECK(report.find("failure V4: 20 tuples, expected 21") != std::string::npos);
    CHECK(cli("certify --presentation \"" + (dir / "bad.txt").string() + "\" --out \"" + dir.string() + "\"", dir)
              .status == antilde::kExitAssertion);

    std::ofstream(dir / "garbage.txt") << "format = antpres-1\nn = two\nq = 2\nlambda = [0]\nS = []\n";
    const auto g = cli("validate --presentation \"" + (dir / "garbage.txt").string() + "\" --out \"" + dir.string() + "\"", dir);
    CHECK(g.status == antilde::kExitConfig);
    CHECK(g.err.find("line 2, field 'n'") != std::string::npos);
}

TEST_CASE("precision and parameter errors") {
    const auto dir = scratch("errors");
    const auto low = cli("building-verify --precision 1 --out \"" + dir.string() + "\"", dir);
    CHECK(low.status == antilde::kExitConfig);
    CHECK(low.err.find("--precision 2") != std::string::npos);
    CHECK(cli("building-verify --precision 3 --out \"" + dir.string() + "\"", dir).status == 0);
    CHECK(cli("geometry --prime 4 --out \"" + dir.string() + "\"", dir).status == antilde::kExitConfig);
    CHECK(cli("geometry --dim 1 --out \"" + dir.string() + "\"", dir).status == antilde::kExitConfig);
    CHECK(cli("nonsense", dir).status == antilde::kExitConfig);
    CHECK(cli("--help", dir).status == 0);
}

TEST_CASE("envelope") {
    const auto dir = scratch("envelope");
    const auto refused = cli("geometry --prime 5 --out \"" + dir.string() + "\"", dir);
    CHECK(refused.status == antilde::kExitConfig);
    CHECK(refused.err.find("--unbounded") != std::string::npos);
    const auto allowed = cli("geometry --prime 5 --unbounded --out \"" + dir.string() + "\"", dir);
    CHECK(allowed.status == 0);
    CHECK(allowed.err.find("warning") != std::string::npos);
    CHECK(cli("geometry --dim 3 --out \"" + dir.string() + "\"", dir).status == antilde::kExitConfig);
    CHECK(cli("geometry --dim 3 --unbounded --out \"" + dir.string() + "\"", dir).status == 0);

    antilde::RunConfig config;
    config.command = "geometry";
    CHECK(config.within_envelope());
    config.precision = 4;
    CHECK_FALSE(config.within_envelope());
}
