#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(NESTLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int rc = pclose(p);
    return {WEXITSTATUS(rc), out};
}

}  // namespace

TEST_CASE("kappa command") {
    auto r = run("kappa --m 2..4 --no-cache");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"kappa\": 1.0") != std::string::npos);
    CHECK(r.out.find("1.2337") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    auto r = run("puzzle -c -1 --limb nonsense --no-cache");
    CHECK(r.exit_code == 1);
    auto r2 = run("definitely-not-a-command");
    CHECK(r2.exit_code != 0);
}

TEST_CASE("math errors exit 2") {
    // c = 1/4 has degenerate fixed points: puzzle construction fails
    auto r = run("puzzle -c 0.25 --limb 1/2 --depth 1 --no-cache");
    CHECK(r.exit_code == 2);
}

TEST_CASE("find fibonacci and cache determinism") {
    std::string cache = "/tmp/nestlab-test-cache";
    std::string rm = "rm -rf " + cache;
    REQUIRE(std::system(rm.c_str()) == 0);
    auto r1 = run("find --target fibonacci --tol 1e-8 --cache " + cache);
    CHECK(r1.exit_code == 0);
    CHECK(r1.out.find("-1.87052863") != std::string::npos);
    CHECK(r1.out.find("\"cache\": \"miss\"") != std::string::npos);
    auto r2 = run("find --target fibonacci --tol 1e-8 --cache " + cache);
    CHECK(r2.out.find("\"cache\": \"hit\"") != std::string::npos);
    // identical result subtrees: strip timing/cache lines
    auto strip = [](std::string s) {
        std::istringstream is(s);
        std::string line, out;
        while (std::getline(is, line)) {
            if (line.find("timing_ms") != std::string::npos) continue;
            if (line.find("\"cache\"") != std::string::npos) continue;
            out += line + "\n";
        }
        return out;
    };
    CHECK(strip(r1.out) == strip(r2.out));
}

TEST_CASE("puzzle command with render") {
    auto r = run("puzzle -c -1 --limb 1/2 --depth 2 --no-cache --render /tmp/nl-test.png "
                 "--svg /tmp/nl-test.svg");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"markov_violations\": []") != std::string::npos);
    // PNG signature present
    std::ifstream png("/tmp/nl-test.png", std::ios::binary);
    REQUIRE(png.good());
    unsigned char sig[8];
    png.read((char*)sig, 8);
    CHECK(sig[0] == 137);
    CHECK(sig[1] == 'P');
    std::ifstream svg("/tmp/nl-test.svg");
    REQUIRE(svg.good());
    std::string first;
    std::getline(svg, first);
    CHECK(first.find("<svg") != std::string::npos);
}

TEST_CASE("chebyshev command matches the printed prefix") {
    auto r = run("chebyshev --length 20 --no-cache");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("LRRLLLRLLLLRRLRLRLLL") != std::string::npos);
    CHECK(r.out.find("\"admissible\": true") != std::string::npos);
}
