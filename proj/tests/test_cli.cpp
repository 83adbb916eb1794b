#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#ifndef TEPREACH_BIN
#error "TEPREACH_BIN must point at the CLI binary"
#endif
#ifndef TEPREACH_PROBLEMS
#error "TEPREACH_PROBLEMS must point at the problems directory"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(TEPREACH_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), (int)buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string problem(const std::string& name) {
    return std::string(TEPREACH_PROBLEMS) + "/" + name;
}

}  // namespace

TEST_CASE("factor subcommand") {
    auto r = run("factor \"1 - cos(x)^3 - sin(x)^3\"");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("constant:") != std::string::npos);
    CHECK(r.output.find("multiplicity 2") != std::string::npos);
    CHECK(r.output.find("square-free: no") != std::string::npos);

    auto sq = run("factor \"sin(x)\"");
    CHECK(sq.exit_code == 0);
    CHECK(sq.output.find("square-free: yes") != std::string::npos);
}

TEST_CASE("sign subcommand and exit codes") {
    auto neg = run("sign \"sin(x) - x\" 0 1");
    CHECK(neg.exit_code == 0);
    CHECK(neg.output.find("Negative") != std::string::npos);

    auto mixed = run("sign \"sin(x) - 1/2\" 0 3");
    CHECK(mixed.exit_code == 1);
    CHECK(mixed.output.find("Mixed") != std::string::npos);

    auto bad = run("sign \"sin(\" 0 1");
    CHECK(bad.exit_code == 3);
}

TEST_CASE("isolate subcommand") {
    auto r = run("isolate \"exp(-x)\" 0 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0 root(s)") != std::string::npos);

    auto two = run("isolate \"sin(x) - 1/2\" 0 3 --json");
    CHECK(two.exit_code == 0);
    auto j = nlohmann::json::parse(two.output);
    CHECK(j["roots"].size() == 2);
}

TEST_CASE("reach subcommand with problem files") {
    auto safe = run("reach " + problem("constant_safe.problem"));
    CHECK(safe.exit_code == 0);
    CHECK(safe.output.find("Safe") != std::string::npos);

    auto missing = run("reach /nonexistent.problem");
    CHECK(missing.exit_code == 3);
}

TEST_CASE("reach reports are byte-identical across runs") {
    std::string args = "reach " + problem("pollution_T1000.problem") + " --json";
    auto a = run(args);
    auto b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    auto j = nlohmann::json::parse(a.output);
    CHECK(j["command"] == "reach");
    CHECK(j["verdict"] == "Safe");
    CHECK(j["certificates"]["order_used"] == 2);
    CHECK(j.contains("options"));
    CHECK(!j.contains("timings"));  // timings only on request, for reproducibility
    auto t = run(args + " --timings");
    auto jt = nlohmann::json::parse(t.output);
    CHECK(jt.contains("timings"));
}

TEST_CASE("malformed problem files are input errors") {
    std::string path = "/tmp/tepreach_bad.problem";
    std::ofstream(path) << "system:\n  row 1 2\n  row 3\nhorizon: 1\n";
    auto r = run("reach " + path);
    CHECK(r.exit_code == 3);
    std::remove(path.c_str());
}
