#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

// Spawns the installed binary and checks observable behavior: output schema,
// exit codes, seed handling, and byte-level reproducibility across threads.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + EXPDD_CLI_PATH + " " + args +
                      " 2>/dev/null";
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<nlohmann::json> parse_lines(const std::string& out) {
    std::vector<nlohmann::json> lines;
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
    return lines;
}

}  // namespace

TEST_CASE("dd evaluates and prints the first-order value") {
    RunResult r = run("dd 0 1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("1.7182818284590453") != std::string::npos);
    CHECK(r.out.find("order 1") != std::string::npos);
}

TEST_CASE("dd jsonl schema") {
    RunResult r = run("dd 0 1 --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto lines = parse_lines(r.out);
    REQUIRE(lines.size() == 1);
    const auto& j = lines[0];
    CHECK(j.at("type") == "dd");
    CHECK(j.at("q") == 1);
    CHECK(j.at("factorial") == false);
    CHECK(j.at("sign") == 1);
    CHECK(double(j.at("value")) == doctest::Approx(1.7182818284590453).epsilon(1e-15));
}

TEST_CASE("multiplicity tokens and factorial normalization") {
    RunResult r = run("dd 0^4 --factorial --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto j = parse_lines(r.out).at(0);
    CHECK(j.at("q") == 3);
    CHECK(double(j.at("value")) == 1.0);
}

TEST_CASE("t = 0 reports the exact zero") {
    RunResult r = run("dd 0 1 --t 0 --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto j = parse_lines(r.out).at(0);
    CHECK(j.at("sign") == 0);
    CHECK(j.at("log_abs").is_null());
    CHECK(double(j.at("value")) == 0.0);
}

TEST_CASE("negative nodes through the --nodes option") {
    RunResult r = run("dd --nodes \"1 -1\" --factorial --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto j = parse_lines(r.out).at(0);
    CHECK(double(j.at("value")) == doctest::Approx(1.1752011936438014).epsilon(1e-15));
}

TEST_CASE("bounds in parameter mode") {
    RunResult r = run("bounds --n 1 --sigma 1 --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto j = parse_lines(r.out).at(0);
    CHECK(j.at("mode") == "parameters");
    CHECK(double(j.at("L")) == doctest::Approx(1.1752011936438014).epsilon(1e-13));
    CHECK(double(j.at("M")) == doctest::Approx(1.1752011936438014).epsilon(1e-13));
}

TEST_CASE("bounds in node mode runs the sandwich") {
    RunResult r = run("bounds --nodes \"-1 1\" --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto j = parse_lines(r.out).at(0);
    CHECK(j.at("mode") == "nodes");
    CHECK(j.at("pass") == true);
    CHECK(double(j.at("slack_lower")) >= -1e-10);
    CHECK(double(j.at("slack_upper")) >= -1e-10);
    // both modes at once is a usage error
    CHECK(run("bounds --nodes \"0 1\" --n 3 --sigma 1").exit_code == 2);
}

TEST_CASE("certify emits one record per trial plus a summary") {
    RunResult r = run("certify triangle --trials 50 --seed 7 --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto lines = parse_lines(r.out);
    REQUIRE(lines.size() == 51);
    int margins = 0;
    for (const auto& j : lines)
        if (j.at("type") == "margin") ++margins;
    CHECK(margins == 50);
    const auto& summary = lines.back();
    CHECK(summary.at("type") == "summary");
    CHECK(summary.at("kind") == "triangle");
    CHECK(summary.at("trials") == 50);
    CHECK(summary.at("failures") == 0);
    CHECK(summary.at("pass") == true);
    // degenerate draws must report exact zeros
    CHECK(summary.at("degenerate_trials") == summary.at("degenerate_exact"));
}

TEST_CASE("sandwich certify uses the slack record shape") {
    RunResult r = run("certify sandwich --trials 20 --seed 5 --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto lines = parse_lines(r.out);
    REQUIRE(lines.size() == 21);
    CHECK(lines[0].at("type") == "sandwich");
    CHECK(lines[0].contains("slack"));
    CHECK(lines[0].contains("nodes"));
}

TEST_CASE("identical output for any thread count") {
    std::string base = "certify fourpoint --trials 400 --seed 42 --format jsonl";
    RunResult one = run(base + " --threads 1");
    RunResult two = run(base + " --threads 2");
    RunResult four = run(base + " --threads 4");
    REQUIRE(one.exit_code == 0);
    CHECK(one.out == two.out);
    CHECK(one.out == four.out);
}

TEST_CASE("seed precedence: flag over environment over default") {
    std::string args = "certify triangle --trials 25 --format jsonl";
    RunResult env99 = run(args, "EXPDD_SEED=99");
    RunResult flag99 = run("certify triangle --trials 25 --seed 99 --format jsonl");
    RunResult both = run("certify triangle --trials 25 --seed 99 --format jsonl",
                         "EXPDD_SEED=7");
    RunResult def = run(args);
    RunResult flag100 = run("certify triangle --trials 25 --seed 100 --format jsonl");
    CHECK(env99.out == flag99.out);
    CHECK(both.out == flag99.out);
    CHECK(def.out != env99.out);
    CHECK(flag100.out != flag99.out);
}

TEST_CASE("selftest reports all seven identities") {
    RunResult r = run("selftest --trials 5 --seed 2 --format jsonl");
    REQUIRE(r.exit_code == 0);
    auto lines = parse_lines(r.out);
    int rows = 0, records = 0;
    for (const auto& j : lines) {
        if (j.at("type") == "identity_summary") {
            ++rows;
            CHECK(j.at("pass") == true);
        } else if (j.at("type") == "identity") {
            ++records;
        }
    }
    CHECK(rows == 7);
    CHECK(records == 35);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("certify bogus").exit_code == 2);
    CHECK(run("certify tn2 --trials 0").exit_code == 2);
    CHECK(run("dd").exit_code == 2);
    CHECK(run("dd abc").exit_code == 2);
    CHECK(run("dd 1^0").exit_code == 2);
    CHECK(run("").exit_code == 2);
    CHECK(run("bounds").exit_code == 2);
    CHECK(run("bounds --n 3").exit_code == 2);
    CHECK(run("certify triangle --trials 5", "EXPDD_SEED=notanumber").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("numeric overflow of the reduction path exits 3") {
    CHECK(run("dd 0^500 100^531").exit_code == 3);
}

TEST_CASE("failed checks exit 1") {
    // an impossibly tight tolerance turns roundoff into reported failures
    RunResult r = run("certify sandwich --trials 40 --seed 3 --tolerance 1e-18 "
                      "--format jsonl");
    CHECK(r.exit_code == 1);
    auto lines = parse_lines(r.out);
    const auto& summary = lines.back();
    CHECK(summary.at("type") == "summary");
    CHECK(summary.at("pass") == false);
    CHECK(int(summary.at("failures").get<long long>()) > 0);
    // adjudication lines classify each failure against the high-precision value
    bool saw_failure_record = false;
    for (const auto& j : lines)
        if (j.at("type") == "failure") {
            saw_failure_record = true;
            CHECK((j.at("class") == "working_precision_artifact" ||
                   j.at("class") == "confirmed_negative"));
        }
    CHECK(saw_failure_record);
}
