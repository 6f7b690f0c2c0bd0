#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "maldist/cli.hpp"

using namespace maldist;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  std::ostringstream out, err;
  std::istringstream in(input);
  int status = run_cli(args, out, err, in);
  return {status, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("maldist_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("documented invocations") {
    Run g = run({"galpha", "--phi", "upper-density", "--alpha", "1/2", "--n", "2"});
    CHECK(g.status == 0);
    CHECK(g.out == "6\n");

    Run i = run({"gap-to-intervals", "--gap", "(affine 1 1)", "--count", "3"});
    CHECK(i.status == 0);
    CHECK(i.out == "[0,1] [2,5] [6,13]\n");

    Run c = run({"check2", "--gap", "(const 0)", "--set", "(ap 0 2)", "--horizon", "1000", "--json"});
    CHECK(c.status == 1);
    nlohmann::json j = nlohmann::json::parse(c.out);
    CHECK(j["status"] == "verification-failure");
    REQUIRE(j["result"]["witnesses"].size() == 500);
    for (const auto& n : j["result"]["witnesses"]) CHECK(n.get<std::uint64_t>() % 2 == 1);
  }

  TEST_CASE("usage and config errors") {
    Run bogus = run({"galpha", "--bogus"});
    CHECK(bogus.status == 2);
    CHECK(bogus.err.find("Grammar reference") != std::string::npos);
    CHECK(run({}).status == 2);
    CHECK(run({"frobnicate"}).status == 2);
    CHECK(run({"set", "--set", "(ap 0 0)"}).status == 2);
    CHECK(run({"set"}).status == 2);
    CHECK(run({"check2", "--gap", "(const 0)", "--set", "(ap 0 2)", "--horizon", "0"}).status == 2);
    CHECK(run({"galpha", "--phi", "upper-density", "--alpha", "0.5", "--n", "2"}).status == 2);
    CHECK(run({"galpha", "--phi", "counting", "--alpha", "1/2", "--n", "2"}).status == 1);
    CHECK(run({"laflamme-play", "--eta", "(1/2)", "--u", "(ball (1/2) 1/4)", "--v", "(ball (0) 1/8)",
               "--rounds", "2", "--adversary", "(fixed 5 3)"})
              .status == 2);
  }

  TEST_CASE("config files") {
    auto path = temp_path("config.cfg");
    {
      std::ofstream f(path);
      f << "# g_alpha of the upper density\n"
        << "phi = upper-density\n"
        << "alpha = 1/2\n"
        << "count = 5\n";
    }
    Run a = run({"galpha", "--config", path.string()});
    CHECK(a.status == 0);
    CHECK(a.out == "0 0 6 13 20\n");
    // flags win over the file
    Run b = run({"galpha", "--config", path.string(), "--alpha", "3/4"});
    Run c = run({"galpha", "--phi", "upper-density", "--alpha", "3/4", "--count", "5"});
    CHECK(b.out == c.out);
    {
      std::ofstream f(path);
      f << "phi = upper-density\nwidth = 3\n";
    }
    CHECK(run({"galpha", "--config", path.string()}).status == 2);
    std::filesystem::remove(path);
  }

  TEST_CASE("reports embed config and seed") {
    Run r = run({"axioms", "--phi", "upper-density", "--samples", "20", "--horizon", "200", "--seed", "17", "--json"});
    CHECK(r.status == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "axioms");
    CHECK(j["seed"] == 17);
    CHECK(j["config"]["phi"] == "upper-density");
    CHECK(j["config"]["samples"] == "20");
    CHECK(j["result"][0]["seed"] == 17);
  }

  TEST_CASE("every subcommand runs") {
    const std::vector<std::vector<std::string>> ok = {
        {"set", "--set", "(union (ap 0 3) (fin 1))", "--member", "4"},
        {"phi", "--phi", "harmonic", "--set", "(iv 0 3)"},
        {"mass", "--phi", "upper-density", "--set", "(ap 0 2)"},
        {"gap", "--gap", "(gap table (1 2) (affine 1 0))"},
        {"witness", "--witness", "(witness dyadic)", "--set", "(tail 5)"},
        {"gap-to-intervals", "--gap", "(const 2)"},
        {"check2", "--gap", "(const 1)", "--set", "(ap 0 2)"},
        {"galpha", "--phi", "upper-density", "--alpha", "1/2", "--count", "4"},
        {"verify-lscsm", "--phi", "upper-density", "--alpha", "1/2", "--set", "(not (ap 0 4))", "--horizon", "500"},
        {"generate", "--space", "(cube 2)", "--length", "5"},
        {"maldist", "--grid", "2", "--horizon", "4096"},
        {"cluster", "--eta", "(0)", "--horizon", "4096"},
        {"bm-play", "--space", "(discrete 2)", "--eta", "1", "--rounds", "4"},
        {"laflamme-play", "--eta", "(1/2)", "--u", "(ball (1/2) 1/4)", "--v", "(ball (0) 1/8)", "--rounds", "4"},
        {"adjudicate", "--eta", "(1/2)", "--u", "(ball (1/2) 1/4)", "--v", "(ball (0) 1/8)", "--rounds", "4",
         "--oracle", "(density-above 0)"},
        {"axioms", "--samples", "10", "--horizon", "100"},
    };
    for (const auto& args : ok) {
      Run r = run(args);
      CHECK_MESSAGE(r.status == 0, args[0] << ": " << r.err << r.out);
      Run j = run([&] {
        auto a = args;
        a.push_back("--json");
        return a;
      }());
      CHECK_NOTHROW((void)nlohmann::json::parse(j.out));
    }
    CHECK(run({"maldist", "--seq", "(seq constant (1/2))", "--grid", "2", "--horizon", "1024"}).status == 1);
  }

  TEST_CASE("interactive games read Player I from the input") {
    Run bm = run({"bm-play", "--eta", "(1/2)", "--rounds", "2", "--interactive"},
                 "(cylinder (ball 0 (7/4) 1))\n(cylinder (ball 0 (1/4) 1/8))\n");
    CHECK(bm.status == 0);
    CHECK(bm.out.find("illegal move") != std::string::npos);
    Run lf = run({"laflamme-play", "--eta", "(1/2)", "--u", "(ball (1/2) 1/4)", "--v", "(ball (0) 1/8)", "--rounds",
                  "2", "--interactive"},
                 "x\n2\n0\n40\n");
    CHECK(lf.status == 0);
    CHECK(lf.out.find("illegal move") != std::string::npos);
  }

  TEST_CASE("identical runs give identical bytes") {
    auto report_a = temp_path("a.json");
    auto report_b = temp_path("b.json");
    auto tr_a = temp_path("a.jsonl");
    auto tr_b = temp_path("b.jsonl");
    for (const char* cmd : {"bm-play", "laflamme-play"}) {
      std::vector<std::string> base = {cmd, "--space", "(cube 2)", "--eta", "(1/3 2/3)", "--rounds", "6", "--seed", "9"};
      if (std::string(cmd) == "laflamme-play") {
        base.insert(base.end(), {"--u", "(ball (1/3 2/3) 1/4)", "--v", "(ball (1 0) 1/4)", "--adversary",
                                 "(random-threshold)"});
      }
      auto a = base;
      a.insert(a.end(), {"--report", report_a.string(), "--transcript", tr_a.string()});
      auto b = base;
      b.insert(b.end(), {"--report", report_b.string(), "--transcript", tr_b.string()});
      Run ra = run(a);
      Run rb = run(b);
      CHECK(ra.status == 0);
      CHECK(ra.out == rb.out);
      CHECK(slurp(tr_a) == slurp(tr_b));
      CHECK_FALSE(slurp(tr_a).empty());
      // report bodies differ only in the output paths they record
      nlohmann::json ja = nlohmann::json::parse(slurp(report_a));
      nlohmann::json jb = nlohmann::json::parse(slurp(report_b));
      ja["config"].erase("report");
      jb["config"].erase("report");
      ja["config"].erase("transcript");
      jb["config"].erase("transcript");
      CHECK(ja.dump() == jb.dump());
    }
    for (auto p : {report_a, report_b, tr_a, tr_b}) std::filesystem::remove(p);
  }
}
