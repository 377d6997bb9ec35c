#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mstream/cli.hpp"
#include "mstream/rat.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mstream");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mstream::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string prog(const std::string& name) { return std::string(MSTREAM_PROGRAMS_DIR) + "/" + name; }

// Writes `text` to a fresh file under the temp directory.
std::string scratch(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "mstream_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

std::vector<json> records(const std::string& out) {
  std::vector<json> r;
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);) r.push_back(json::parse(line));
  return r;
}

struct EnvGuard {
  EnvGuard(const char* k, const char* v) : key(k) { setenv(k, v, 1); }
  ~EnvGuard() { unsetenv(key); }
  const char* key;
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run prints one record per step") {
    auto r = cli({"run", prog("fib.mstr"), "fib", "--steps", "10"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    auto recs = records(r.out);
    REQUIRE(recs.size() == 10);
    const std::vector<int> want{0, 1, 1, 2, 3, 5, 8, 13, 21, 34};
    for (std::size_t t = 0; t < 10; ++t) {
      CHECK(recs[t]["t"] == t);
      CHECK(recs[t]["out"] == json::array({want[t]}));
    }
  }

  TEST_CASE("same seed, same bytes") {
    auto a = cli({"run", prog("walk.mstr"), "walk", "--steps", "50", "--seed", "9"});
    auto b = cli({"run", prog("walk.mstr"), "walk", "--steps", "50", "--seed", "9"});
    auto c = cli({"run", prog("walk.mstr"), "walk", "--steps", "50", "--seed", "10"});
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(cli({"run", prog("walk.mstr"), "walk", "--steps", "50"}).out ==
          cli({"run", prog("walk.mstr"), "walk", "--steps", "50", "--seed", "0"}).out);
  }

  TEST_CASE("joint walk distribution: four equiprobable histories") {
    auto r = cli({"dist", prog("walk.mstr"), "walk", "--steps", "2", "--joint"});
    REQUIRE(r.code == 0);
    auto recs = records(r.out);
    REQUIRE(recs.size() == 1);
    const auto& joint = recs[0]["joint"];
    REQUIRE(joint.size() == 4);
    for (const auto& e : joint) {
      CHECK(e["p"] == "1/4");
      CHECK(e["value"][0] == json::array({0}));
      CHECK(std::abs(e["value"][1][0].get<int>()) == 1);
    }
  }

  TEST_CASE("marginal records carry exact weights summing to one") {
    auto r = cli({"dist", prog("ehrenfest.mstr"), "urns", "--steps", "4"});
    REQUIRE(r.code == 0);
    auto recs = records(r.out);
    REQUIRE(recs.size() == 5);
    for (const auto& rec : recs) {
      mstream::Rat total;
      for (const auto& e : rec["dist"]) total += mstream::Rat::parse(e["p"].get<std::string>());
      CHECK(total == mstream::Rat(1));
    }
  }

  TEST_CASE("csv spreads tuples over columns") {
    auto r = cli({"run", prog("ehrenfest.mstr"), "urns", "--steps", "2", "--format", "csv"});
    CHECK(r.out.rfind("t,out.0,out.1\n0,{1 2 3 4},{}\n", 0) == 0);
    auto d = cli({"dist", prog("walk.mstr"), "walk", "--steps", "1", "--format", "csv"});
    CHECK(d.out == "t,out,p\n0,0,1/1\n1,-1,1/2\n1,1,1/2\n");
  }

  TEST_CASE("equivalence verdicts and exit codes") {
    CHECK(cli({"equiv", prog("silent.mstr"), "silent", "nothing", "--depth", "5"}).code == 0);
    const auto file = scratch("coins.mstr",
                              "stream a : Int = unif(0, 1)\n"
                              "stream b : Int = 0 fby unif(0, 1)\n");
    auto r = cli({"equiv", file, "a", "b", "--depth", "3"});
    CHECK(r.code == 4);
    auto rep = json::parse(r.out);
    CHECK(rep["verdict"] == "differ");
    CHECK(rep["step"] == 0);
  }

  TEST_CASE("causal and laws") {
    auto c = cli({"causal", prog("walk.mstr"), "walk", "--depth", "4"});
    CHECK(c.code == 0);
    CHECK(json::parse(c.out)["verdict"] == "causal");
    auto l = cli({"laws", "--instances", "3", "--depth", "2", "--seed", "5"});
    CHECK(l.code == 0);
    auto rep = json::parse(l.out);
    CHECK(rep["axioms"]["verdict"] == "pass");
    CHECK(rep["category"]["laws"].size() == 9);
  }

  TEST_CASE("check lists inputs and definitions") {
    const auto file = scratch("typed.mstr", "domain Bit = {0, 1}\ninput x : Bit\nstream d : @Int = wait(x + 1)\n");
    auto r = cli({"check", file});
    CHECK(r.code == 0);
    CHECK(r.out == "input x : Bit\nd : @Int\n");
  }

  TEST_CASE("inputs are read from JSON") {
    const auto file = scratch("acc.mstr", "domain Bit = {0, 1}\ninput x : Bit\nstream s : Int = x fby (s + wait(x))\n");
    auto r = cli({"run", file, "s", "--steps", "4", "--inputs", "[[1],[0],[1],[1]]"});
    REQUIRE(r.code == 0);
    auto recs = records(r.out);
    CHECK(recs[3]["out"] == json::array({3}));  // 1, 1+1, 2+0, 2+1
    CHECK(cli({"run", file, "s", "--steps", "4"}).code == 64);
    CHECK(cli({"run", file, "s", "--steps", "4", "--inputs", "[[1],[0]]"}).code == 64);
    CHECK(cli({"run", file, "s", "--steps", "2", "--inputs", "[[1],[7]]"}).code == 66);
    auto d = cli({"dist", file, "s", "--steps", "1", "--inputs", "[[1],[1]]"});
    CHECK(records(d.out)[1]["dist"][0]["value"] == json::array({2}));
  }

  TEST_CASE("every error goes to the error channel with its exit code") {
    const auto bad_syntax = scratch("bad1.mstr", "stream x : Int = )\n");
    const auto bad_type = scratch("bad2.mstr", "stream bad : Int = wait(bad)\n");
    const auto no_domain = scratch("bad3.mstr", "input x : Int\nstream s : Int = x\n");
    struct Case {
      std::vector<std::string> args;
      int code;
      const char* says;
    };
    const std::vector<Case> cases{
        {{"check", bad_syntax}, 1, "syntax error at ')'"},
        {{"check", bad_type}, 2, "delay mismatch"},
        {{"dist", prog("walk.mstr"), "walk", "--steps", "6", "--support-cap", "4"}, 3, "support overflow"},
        {{"bogus"}, 64, "Usage"},
        {{"run", prog("fib.mstr"), "fib", "--steps", "3", "--frobnicate"}, 64, "frobnicate"},
        {{"run", prog("fib.mstr"), "fib", "--steps", "-1"}, 64, "error"},
        {{"check", "/nonexistent/x.mstr"}, 65, "cannot read"},
        {{"run", prog("fib.mstr"), "fob", "--steps", "3"}, 65, "no stream named 'fob'"},
        {{"equiv", no_domain, "s", "s", "--depth", "2"}, 66, "domain"},
    };
    for (const auto& c : cases) {
      CAPTURE(c.args[0]);
      auto r = cli(c.args);
      CHECK(r.code == c.code);
      CHECK(r.out.empty());
      CHECK(r.err.find(c.says) != std::string::npos);
    }
  }

  TEST_CASE("the support cap can come from the environment") {
    EnvGuard env("MSTREAM_SUPPORT_CAP", "4");
    CHECK(cli({"dist", prog("walk.mstr"), "walk", "--steps", "6"}).code == 3);
    CHECK(cli({"dist", prog("walk.mstr"), "walk", "--steps", "6", "--support-cap", "100"}).code == 0);
  }

  TEST_CASE("the installed tool keeps stdout and stderr apart") {
    const fs::path dir = fs::temp_directory_path() / "mstream_cli_test";
    fs::create_directories(dir);
    const std::string out = (dir / "out.txt").string(), err = (dir / "err.txt").string();
    auto sh = [&](const std::string& args) {
      const int status = std::system((std::string(MSTREAM_TOOL) + " " + args + " >" + out + " 2>" + err).c_str());
      return WEXITSTATUS(status);
    };
    auto slurp = [](const std::string& p) {
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    CHECK(sh("run " + prog("fib.mstr") + " fib --steps 3") == 0);
    CHECK(slurp(out) == "{\"t\":0,\"out\":[0]}\n{\"t\":1,\"out\":[1]}\n{\"t\":2,\"out\":[1]}\n");
    CHECK(slurp(err).empty());
    CHECK(sh("equiv " + prog("silent.mstr") + " walk nothing --depth 2") == 2);
    CHECK(slurp(out).empty());
    CHECK_FALSE(slurp(err).empty());
  }
}
