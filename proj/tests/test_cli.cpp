#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string bin() {
  const char* b = std::getenv("TRINET_BIN");
  REQUIRE(b != nullptr);
  return b;
}

std::string tmp_dir() {
  const char* t = std::getenv("TMPDIR");
  return (t != nullptr ? std::string(t) : std::string("/tmp")) + "/trinet_cli";
}

int run(const std::string& args, const std::string& out_file = "/dev/null") {
  const std::string cmd = bin() + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("wdist emits the spec JSON schema") {
  const std::string d = tmp_dir();
  REQUIRE(std::system(("mkdir -p " + d).c_str()) == 0);
  CHECK(run("wdist --v 1", d + "/w1.json") == 0);
  const auto j = nlohmann::json::parse(slurp(d + "/w1.json"));
  CHECK(j["order"] == "abc");
  CHECK(j["p"].size() == 8);
  CHECK(j["p"][1].get<double>() == 1.0 / 3.0);
  CHECK(j["p"][0].get<double>() == 0.0);

  CHECK(run("wdist --v 0", d + "/w0.json") == 0);
  const auto j0 = nlohmann::json::parse(slurp(d + "/w0.json"));
  for (int i = 0; i < 8; ++i) CHECK(j0["p"][i].get<double>() == 0.125);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("wdist --v 2") == 2);
  CHECK(run("wdist") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("model fit --v 0.5 --no-such-flag 1") == 2);
  CHECK(run("seesaw --out-dir /tmp/x") == 2);  // missing target spec
}

TEST_CASE("model fit/eval round trip") {
  const std::string d = tmp_dir();
  REQUIRE(std::system(("mkdir -p " + d).c_str()) == 0);
  CHECK(run("model fit --v 1/2", d + "/fit.json") == 0);
  const auto fit = nlohmann::json::parse(slurp(d + "/fit.json"));
  CHECK(fit["l2"].get<double>() <= 1e-10);

  std::ofstream(d + "/params.json") << fit["params"].dump();
  CHECK(run("model eval --params " + d + "/params.json", d + "/dist.json") == 0);
  const auto dist = nlohmann::json::parse(slurp(d + "/dist.json"));
  CHECK(run("wdist --v 1/2", d + "/w05.json") == 0);
  const auto wj = nlohmann::json::parse(slurp(d + "/w05.json"));
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(dist["p"][i].get<double>() - wj["p"][i].get<double>()) <=
          1e-8);
}

TEST_CASE("scan CSV carries the schema tag and digit-complete values") {
  const std::string d = tmp_dir();
  REQUIRE(std::system(("mkdir -p " + d).c_str()) == 0);
  CHECK(run("model scan --from 0.1 --to 0.12 --step 1/100 --out " + d +
            "/scan.csv") == 0);
  const std::string csv = slurp(d + "/scan.csv");
  CHECK(csv.rfind("# schema trinet.scan.v1\n", 0) == 0);
  CHECK(csv.find("v,p0,p_empty,omega,theta0,theta1,l2\n") != std::string::npos);
  // three data lines: 0.1, 0.11, 0.12
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 5);
}

TEST_CASE("local search and eval") {
  const std::string d = tmp_dir();
  REQUIRE(std::system(("mkdir -p " + d).c_str()) == 0);
  CHECK(run("local search --target w:0 --cards 1,1,1 --restarts 2 --seed 3",
            d + "/ls.json") == 0);
  const auto j = nlohmann::json::parse(slurp(d + "/ls.json"));
  CHECK(j["l2"].get<double>() <= 1e-10);

  std::ofstream(d + "/model.json") << j["model"].dump();
  CHECK(run("local eval --model " + d + "/model.json", d + "/le.json") == 0);
  const auto dist = nlohmann::json::parse(slurp(d + "/le.json"));
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(dist["p"][i].get<double>() - 0.125) <= 1e-9);
}

TEST_CASE("inflate exit codes and stats") {
  const std::string d = tmp_dir();
  REQUIRE(std::system(("mkdir -p " + d).c_str()) == 0);
  CHECK(run("inflate --level 1 --v 1") == 0);
  CHECK(run("inflate --level 2 --v 11/20") == 0);
  CHECK(run("inflate --level 2 --v 1 --exact-certificate --out " + d +
            "/cert.json") == 3);
  const auto cert = nlohmann::json::parse(slurp(d + "/cert.json"));
  CHECK(cert["verdict"] == "infeasible");
  CHECK(cert["certificate"]["verified_exact"].get<bool>());
  CHECK(run("inflate --level 3 --stats-only", d + "/stats.json") == 0);
  const auto stats = nlohmann::json::parse(slurp(d + "/stats.json"));
  CHECK(stats["parties"].get<int>() == 27);
  CHECK(run("inflate --level 3 --v 1") == 2);
}

TEST_CASE("seesaw bundle and byte determinism") {
  const std::string d = tmp_dir();
  REQUIRE(std::system(("mkdir -p " + d).c_str()) == 0);
  const std::string common =
      "seesaw --w 0.3 --dim 2 --restarts 2 --max-sweeps 25 --seed 11 "
      "--stop-at 1e-8 --out-dir ";
  CHECK(run(common + d + "/ss1") == 0);
  CHECK(run(common + d + "/ss2") == 0);
  for (const char* f :
       {"trace.csv", "summary.json", "tester_r.json", "tester_s.json",
        "tester_t.json"}) {
    CHECK(slurp(d + "/ss1/" + f) == slurp(d + "/ss2/" + f));
  }
  const auto summary = nlohmann::json::parse(slurp(d + "/ss1/summary.json"));
  CHECK(summary["l2"].get<double>() <= 1e-6);
}

TEST_CASE("repeated commands are byte identical") {
  const std::string d = tmp_dir();
  REQUIRE(std::system(("mkdir -p " + d).c_str()) == 0);
  CHECK(run("model scan --from 0.2 --to 0.22 --step 1/100 --out " + d +
            "/s1.csv") == 0);
  CHECK(run("model scan --from 0.2 --to 0.22 --step 1/100 --out " + d +
            "/s2.csv") == 0);
  CHECK(slurp(d + "/s1.csv") == slurp(d + "/s2.csv"));

  CHECK(run("inflate --level 2 --v 7/10 --exact-certificate --out " + d +
            "/c1.json") == 0);
  CHECK(run("inflate --level 2 --v 7/10 --exact-certificate --out " + d +
            "/c2.json") == 0);
  CHECK(slurp(d + "/c1.json") == slurp(d + "/c2.json"));
}
