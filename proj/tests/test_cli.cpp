#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "slowmix");
  std::ostringstream out, err;
  const int code = slowmix::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "slowmix_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("analyze reports theta for the cyclic example") {
  const Result r = run({"analyze", "--network", fixtures::data("example32_a2.net")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["theta"]["theta"] == 2);
  CHECK(j["theta"]["theta1"] == 1);
  CHECK(j["assumptions"]["ok"] == true);
  CHECK(j["dominating_paths"]["excursions"].size() == 1);
  CHECK(j.contains("version"));

  const Result four = run({"analyze", "--network", fixtures::data("cyclic_2_5_9.net")});
  REQUIRE(four.code == 0);
  CHECK(nlohmann::json::parse(four.out)["theta"]["theta"] == 3);
}

TEST_CASE("analyze exit codes") {
  const Result unsupported = run({"analyze", "--network", fixtures::data("model12.net")});
  CHECK(unsupported.code == 2);
  CHECK(nlohmann::json::parse(unsupported.err)["error"] == "unsupported-class");

  const Result malformed = run({"analyze", "--network", fixtures::data("malformed.net")});
  CHECK(malformed.code == 1);
  const auto e = nlohmann::json::parse(malformed.err);
  CHECK(e["error"] == "parse");
  CHECK(e["line"] == 1);

  CHECK(run({"analyze", "--network", fixtures::data("missing.net")}).code == 1);
  CHECK(run({"analyze"}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("path-prob prints exact rationals") {
  const Result r = run({"path-prob", "--network", fixtures::data("model12.net"), "--paths",
                        fixtures::data("model12.paths"), "--n-grid", "10"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("10,cycle,0,11/13,") != std::string::npos);

  const Result automatic = run({"path-prob", "--network", fixtures::data("example32_a2.net"), "--auto", "--n-grid",
                                "0,100", "--format", "json"});
  REQUIRE(automatic.code == 0);
  const auto j = nlohmann::json::parse(automatic.out);
  // The cycle fits from (0, 0); the excursion ends at (-1, 0).
  CHECK(j["rows"][0]["exact"] == "8/25");
  CHECK(j["rows"][1]["exact"] == "infeasible");
  bool complement = false;
  for (const auto& row : j["rows"])
    if (row["n"] == 100 && row["set"] == "complement-cycles") complement = true;
  CHECK(complement);

  CHECK(run({"path-prob", "--network", fixtures::data("model12.net"), "--n-grid", "10"}).code == 1);
  CHECK(run({"path-prob", "--network", fixtures::data("model12.net"), "--auto", "--n-grid", "10"}).code == 2);
}

TEST_CASE("fpt with two trajectories") {
  const Result r = run({"fpt", "--network", fixtures::data("model12.net"), "--n-grid", "20,40", "--M", "2",
                        "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("n,mean,stderr,completed,capped\n", 0) == 0);
  CHECK(r.out.find("# slope=") != std::string::npos);

  const Result inside = run({"fpt", "--network", fixtures::data("model12.net"), "--n-grid", "3,4", "--M", "2",
                             "--query", "sup:5"});
  REQUIRE(inside.code == 0);
  CHECK(inside.out.find("3,0,0,2,0") != std::string::npos);
  CHECK(run({"fpt", "--network", fixtures::data("model12.net"), "--query", "C:5"}).code == 1);
}

TEST_CASE("mixing guard and near-one threshold") {
  const auto net = scratch("unbalanced.net");
  std::ofstream(net) << "0 -> A + B @ 2\nA + B -> 0 @ 1\nB <-> 2 B @ 1, 1\n";
  const Result guard = run({"mixing", "--network", net.string(), "--n-grid", "10"});
  CHECK(guard.code == 2);
  CHECK(nlohmann::json::parse(guard.err)["error"] == "guard");

  const Result loose = run({"mixing", "--network", fixtures::data("model12.net"), "--n-grid", "2,3", "--delta",
                            "0.999", "--M", "50", "--window", "0:30,0:30", "--format", "json"});
  REQUIRE(loose.code == 0);
  for (const auto& row : nlohmann::json::parse(loose.out)["rows"]) CHECK(row["t_mix"] == 100.0);
}

TEST_CASE("mixing accepts a reference pmf from stationary") {
  const auto pmf = scratch("pi.csv");
  REQUIRE(run({"stationary", "--network", fixtures::data("model12.net"), "--window", "0:30,0:30", "--out",
               pmf.string()})
              .code == 0);
  const Result r = run({"mixing", "--network", fixtures::data("model12.net"), "--reference", pmf.string(),
                        "--n-grid", "20", "--M", "20", "--grid", "50"});
  CHECK(r.code == 0);
  CHECK(run({"mixing", "--network", fixtures::data("model12.net"), "--reference", pmf.string(), "--window",
             "0:10,0:10", "--n-grid", "20"})
            .code == 1);
}

TEST_CASE("stationary reports the balance residual") {
  const Result ok = run({"stationary", "--network", fixtures::data("example32_a2.net"), "--c", "1,1", "--window",
                         "0:12,0:12", "--format", "json"});
  REQUIRE(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  double residual = 1.0;
  for (const auto& row : j["rows"])
    if (row["quantity"] == "generator_residual") residual = row["value"];
  CHECK(residual < 1e-9);

  const Result off = run({"stationary", "--network", fixtures::data("model12.net"), "--c", "2,1", "--window",
                          "0:12,0:12"});
  CHECK(off.code == 0);
  CHECK(off.out.find("complex_balanced,false") != std::string::npos);
  CHECK(off.out.find("# warning=") != std::string::npos);

  const Result degenerate = run({"stationary", "--network", fixtures::data("model12.net"), "--window", "0:0,0:0"});
  CHECK(degenerate.code == 1);
  CHECK(degenerate.err.find("degenerate window") != std::string::npos);
}

TEST_CASE("simulate writes deterministic CSVs") {
  const auto a = scratch("traj_a.csv");
  const auto b = scratch("traj_b.csv");
  const auto bs = scratch("boundary.csv");
  const std::string net = fixtures::data("model12.net");
  REQUIRE(run({"simulate", "--network", net, "--init", "50,10", "--t-max", "200", "--seed", "4", "--out",
               a.string(), "--boundary-out", bs.string()})
              .code == 0);
  REQUIRE(run({"simulate", "--network", net, "--init", "50,10", "--t-max", "200", "--seed", "4", "--out", b.string()})
              .code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("t,reaction,A,B\n", 0) == 0);
  CHECK(slurp(bs).rfind("i,nu,mu,z_A\n", 0) == 0);

  const Result empty = run({"simulate", "--network", net, "--init", "5,0", "--t-max", "0"});
  REQUIRE(empty.code == 0);
  CHECK(empty.out == "t,reaction,A,B\n");

  CHECK(run({"simulate", "--network", net, "--init", "5"}).code == 1);
  CHECK(run({"simulate", "--network", net, "--init", "5,-1"}).code == 1);
}

TEST_CASE("seed falls back to the environment") {
  const std::string net = fixtures::data("model12.net");
  setenv("SLOWMIX_SEED", "4", 1);
  const Result env = run({"simulate", "--network", net, "--init", "20,0", "--t-max", "50"});
  unsetenv("SLOWMIX_SEED");
  const Result flag = run({"simulate", "--network", net, "--init", "20,0", "--t-max", "50", "--seed", "4"});
  const Result other = run({"simulate", "--network", net, "--init", "20,0", "--t-max", "50", "--seed", "5"});
  CHECK(env.out == flag.out);
  CHECK(env.out != other.out);
}
