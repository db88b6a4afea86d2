#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cda/config.hpp"
#include "support/toy.hpp"

using namespace cda;

TEST_CASE("config parsing strips comments and whitespace") {
  ConfigMap c = ConfigMap::from_string(
      "# a comment\n"
      "  n = 500   # trailing comment\n"
      "name= hello world \n"
      "\n"
      "flag=true\n");
  CHECK(c.integer("n", 0) == 500);
  CHECK(c.get("name", "") == "hello world");
  CHECK(c.flag("flag", false));
  c.finish();
}

namespace {

template <typename Fn>
std::string thrown_message(Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("malformed lines and duplicates are named by position or key") {
  CHECK(thrown_message([] { ConfigMap::from_string("a=1\nnonsense\n"); })
            .find("line 2") != std::string::npos);
  CHECK(thrown_message([] { ConfigMap::from_string("a=1\na=2\n"); })
            .find("'a'") != std::string::npos);
}

TEST_CASE("unconsumed keys fail the run by name") {
  ConfigMap c = ConfigMap::from_string("known=1\nmystery_key=2\n");
  c.integer("known", 0);
  CHECK(thrown_message([&] { c.finish(); }).find("mystery_key") !=
        std::string::npos);
}

TEST_CASE("typed accessors validate their values") {
  ConfigMap c = ConfigMap::from_string("x=abc\nf=maybe\ns=-3\nl=a, b ,c\ni=1.5\n");
  CHECK_THROWS_AS(c.number("x", 0.0), ValidationError);
  CHECK_THROWS_AS(c.flag("f", false), ValidationError);
  CHECK_THROWS_AS(c.seed("s"), ValidationError);
  CHECK_THROWS_AS(c.integer("i", 0), ValidationError);
  CHECK(c.list("l") == std::vector<std::string>{"a", "b", "c"});
  CHECK(c.list("absent").empty());
  CHECK(thrown_message([&] { c.seed("missing"); }).find("missing") !=
        std::string::npos);
}

TEST_CASE("role keys map onto the dataset roles") {
  ConfigMap c = ConfigMap::from_string(
      "role.group=G\nrole.outcome=Y\nrole.z=Z1,Z2\n"
      "role.ay=A\nrole.censor=C\n");
  Roles r = roles_from_config(c);
  c.finish();
  CHECK(r.group == "G");
  CHECK(r.z == std::vector<std::string>{"Z1", "Z2"});
  CHECK(r.ay == std::vector<std::string>{"A"});
  CHECK(r.censor == "C");
  CHECK(r.n.empty());

  ConfigMap bad = ConfigMap::from_string("role.group=G\nrole.outcome=Y\n");
  CHECK_THROWS_AS(roles_from_config(bad), ValidationError);
}

TEST_CASE("atomic writes leave no temp file behind") {
  std::string path = "test_config_atomic.txt";
  write_atomic(path, "payload\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "payload\n");
  CHECK(!std::ifstream(path + ".tmp").good());
  std::remove(path.c_str());
  CHECK_THROWS_AS(write_atomic("no_such_dir/x.txt", "y"), ValidationError);
}

TEST_CASE("number formatting keeps six significant digits") {
  CHECK(format_number(132.60599999) == "132.606");
  CHECK(format_number(0.000123456789) == "0.000123457");
  CHECK(format_number(-1.0) == "-1");
  CHECK(format_number(2.5, 2) == "2.5");
}

#ifdef CDA_CLI_PATH

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(CDA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli truth writes the six benchmark rows") {
  REQUIRE(run_cli("truth --n 20000 --seed 4 --out cli_truth.csv") == 0);
  std::string out = slurp("cli_truth.csv");
  CHECK(out.find("quantity,outcome,value,mc_se,n") == 0);
  CHECK(out.find("theta1_star,binary,") != std::string::npos);
  CHECK(std::count(out.begin(), out.end(), '\n') == 7);
  std::remove("cli_truth.csv");
}

TEST_CASE("cli estimate runs end to end on a discrete dataset") {
  toy::Toy t = toy::make_toy(81, 1500);
  t.data.write_csv("cli_toy.csv");
  std::ofstream cfg("cli_est.cfg");
  cfg << "data=cli_toy.csv\n"
         "role.group=G\nrole.outcome=Y\nrole.z=Z\n"
         "role.ay=Ay\nrole.az=Az\nrole.n=N\n"
         "bases=saturated\n"
         "estimators=n_bridge_wse,z_model_pw\n"
         "bootstrap.replicates=20\nbootstrap.seed=5\n"
         "out=cli_est.csv\n";
  cfg.close();
  REQUIRE(run_cli("estimate --config cli_est.cfg") == 0);
  std::string out = slurp("cli_est.csv");
  CHECK(out.find("estimator,theta1,theta0,theta1_star") == 0);
  CHECK(out.find("N-Bridge WSE,") != std::string::npos);
  CHECK(out.find("Z-Model PW,") != std::string::npos);
  // the point column must hit the enumeration oracle
  std::istringstream lines(out);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string f;
    std::getline(fields, f, ',');  // estimator
    for (int k = 0; k < 3; ++k) std::getline(fields, f, ',');
    // output is rounded to 6 significant digits
    CHECK(std::stod(f) == doctest::Approx(t.theta1_star).epsilon(1e-4));
  }
  std::remove("cli_toy.csv");
  std::remove("cli_est.cfg");
  std::remove("cli_est.csv");
}

TEST_CASE("cli rejects unknown config keys with exit code 2") {
  std::ofstream cfg("cli_bad.cfg");
  cfg << "data=nope.csv\nrole.group=G\nrole.outcome=Y\nrole.z=Z\n"
         "entirely_unknown=1\n";
  cfg.close();
  CHECK(run_cli("estimate --config cli_bad.cfg") == 2);
  CHECK(run_cli("estimate --config does_not_exist.cfg") == 2);
  CHECK(run_cli("nonsense-subcommand") == 2);
  std::remove("cli_bad.cfg");
}

#endif  // CDA_CLI_PATH
