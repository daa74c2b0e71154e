#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "quadform/cli.hpp"

using json = nlohmann::json;
namespace cli = quadform::cli;

namespace {

struct Run {
  int code;
  std::string out;
  json doc;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  Run r{code, out.str(), json()};
  if (!r.out.empty() && r.out.front() == '{') r.doc = json::parse(r.out);
  return r;
}

std::string data(const std::string& name) { return std::string(QUADFORM_DATA_DIR) + "/" + name; }

std::string temp_doc(const std::string& text) {
  static int n = 0;
  const std::string path = "quadform_cli_test_" + std::to_string(n++) + ".json";
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("reduce the rank-deficient example") {
  const Run r = run({"reduce", data("example1.json")});
  REQUIRE(r.code == cli::kExitOk);
  const auto& e = r.doc["effective"];
  CHECK(e["lambda"][0].get<double>() == doctest::Approx(2.0));
  CHECK(e["lambda"][1].get<double>() == doctest::Approx(-2.0));
  CHECK(e["sigma"].get<double>() == doctest::Approx(2.0));
  CHECK(r.doc["constant"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("cdf of chi-square two") {
  const Run r = run({"cdf", "--q", "2", data("chisq2.json")});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.doc["value"].get<double>() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(r.doc["method"] == "central_even");
  CHECK(r.doc["provenance"] == "bound");
}

TEST_CASE("arcsine ratio mean") {
  const Run r = run({"ratio-moment", "--p", "1", data("beta.json")});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.doc["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  const Run i = run({"ratio-moment", "--p", "2", "--moment-method", "integral", data("beta.json")});
  CHECK(i.doc["value"].get<double>() == doctest::Approx(0.375).epsilon(1e-10));
}

TEST_CASE("approximate and heuristic outputs carry null bounds") {
  const Run r = run({"cdf", "--q", "2", "--method", "wood", data("failure_case.json")});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.doc["error_bound"].is_null());
  CHECK(r.doc["provenance"] == "approximate");
}

TEST_CASE("exit codes") {
  CHECK(run({"cdf", data("chisq2.json")}).code == cli::kExitInvalidInput);
  CHECK(run({"cdf", "--q", "1", "missing_file.json"}).code == cli::kExitInvalidInput);
  CHECK(run({"cdf", "--q", "1", temp_doc("{\"kind\": \"reduced\", \"omega\": [1], \"nu\": [0]}")}).code ==
        cli::kExitInvalidInput);
  CHECK(run({"cdf", "--q", "1", temp_doc("{not json")}).code == cli::kExitInvalidInput);
  CHECK(run({"cdf", "--q", "1", "--method", "ruben", data("example2.json")}).code ==
        cli::kExitNotApplicable);
  CHECK(run({"ratio-moment", "--p", "1", data("cauchy.json")}).code == cli::kExitNotApplicable);
  const Run c = run({"cdf", "--q", "1", "--method", "imhof", "--max-terms", "4", data("example2.json")});
  CHECK(c.code == cli::kExitConvergence);
  CHECK(c.doc["error"] == "convergence_failure");
}

TEST_CASE("grid output") {
  const Run r = run({"cdf", "--grid", "0:4:5", data("chisq2.json")});
  REQUIRE(r.code == cli::kExitOk);
  REQUIRE(r.doc["points"].size() == 5);
  CHECK(r.doc["points"][4]["x"].get<double>() == doctest::Approx(4.0));
  CHECK(r.doc["points"][4]["value"].get<double>() == doctest::Approx(1.0 - std::exp(-2.0)));
}

TEST_CASE("identical input gives byte-identical output") {
  const std::vector<std::string> args{"mc-check", "--q", "1", "--n", "50000", "--seed", "7",
                                      data("example2.json")};
  CHECK(run(args).out == run(args).out);
  const Run m = run(args);
  CHECK(m.doc["monte_carlo"]["seed"] == 7);
}

TEST_CASE("other commands") {
  CHECK(run({"pdf", "--q", "1", data("chisq2.json")}).doc["value"].get<double>() ==
        doctest::Approx(0.5 * std::exp(-0.5)));
  CHECK(run({"quantile", "--p", "0.5", data("chisq2.json")}).doc["value"].get<double>() ==
        doctest::Approx(2.0 * std::log(2.0)));
  CHECK(run({"moments", "--order", "2", data("chisq2.json")}).code == cli::kExitOk);
  CHECK(run({"cumulants", "--order", "3", data("chisq2.json")}).code == cli::kExitOk);
  CHECK(run({"ratio-cdf", "--r", "0", data("cauchy.json")}).doc["value"].get<double>() ==
        doctest::Approx(0.5).epsilon(1e-8));
  CHECK(run({"ratio-pdf", "--r", "0.3", data("beta.json")}).code == cli::kExitOk);
  CHECK(run({"reduce", data("complex_example.json")}).doc["omega"][0].get<double>() ==
        doctest::Approx(16.0));
}

TEST_CASE("the installed executable") {
  const std::string cmd = std::string(QUADFORM_CLI_PATH) + " cdf --q 2 " + data("chisq2.json") + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string bad = std::string(QUADFORM_CLI_PATH) + " ratio-moment --p 1 " + data("cauchy.json") +
                          " > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == cli::kExitNotApplicable);
}
