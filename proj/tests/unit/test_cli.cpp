#include "codethresh/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = codethresh::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted && c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        fields.emplace_back();
      } else {
        fields.back() += c;
      }
    }
    rows.push_back(fields);
  }
  return rows;
}

} // namespace

TEST_CASE("threshold command") {
  const Invocation r = invoke({"threshold", "--p", "0.1", "--ell", "1", "--L", "3", "--q", "2"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["command"] == "threshold");
  CHECK(doc["version"] == "1.0.0");
  CHECK(doc["elapsed_ms"].is_number_integer());
  CHECK(doc["parameters"]["p"] == 0.1);
  const json row = doc["results"]["rows"][0];
  CHECK(row["r_star"].get<double>() == doctest::Approx(0.214406783518).epsilon(1e-6));
  CHECK(row["method"] == "bisection");
}

TEST_CASE("perfect hashing via the threshold command") {
  const Invocation r = invoke({"threshold", "--p", "0", "--ell", "2", "--L", "3", "--q", "3"});
  REQUIRE(r.code == 0);
  const double rate = json::parse(r.out)["results"]["rows"][0]["r_star"].get<double>();
  CHECK(rate == doctest::Approx(0.0762520836129).epsilon(1e-9));
}

TEST_CASE("levelsets command") {
  const Invocation r = invoke({"levelsets", "--ell", "1", "--L", "3", "--q", "2"});
  REQUIRE(r.code == 0);
  const json results = json::parse(r.out)["results"];
  CHECK(results["counts"] == json::array({"2", "6", "0", "0"}));
  CHECK(results["t_star"] == 0.75);
  CHECK(results["approximate"] == false);
}

TEST_CASE("CSV and JSON carry the same rows") {
  for (const auto& base : std::vector<std::vector<std::string>>{
           {"sweep", "--ell", "1", "--L", "4", "--q", "3", "--p-min", "0", "--p-max", "0.4",
            "--p-step", "0.05"},
           {"rlc", "--p-min", "0.05", "--p-max", "0.2", "--p-step", "0.05"},
           {"toy", "--p-min", "0.05", "--p-max", "0.3", "--p-step", "0.05"},
           {"simulate", "--p", "0.1", "--ell", "1", "--L", "3", "--q", "2", "--n", "10,12",
            "--rates", "0.2,0.4", "--trials", "20", "--seed", "3"}}) {
    auto json_args = base;
    json_args.insert(json_args.begin(), {"--format", "json"});
    auto csv_args = base;
    csv_args.insert(csv_args.begin(), {"--format", "csv"});
    const Invocation j = invoke(json_args);
    const Invocation c = invoke(csv_args);
    REQUIRE(j.code == 0);
    REQUIRE(c.code == 0);
    const json rows = json::parse(j.out)["results"]["rows"];
    const auto table = parse_csv(c.out);
    REQUIRE(table.size() == rows.size() + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t k = 0; k < table[0].size(); ++k) {
        const json& value = rows[i][table[0][k]];
        const std::string& cell = table[i + 1][k];
        if (value.is_string()) {
          CHECK(cell == value.get<std::string>());
        } else if (value.is_boolean()) {
          CHECK(cell == (value.get<bool>() ? "true" : "false"));
        } else if (value.is_null()) {
          CHECK(cell.empty());
        } else {
          CHECK(std::stod(cell) == value.get<double>());
        }
      }
    }
  }
}

TEST_CASE("global flags may follow the subcommand") {
  const Invocation r = invoke({"toy", "--p-min", "0.1", "--p-max", "0.1", "--p-step", "0.1",
                               "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("p,r_theorem,r_dagger\n", 0) == 0);
}

TEST_CASE("simulate output is deterministic apart from elapsed time") {
  const std::vector<std::string> args = {"simulate", "--p", "0.1", "--ell", "1", "--L", "3",
                                         "--q", "2", "--n", "14", "--rates", "0.1,0.3,0.5",
                                         "--trials", "30", "--seed", "11"};
  json a = json::parse(invoke(args).out);
  json b = json::parse(invoke(args).out);
  a.erase("elapsed_ms");
  b.erase("elapsed_ms");
  CHECK(a == b);
  auto csv = args;
  csv.insert(csv.begin(), {"--format", "csv"});
  CHECK(invoke(csv).out == invoke(csv).out);
}

TEST_CASE("numbers carry 12 significant digits") {
  CHECK(codethresh::cli::round_significant(0.12345678901234567) == 0.123456789012);
  CHECK(codethresh::cli::round_significant(2.0) == 2.0);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"threshold", "--bogus", "1"}).code == 2);
  CHECK(invoke({}).code == 2);
  const Invocation inconsistent =
      invoke({"threshold", "--p", "0.1", "--ell", "3", "--L", "3", "--q", "2"});
  CHECK(inconsistent.code == 2);
  CHECK(inconsistent.err.find("ell") != std::string::npos);
  CHECK(invoke({"threshold", "--p", "1", "--ell", "1", "--L", "3", "--q", "2"}).code == 2);
  CHECK(invoke({"--format", "xml", "toy", "--p-min", "0.1", "--p-max", "0.1", "--p-step", "0.1"})
            .code == 2);
  CHECK(invoke({"simulate", "--p", "0.1", "--ell", "1", "--L", "3", "--q", "2", "--n", "60",
                "--rates", "0.9", "--trials", "10", "--seed", "1"})
            .code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("verify runs every check and passes") {
  const Invocation r = invoke({"--format", "csv", "verify"});
  CHECK(r.code == 0);
  CHECK(parse_csv(r.out).size() == 7);
  CHECK(r.err.find("FAIL") == std::string::npos);
}
