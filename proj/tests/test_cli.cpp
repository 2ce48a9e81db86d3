#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dcq/cli.hpp"
#include "doctest.h"

using namespace dcq;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dcq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> v;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) v.push_back(std::stod(f));
  return v;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dcq_test_" + name);
}

}  // namespace

TEST_CASE("grid parsing") {
  const GridSpec g = parse_grid("e^2:e^10:16");
  CHECK(g.lo == doctest::Approx(std::exp(2.0)));
  CHECK(g.hi == doctest::Approx(std::exp(10.0)));
  CHECK(g.count == 16);
  CHECK(parse_grid("10:100:0").count == 0);
  CHECK_THROWS(parse_grid("10:100"));
  CHECK_THROWS(parse_grid("100:10:4"));
  CHECK_THROWS(parse_grid("a:b:c"));
}

TEST_CASE("validate: exit codes") {
  const Run ok = run({"validate", "--weight", "t*log(t)", "--t0", "1"});
  CHECK(ok.code == kExitOk);
  const Json doc = Json::parse(ok.out);
  CHECK(doc.at("report").at("validity").at("passed") == true);

  const Run lin = run({"validate", "--weight", "t", "--t0", "1"});
  CHECK(lin.code == kExitFailure);
  CHECK(Json::parse(lin.out).at("summary").get<std::string>().find("d2m_positive") != std::string::npos);

  const Run bad = run({"validate", "--weight", "t*log(t"});
  CHECK(bad.code == kExitInput);
  CHECK(bad.err.find("offset 7") != std::string::npos);

  CHECK(run({"validate"}).code == kExitInput);
  CHECK(run({"validate", "--family", "nonsense"}).code == kExitInput);
  CHECK(run({"bogus"}).code == kExitInput);
}

TEST_CASE("conjugate: analytic CSV matches s/e") {
  const Run r = run({"conjugate", "--family", "analytic", "--grid", "e^2:e^10:16"});
  REQUIRE(r.code == kExitOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 17);
  CHECK(ls[0] == "s,t_star,omega,log_Lambda,n_star,log_lambda,margin");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    REQUIRE(f.size() == 7);
    const double expect = f[0] / std::exp(1.0);
    CHECK(std::abs(f[2] - expect) <= 1e-9 * expect);
    CHECK(f[6] >= -1e-9);
    CHECK(f[6] <= 1.05 + 1e-9);
  }
}

TEST_CASE("conjugate: loglog margins and empty grid") {
  const Run r = run({"conjugate", "--family", "loglog", "--grid", "e^5:e^30:32", "--format", "json"});
  REQUIRE(r.code == kExitOk);
  const Json doc = Json::parse(r.out);
  const Json& s = doc.at("report").at("sandwich");
  CHECK(s.at("points").size() == 32);
  const double delta = s.at("delta").get<double>();
  for (const auto& p : s.at("points")) {
    CHECK(p.at("margin").get<double>() >= -1e-9);
    CHECK(p.at("margin").get<double>() <= delta + 1e-9);
  }

  const Run e = run({"conjugate", "--family", "analytic", "--grid", "e^2:e^10:0"});
  CHECK(e.code == kExitOk);
  CHECK(e.out == "s,t_star,omega,log_Lambda,n_star,log_lambda,margin\n");
}

TEST_CASE("classify: verdicts and the inconclusive exit") {
  const Run a = run({"classify", "--family", "analytic"});
  CHECK(a.code == kExitOk);
  CHECK(Json::parse(a.out).at("report").at("verdict") == "analytic");

  const Run s = run({"classify", "--family", "shifted:loglog:2"});
  CHECK(s.code == kExitOk);
  CHECK(Json::parse(s.out).at("report").at("verdict") == "not_quasianalytic");

  // off the s^alpha (log s)^beta scale
  const Run i = run({"classify", "--weight", "t*log(t) + t*log(t)^0.5", "--t0", "20"});
  CHECK(i.code == kExitInconclusive);
  CHECK(Json::parse(i.out).at("report").at("verdict") == "inconclusive");
}

TEST_CASE("report layout: verdict first, config embedded") {
  const Run r = run({"classify", "--family", "loglog", "--seed", "7"});
  const Json doc = Json::parse(r.out);
  CHECK(doc.at("tool") == "dcq");
  CHECK(doc.at("config").at("subcommand") == "classify");
  CHECK(doc.at("config").at("family") == "loglog");
  CHECK(doc.at("config").at("seed") == 7);
  CHECK(doc.at("report").begin().key() == "verdict");
  CHECK(r.out.find("\"verdict\": \"quasianalytic\"") != std::string::npos);
}

TEST_CASE("identical config gives byte-identical JSON") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"validate", "--weight", "t*log(t) + t*log(log(t))", "--t0", "20", "--seed", "3"},
        std::vector<std::string>{"conjugate", "--family", "logloglog", "--format", "json"},
        std::vector<std::string>{"classify", "--family", "shifted:logloglog:2"}}) {
    const Run a = run(args), b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
  // the seed drives the spot-check points
  CHECK(run({"validate", "--weight", "t*log(t)", "--seed", "1"}).out !=
        run({"validate", "--weight", "t*log(t)", "--seed", "2"}).out);
}

TEST_CASE("--out writes the report and summarize reproduces the summary line") {
  const auto path = scratch("classify.json");
  const Run r = run({"classify", "--family", "loglog", "--out", path.string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream f(path);
  const Json doc = Json::parse(f);
  const std::string summary = doc.at("summary").get<std::string>();
  CHECK(r.out == summary + "\n");
  CHECK(summary_line(doc) == summary);

  const Run s = run({"summarize", path.string()});
  CHECK(s.code == kExitOk);
  CHECK(s.out == summary + "\n");

  // a tampered report no longer round-trips
  Json edited = doc;
  edited["report"]["verdict"] = "analytic";
  const auto bad = scratch("edited.json");
  std::ofstream(bad) << edited.dump(2);
  CHECK(run({"summarize", bad.string()}).code == kExitFailure);
  CHECK(run({"summarize", scratch("missing.json").string()}).code == kExitInput);

  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE("summarize round trip for every subcommand") {
  const std::vector<std::vector<std::string>> cmds{
      {"validate", "--weight", "t*log(t)"},
      {"conjugate", "--family", "loglog", "--format", "json"},
      {"reproduce", "ex5.2:p=2"},
  };
  int i = 0;
  for (auto args : cmds) {
    const auto path = scratch("rt" + std::to_string(i++) + ".json");
    args.push_back("--out");
    args.push_back(path.string());
    const Run r = run(args);
    CHECK(r.code == kExitOk);
    const Run s = run({"summarize", path.string()});
    CHECK(s.code == kExitOk);
    CHECK(s.out == r.out);
    std::filesystem::remove(path);
  }
}

TEST_CASE("reproduce targets") {
  const Run a = run({"reproduce", "ex4.9"});
  CHECK(a.code == kExitOk);
  CHECK(Json::parse(a.out).at("report").at("passed") == true);

  const Run b = run({"reproduce", "ex5.2:p=2"});
  CHECK(b.code == kExitOk);
  const double alpha = Json::parse(b.out).at("report").at("fit").at("alpha").get<double>();
  CHECK(alpha == doctest::Approx(0.5).epsilon(0.1));

  const Run t = run({"reproduce", "tilde:p_max=2"});
  CHECK(t.code == kExitOk);
  const Json tj = Json::parse(t.out).at("report");
  REQUIRE(tj.at("entries").size() == 2);
  const Json& cmp = tj.at("entries").at(1).at("comparison");
  CHECK(cmp.contains("claim"));
  CHECK(cmp.contains("computed_verdict"));

  CHECK(run({"reproduce", "ex5.2:p=9"}).code == kExitInput);
  CHECK(run({"reproduce", "ex5.2:p=x"}).code == kExitInput);
  CHECK(run({"reproduce", "ex7"}).code == kExitInput);
}
