#include "dcq/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "dcq/catalog.hpp"
#include "dcq/conjugate.hpp"
#include "dcq/diagnostics.hpp"

namespace dcq {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_bound(const std::string& s) {
  try {
    std::size_t used = 0;
    if (s.rfind("e^", 0) == 0) {
      const double x = std::stod(s.substr(2), &used);
      if (used + 2 == s.size()) return std::exp(x);
    } else {
      const double x = std::stod(s, &used);
      if (used == s.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw InputError("grid: cannot read bound '" + s + "'");
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  g.text = text;
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
    throw InputError("grid: expected lo:hi:count, got '" + text + "'");
  g.lo = parse_bound(text.substr(0, a));
  g.hi = parse_bound(text.substr(a + 1, b - a - 1));
  const std::string cs = text.substr(b + 1);
  std::size_t used = 0;
  long long count = -1;
  try {
    count = std::stoll(cs, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cs.size() || count < 0 || count > 1000000)
    throw InputError("grid: count must be an integer in [0, 1000000]");
  g.count = static_cast<int>(count);
  if (!(g.lo > 1.0) || !(g.hi >= g.lo)) throw InputError("grid: need 1 < lo <= hi");
  return g;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  j["weight"] = c.weight.empty() ? Json(nullptr) : Json(c.weight);
  j["family"] = c.family.empty() ? Json(nullptr) : Json(c.family);
  j["t0"] = c.t0 ? Json(*c.t0) : Json(nullptr);
  Json g;
  g["text"] = c.grid.text;
  g["lo"] = c.grid.lo;
  g["hi"] = c.grid.hi;
  g["count"] = c.grid.count;
  g["log_spaced"] = true;
  j["grid"] = g;
  j["format"] = c.format;
  j["out"] = c.out.empty() ? Json(nullptr) : Json(c.out);
  j["seed"] = c.seed;
  j["target"] = c.target.empty() ? Json(nullptr) : Json(c.target);
  return j;
}

std::string summary_line(const Json& doc) {
  const std::string sub = doc.at("config").at("subcommand").get<std::string>();
  const Json& r = doc.at("report");
  std::ostringstream os;
  if (sub == "validate") {
    const Json& v = r.at("validity");
    os << "validate " << r.at("expr").get<std::string>() << " t0=" << fmt(v.at("t0").get<double>()) << ": ";
    if (v.at("passed").get<bool>()) {
      os << "passed, delta " << fmt(v.at("delta_estimate").get<double>());
    } else {
      os << "failed (";
      bool first = true;
      for (const auto& c : v.at("conditions"))
        if (!c.at("passed").get<bool>()) {
          os << (first ? "" : ", ") << c.at("id").get<std::string>();
          first = false;
        }
      os << ")";
    }
  } else if (sub == "conjugate") {
    const Json& s = r.at("sandwich");
    os << "conjugate " << r.at("weight").at("label").get<std::string>() << ": " << s.at("points").size()
       << " points, margin in [" << fmt(s.at("margin_min").get<double>()) << ", "
       << fmt(s.at("margin_max").get<double>()) << "], delta " << fmt(s.at("delta").get<double>());
  } else if (sub == "classify") {
    os << "classify " << r.at("weight").get<std::string>() << ": " << r.at("verdict").get<std::string>()
       << " (series " << r.at("series").at("classification").get<std::string>() << ", integral "
       << r.at("integral").at("classification").get<std::string>() << ")";
  } else if (sub == "reproduce") {
    os << "reproduce " << r.at("reference").get<std::string>() << ": ";
    if (r.contains("entries")) {
      bool first = true;
      for (const auto& e : r.at("entries")) {
        os << (first ? "" : ", ") << "p=" << e.at("p").get<int>() << " "
           << e.at("comparison").at("computed_verdict").get<std::string>();
        first = false;
      }
      os << " (claimed " << r.at("entries").at(0).at("comparison").at("claimed_verdict").get<std::string>() << ")";
    } else {
      os << (r.at("passed").get<bool>() ? "pass" : "fail");
    }
  } else {
    throw InputError("summary: unknown subcommand '" + sub + "'");
  }
  return os.str();
}

namespace {

WeightFunction resolve_weight(const RunConfig& c) {
  if (!c.family.empty() && !c.weight.empty()) throw InputError("give either --weight or --family, not both");
  if (!c.family.empty()) {
    FamilySpec spec;
    try {
      spec = FamilySpec::parse(c.family);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    WeightFunction w = family(spec);
    if (!c.t0 || *c.t0 == w.t0()) return w;
    WeightOptions opts;
    opts.label = w.label();
    return WeightFunction::create(w.expr(), *c.t0, opts);
  }
  if (c.weight.empty()) throw InputError("no weight: give --weight <expr> or --family <name>");
  return WeightFunction::create(parse_weight(c.weight), c.t0.value_or(1.0));
}

Json document(const RunConfig& c, Json report) {
  Json d;
  d["tool"] = "dcq";
  d["config"] = to_json(c);
  d["report"] = std::move(report);
  d["summary"] = summary_line(d);
  return d;
}

// Writes the document (or CSV text) to --out, or to stdout; with --out the
// summary line still goes to stdout.
void emit(const RunConfig& c, const std::string& body, const std::string& summary, std::ostream& out) {
  if (c.out.empty()) {
    out << body;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw InputError("cannot write '" + c.out + "'");
  f << body;
  out << summary << "\n";
}

void emit_json(const RunConfig& c, const Json& doc, std::ostream& out) {
  emit(c, doc.dump(2) + "\n", doc.at("summary").get<std::string>(), out);
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  Expr m;
  double t0 = c.t0.value_or(1.0);
  if (!c.family.empty()) {
    const WeightFunction w = resolve_weight(c);
    m = w.expr();
    t0 = w.t0();
  } else {
    if (c.weight.empty()) throw InputError("no weight: give --weight <expr> or --family <name>");
    m = parse_weight(c.weight);
  }
  const ValidityReport rep = validate(m, t0);

  // Seeded spot checks of the symbolic derivative against a central difference.
  const Expr d1 = differentiate(m);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(std::log(t0), std::log(rep.t_max));
  Json spots = Json::array();
  bool spots_ok = true;
  for (int i = 0; i < 8; ++i) {
    const double t = std::exp(u(rng));
    const double h = t * 1e-6;
    const double fd = (eval(m, t + h) - eval(m, t - h)) / (2 * h);
    const double sym = eval(d1, t);
    const double err = std::abs(fd - sym);
    const bool ok = err <= 1e-6 * (1.0 + std::abs(sym));
    spots_ok = spots_ok && ok;
    Json s;
    s["t"] = t;
    s["symbolic"] = sym;
    s["finite_difference"] = fd;
    s["passed"] = ok;
    spots.push_back(s);
  }

  Json r;
  r["expr"] = to_string(m);
  r["validity"] = to_json(rep);
  r["derivative_spot_checks"] = spots;
  emit_json(c, document(c, r), out);
  return rep.passed && spots_ok ? kExitOk : kExitFailure;
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int cmd_conjugate(const RunConfig& c, std::ostream& out) {
  const WeightFunction w = resolve_weight(c);
  const std::vector<double> grid = log_spaced(c.grid.lo, c.grid.hi, c.grid.count);
  const SandwichReport rep = sandwich_check(w, grid);
  if (c.format == "csv") {
    std::ostringstream os;
    os << "s,t_star,omega,log_Lambda,n_star,log_lambda,margin\n";
    for (const auto& p : rep.points)
      os << csv_number(p.s) << ',' << csv_number(p.t_star) << ',' << csv_number(p.omega) << ','
         << csv_number(p.log_Lambda) << ',' << p.n_star << ',' << csv_number(p.log_lambda) << ','
         << csv_number(p.margin()) << '\n';
    std::ostringstream summary;
    summary << "conjugate " << w.label() << ": " << rep.points.size() << " points";
    emit(c, os.str(), summary.str(), out);
    return kExitOk;
  }
  Json r;
  r["weight"] = to_json(w);
  r["sandwich"] = to_json(rep);
  emit_json(c, document(c, r), out);
  return kExitOk;
}

int cmd_classify(const RunConfig& c, std::ostream& out) {
  const WeightFunction w = resolve_weight(c);
  const DiagnosticsReport rep = classify_quasianalytic(w);
  emit_json(c, document(c, to_json(rep)), out);
  return rep.verdict == Verdict::inconclusive ? kExitInconclusive : kExitOk;
}

int parse_target_int(const std::string& target, const std::string& prefix) {
  const std::string rest = target.substr(prefix.size());
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(rest, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != rest.size()) throw InputError("reproduce: bad target '" + target + "'");
  return v;
}

int cmd_reproduce(const RunConfig& c, std::ostream& out) {
  const std::string& t = c.target;
  if (t == "ex4.9") {
    const LoglogReproduction rep = reproduce_loglog_example();
    emit_json(c, document(c, to_json(rep)), out);
    return rep.passed ? kExitOk : kExitFailure;
  }
  if (t.rfind("ex5.2:p=", 0) == 0) {
    const int p = parse_target_int(t, "ex5.2:p=");
    if (p < 2 || p > 4) throw InputError("reproduce: ex5.2 needs p in {2, 3, 4}");
    const ShiftedReproduction rep = reproduce_shifted_loglog(p);
    emit_json(c, document(c, to_json(rep)), out);
    return rep.passed ? kExitOk : kExitFailure;
  }
  if (t.rfind("tilde:p_max=", 0) == 0) {
    const int p = parse_target_int(t, "tilde:p_max=");
    if (p < 1 || p > 4) throw InputError("reproduce: tilde needs p_max in [1, 4]");
    emit_json(c, document(c, to_json(probe_tilde_family(p))), out);
    return kExitOk;
  }
  throw InputError("reproduce: unknown target '" + t + "' (ex4.9, ex5.2:p=<k>, tilde:p_max=<k>)");
}

int cmd_summarize(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::ifstream f(c.target, std::ios::binary);
  if (!f) throw InputError("cannot read '" + c.target + "'");
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("not a report: ") + e.what());
  }
  std::string line;
  try {
    line = summary_line(doc);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("not a report: ") + e.what());
  }
  out << line << "\n";
  if (doc.contains("summary") && doc.at("summary") != line) {
    err << "summary differs from the one recorded in the report\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Denjoy-Carleman weight analysis"};
  app.require_subcommand(1);

  RunConfig c;
  std::string grid_text = "e^2:e^10:16";

  auto add_weight_opts = [&](CLI::App* sub) {
    sub->add_option("--weight", c.weight, "weight m(t) as an expression in t");
    sub->add_option("--family", c.family, "catalog family: analytic, loglog, logloglog, shifted:<base>:<p>");
    sub->add_option("--t0", c.t0, "left end of the weight's domain");
    sub->add_option("--out", c.out, "write the report here instead of stdout");
    sub->add_option("--seed", c.seed, "seed for randomized checks");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "audit the weight hypotheses");
  add_weight_opts(validate_cmd);
  CLI::App* conjugate_cmd = app.add_subcommand("conjugate", "omega, Lambda and lambda over a grid of s");
  add_weight_opts(conjugate_cmd);
  conjugate_cmd->add_option("--grid", grid_text, "lo:hi:count, log-spaced (e^x allowed)");
  std::string format = "csv";
  conjugate_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  CLI::App* classify_cmd = app.add_subcommand("classify", "quasianalyticity verdict");
  add_weight_opts(classify_cmd);
  CLI::App* reproduce_cmd = app.add_subcommand("reproduce", "run a reproduction: ex4.9, ex5.2:p=<k>, tilde:p_max=<k>");
  reproduce_cmd->add_option("target", c.target)->required();
  reproduce_cmd->add_option("--out", c.out, "write the report here instead of stdout");
  reproduce_cmd->add_option("--seed", c.seed, "seed for randomized checks");
  CLI::App* summarize_cmd = app.add_subcommand("summarize", "print the summary line of a saved JSON report");
  summarize_cmd->add_option("report", c.target)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.subcommand = sub->get_name();
  c.format = sub == conjugate_cmd ? format : "json";

  try {
    if (sub == validate_cmd) return cmd_validate(c, out);
    if (sub == conjugate_cmd) {
      c.grid = parse_grid(grid_text);
      return cmd_conjugate(c, out);
    }
    if (sub == classify_cmd) return cmd_classify(c, out);
    if (sub == reproduce_cmd) return cmd_reproduce(c, out);
    return cmd_summarize(c, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const SandwichViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace dcq
