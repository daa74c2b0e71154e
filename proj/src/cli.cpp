#include "quadform/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "quadform/methods.hpp"
#include "quadform/oracle.hpp"
#include "quadform/reduction.hpp"
#include "quadform/transforms.hpp"

namespace quadform::cli {

using json = nlohmann::json;

namespace {

// --- document parsing -------------------------------------------------------

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw InvalidInput(std::string("missing field '") + name + "'");
  return j.at(name);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw InvalidInput(what + " must be a number");
  return j.get<double>();
}

cplx complex_number(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidInput(what + " must be a number or an [re, im] pair");
}

std::vector<double> numbers(const json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput(what + " must be an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
  return v;
}

Vec vector_field(const json& j, const std::string& what) {
  const auto v = numbers(j, what);
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Mat matrix_field(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InvalidInput(what + " must be a non-empty array of rows");
  const std::size_t n = j.size();
  Mat M(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = numbers(j[i], what + " row " + std::to_string(i));
    if (row.size() != n) throw InvalidInput(what + " must be square");
    for (std::size_t k = 0; k < n; ++k) M(i, k) = row[k];
  }
  return M;
}

CMat complex_matrix_field(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InvalidInput(what + " must be a non-empty array of rows");
  const std::size_t n = j.size();
  CMat M(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw InvalidInput(what + " must be square");
    for (std::size_t k = 0; k < n; ++k) M(i, k) = complex_number(j[i][k], what);
  }
  return M;
}

CVec complex_vector_field(const json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput(what + " must be an array");
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_number(j[i], what);
  return v;
}

void check_len(Eigen::Index got, Eigen::Index n, const char* what) {
  if (got != n) throw InvalidInput(std::string(what) + " has wrong length");
}

void check_dim(const Mat& M, Eigen::Index n, const char* what) {
  if (M.rows() != n) throw InvalidInput(std::string(what) + " has wrong dimension");
}

// --- output -----------------------------------------------------------------

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string provenance(const MethodResult& r) {
  if (r.error_bound) return "bound";
  if (r.has_flag("approximate")) return "approximate";
  return "heuristic";
}

json result_json(const MethodResult& r) {
  json j;
  j["value"] = finite_or_null(r.value);
  j["error_bound"] = r.error_bound ? finite_or_null(*r.error_bound) : json(nullptr);
  j["method"] = r.method;
  j["converged"] = r.converged;
  j["provenance"] = provenance(r);
  json d = json::object();
  for (const auto& [k, v] : r.diagnostics) d[k] = finite_or_null(v);
  j["diagnostics"] = d;
  j["flags"] = r.flags;
  return j;
}

json reduced_json(const ReducedForm& red) {
  json j;
  j["omega"] = red.omega;
  j["nu"] = red.nu;
  j["delta2"] = red.delta2;
  j["sigma"] = red.sigma_gauss;
  j["constant"] = red.constant;
  const FormClass c = classify(red);
  j["classification"] = {
      {"centrality", c.centrality == Centrality::central ? "central" : "noncentral"},
      {"definiteness", c.definiteness == Definiteness::positive   ? "positive"
                       : c.definiteness == Definiteness::negative ? "negative"
                                                                  : "indefinite"},
      {"has_gaussian", c.has_gaussian},
      {"even_degrees", c.even_degrees}};
  return j;
}

std::string fmt(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream s;
    s << std::setprecision(12) << v.get<double>();
    return s.str();
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_pretty(std::ostream& out, const json& doc) {
  if (doc.contains("points")) {
    out << std::left << std::setw(20) << "x" << std::setw(22) << "value" << std::setw(14)
        << "error_bound" << "method\n";
    for (const auto& p : doc["points"])
      out << std::setw(20) << fmt(p["x"]) << std::setw(22) << fmt(p["value"]) << std::setw(14)
          << fmt(p["error_bound"]) << fmt(p["method"]) << "\n";
    return;
  }
  for (const auto& [k, v] : doc.items()) {
    if (v.is_object()) {
      out << k << ":\n";
      for (const auto& [k2, v2] : v.items()) out << "  " << std::left << std::setw(26) << k2 << fmt(v2) << "\n";
    } else {
      out << std::left << std::setw(28) << k << fmt(v) << "\n";
    }
  }
}

// --- command plumbing -------------------------------------------------------

struct Flags {
  std::string file;
  std::string method = "auto";
  double tol = 1e-8;
  bool tol_given = false;
  std::uint64_t seed = 1;
  std::string grid;
  bool pretty = false;
  long max_terms = 0;
  double quadrature_tol = 1e-10;
  double tau = 0.0;
  std::optional<double> q, p, r;
  bool upper = false;
  int order = 8;
  long n = 1000000;
  bool raw = false;
  std::string moment_method = "series";
};

std::vector<double> parse_grid(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw InvalidInput("--grid expects start:stop:count");
  double a, b;
  long n;
  try {
    a = std::stod(parts[0]);
    b = std::stod(parts[1]);
    n = std::stol(parts[2]);
  } catch (const std::exception&) {
    throw InvalidInput("--grid expects start:stop:count");
  }
  if (n < 1 || n > 10000000) throw InvalidInput("--grid count must be in [1, 1e7]");
  std::vector<double> xs(n);
  for (long i = 0; i < n; ++i) xs[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return xs;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read '" + path + "'");
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

EvalOptions eval_options(const Flags& f) {
  EvalOptions o;
  o.tol = f.tol;
  o.max_terms = f.max_terms;
  o.tau = f.tau;
  return o;
}

Method method_of(const Flags& f) { return parse_method(f.method); }

double required(const std::optional<double>& v, const char* flag) {
  if (!v) throw InvalidInput(std::string("missing required option ") + flag);
  return *v;
}

MethodResult degenerate_cdf(double c, double q, Tail tail) {
  MethodResult r;
  const bool below = c <= q;
  r.value = tail == Tail::lower ? (below ? 1.0 : 0.0) : (below ? 0.0 : 1.0);
  r.error_bound = 0.0;
  r.method = "degenerate";
  r.diagnostics["constant"] = c;
  return r;
}

json points_json(const std::vector<double>& xs, const std::vector<MethodResult>& rs) {
  json pts = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    json p = result_json(rs[i]);
    p["x"] = xs[i];
    pts.push_back(p);
  }
  return pts;
}

void require_form(const Document& doc) {
  if (doc.kind == DocKind::ratio) throw InvalidInput("this command needs a raw, raw_complex or reduced document");
}

void require_ratio(const Document& doc) {
  if (doc.kind != DocKind::ratio) throw InvalidInput("this command needs a ratio document");
}

json cmd_reduce(const Document& doc) {
  require_form(doc);
  json j;
  try {
    if (doc.kind == DocKind::raw) {
      const EffectiveForm eff = reduce_real(doc.raw);
      j = reduced_json(group_eigenvalues(eff));
      j["effective"] = {{"lambda", eff.lambda}, {"h2", eff.h2}, {"sigma", eff.sigma_gauss},
                        {"constant", eff.constant}};
    } else {
      j = reduced_json(reduced_form(doc));
    }
  } catch (const DegenerateConstant& d) {
    j["degenerate"] = true;
    j["constant"] = d.value;
  }
  return j;
}

json cmd_distribution(const Document& doc, const Flags& f, Quantity quantity) {
  require_form(doc);
  const Tail tail = f.upper ? Tail::upper : Tail::lower;
  ReducedForm red;
  try {
    red = reduced_form(doc);
  } catch (const DegenerateConstant& d) {
    if (quantity == Quantity::pdf) throw NotApplicable("a constant has no density");
    if (!f.grid.empty()) {
      const auto xs = parse_grid(f.grid);
      std::vector<MethodResult> rs;
      for (double x : xs) rs.push_back(degenerate_cdf(d.value, x, tail));
      return {{"points", points_json(xs, rs)}};
    }
    return result_json(degenerate_cdf(d.value, required(f.q, "--q"), tail));
  }
  const Method m = method_of(f);
  const EvalOptions o = eval_options(f);
  if (!f.grid.empty()) {
    const auto xs = parse_grid(f.grid);
    return {{"points", points_json(xs, evaluate_grid(red, xs, quantity, m, o, tail))}};
  }
  const double q = required(f.q, "--q");
  json j = result_json(quantity == Quantity::cdf ? evaluate_cdf(red, q, m, o, tail)
                                                 : evaluate_pdf(red, q, m, o));
  j["q"] = q;
  if (quantity == Quantity::cdf) j["tail"] = f.upper ? "upper" : "lower";
  return j;
}

json cmd_quantile(const Document& doc, const Flags& f) {
  require_form(doc);
  const ReducedForm red = reduced_form(doc);
  const double p = required(f.p, "--p");
  json j = result_json(quantile(red, p, method_of(f), eval_options(f),
                                f.upper ? Tail::upper : Tail::lower));
  j["p"] = p;
  return j;
}

json cmd_moments(const Document& doc, const Flags& f, bool raw) {
  require_form(doc);
  if (f.order < 1 || f.order > 64) throw InvalidInput("--order must be in [1, 64]");
  const ReducedForm red = reduced_form(doc);
  const auto k = cumulants(red, f.order);
  json j;
  j["values"] = raw ? raw_moments(k) : k;
  j["order"] = f.order;
  j["method"] = "cumulant_recursion";
  j["provenance"] = "exact";
  return j;
}

json cmd_ratio_cdf(const Document& doc, const Flags& f) {
  require_ratio(doc);
  const Method m = f.method == "auto" ? Method::davies : method_of(f);
  const EvalOptions o = eval_options(f);
  if (!f.grid.empty()) {
    const auto xs = parse_grid(f.grid);
    std::vector<MethodResult> rs;
    for (double x : xs) rs.push_back(cdf_ratio(doc.ratio, x, m, o));
    return {{"points", points_json(xs, rs)}};
  }
  const double r = required(f.r, "--r");
  json j = result_json(cdf_ratio(doc.ratio, r, m, o));
  j["r"] = r;
  return j;
}

json cmd_ratio_pdf(const Document& doc, const Flags& f) {
  require_ratio(doc);
  RatioSpaOptions o;
  o.normalize = !f.raw;
  if (o.normalize) o.normalizer = ratio_spa_normalizer(doc.ratio);
  if (!f.grid.empty()) {
    const auto xs = parse_grid(f.grid);
    std::vector<MethodResult> rs;
    for (double x : xs) rs.push_back(pdf_ratio_spa(doc.ratio, x, o));
    return {{"points", points_json(xs, rs)}};
  }
  const double r = required(f.r, "--r");
  json j = result_json(pdf_ratio_spa(doc.ratio, r, o));
  j["r"] = r;
  return j;
}

int moment_order(const Flags& f) {
  const double p = required(f.p, "--p");
  if (p < 1 || p != std::floor(p) || p > 1000) throw InvalidInput("--p must be a positive integer");
  return static_cast<int>(p);
}

MethodResult ratio_moment(const Document& doc, const Flags& f, int p) {
  if (f.moment_method == "series") {
    RatioSeriesOptions o;
    if (f.tol_given) o.tol = f.tol;
    if (f.max_terms > 0) o.j_max = static_cast<int>(std::min(f.max_terms, 1000000L));
    return ratio_moment_series(doc.ratio, p, o);
  }
  if (f.moment_method == "integral") {
    RatioIntegralOptions o;
    o.quadrature_tol = f.quadrature_tol;
    return ratio_moment_integral(doc.ratio, p, o);
  }
  throw InvalidInput("--moment-method must be series or integral");
}

json cmd_ratio_moment(const Document& doc, const Flags& f) {
  require_ratio(doc);
  const int p = moment_order(f);
  const auto ex = moment_exists(doc.ratio, p);
  if (!ex.exists) throw NotApplicable("moment does not exist: " + ex.condition);
  json j = result_json(ratio_moment(doc, f, p));
  j["p"] = p;
  j["existence"] = {{"exists", ex.exists}, {"condition", ex.condition}, {"rank_B", ex.r_B}};
  return j;
}

json mc_json(const McResult& m) {
  return {{"estimate", m.estimate}, {"std_error", m.std_error}, {"n", m.n},
          {"seed", m.seed},         {"generator", m.generator}};
}

json cmd_mc_check(const Document& doc, const Flags& f) {
  McOptions mo;
  mo.n = f.n;
  mo.seed = f.seed;
  MethodResult r;
  McResult mc;
  json j;
  if (doc.kind == DocKind::ratio) {
    const int p = moment_order(f);
    r = ratio_moment(doc, f, p);
    mc = mc_ratio_moment(doc.ratio, p, mo);
    j["p"] = p;
  } else {
    const double q = required(f.q, "--q");
    const ReducedForm red = reduced_form(doc);
    r = evaluate_cdf(red, q, method_of(f), eval_options(f));
    switch (doc.kind) {
      case DocKind::raw: mc = mc_cdf(doc.raw, q, mo); break;
      case DocKind::raw_complex: mc = mc_cdf(doc.complex, q, mo); break;
      default: mc = mc_cdf(doc.reduced, q, mo); break;
    }
    j["q"] = q;
  }
  j["result"] = result_json(r);
  j["monte_carlo"] = mc_json(mc);
  const double z = mc.std_error > 0.0 ? (r.value - mc.estimate) / mc.std_error
                                      : (r.value == mc.estimate ? 0.0 : INFINITY);
  j["z_score"] = finite_or_null(z);
  j["consistent"] = std::abs(z) <= 4.0;
  return j;
}

json error_json(const char* kind, const std::string& msg) { return {{"error", kind}, {"message", msg}}; }

}  // namespace

Document parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed document: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("document must be an object");
  const json& kind = field(j, "kind");
  if (!kind.is_string()) throw InvalidInput("kind must be a string");
  const std::string k = kind.get<std::string>();
  Document d;
  if (j.contains("method")) {
    if (!j["method"].is_string()) throw InvalidInput("method must be a string");
    d.method = j["method"].get<std::string>();
  }
  if (j.contains("tol")) d.tol = number(j["tol"], "tol");

  if (k == "raw") {
    d.kind = DocKind::raw;
    d.raw.A = matrix_field(field(j, "A"), "A");
    const Eigen::Index n = d.raw.A.rows();
    d.raw.b = j.contains("b") ? vector_field(j["b"], "b") : Vec::Zero(n);
    d.raw.c = j.contains("c") ? number(j["c"], "c") : 0.0;
    d.raw.mu = j.contains("mu") ? vector_field(j["mu"], "mu") : Vec::Zero(n);
    d.raw.sigma_mat = j.contains("sigma") ? matrix_field(j["sigma"], "sigma") : Mat::Identity(n, n);
    check_len(d.raw.b.size(), n, "b");
    check_len(d.raw.mu.size(), n, "mu");
    check_dim(d.raw.sigma_mat, n, "sigma");
    validate(d.raw);
  } else if (k == "raw_complex") {
    d.kind = DocKind::raw_complex;
    d.complex.A = complex_matrix_field(field(j, "A"), "A");
    const Eigen::Index n = d.complex.A.rows();
    d.complex.b = j.contains("b") ? complex_vector_field(j["b"], "b") : CVec::Zero(n);
    d.complex.c = j.contains("c") ? number(j["c"], "c") : 0.0;
    d.complex.mu = j.contains("mu") ? complex_vector_field(j["mu"], "mu") : CVec::Zero(n);
    d.complex.sigma_mat =
        j.contains("sigma") ? complex_matrix_field(j["sigma"], "sigma") : CMat::Identity(n, n);
    check_len(d.complex.b.size(), n, "b");
    check_len(d.complex.mu.size(), n, "mu");
    if (d.complex.sigma_mat.rows() != n) throw InvalidInput("sigma has wrong dimension");
  } else if (k == "reduced") {
    d.kind = DocKind::reduced;
    d.reduced.omega = numbers(field(j, "omega"), "omega");
    const std::size_t L = d.reduced.omega.size();
    if (j.contains("nu")) {
      for (double v : numbers(j["nu"], "nu")) {
        if (v != std::floor(v) || v < 1 || v > 1e9) throw InvalidInput("nu entries must be positive integers");
        d.reduced.nu.push_back(static_cast<int>(v));
      }
    } else {
      d.reduced.nu.assign(L, 1);
    }
    d.reduced.delta2 = j.contains("delta2") ? numbers(j["delta2"], "delta2") : std::vector<double>(L, 0.0);
    d.reduced.sigma_gauss = j.contains("sigma") ? number(j["sigma"], "sigma") : 0.0;
    d.reduced.constant = j.contains("constant") ? number(j["constant"], "constant") : 0.0;
    validate(d.reduced);
  } else if (k == "ratio") {
    d.kind = DocKind::ratio;
    d.ratio.A = matrix_field(field(j, "A"), "A");
    const Eigen::Index n = d.ratio.A.rows();
    d.ratio.B = matrix_field(field(j, "B"), "B");
    d.ratio.mu = j.contains("mu") ? vector_field(j["mu"], "mu") : Vec::Zero(n);
    d.ratio.sigma_mat = j.contains("sigma") ? matrix_field(j["sigma"], "sigma") : Mat::Identity(n, n);
    validate(d.ratio);
  } else {
    throw InvalidInput("kind must be one of raw, raw_complex, reduced, ratio");
  }
  return d;
}

ReducedForm reduced_form(const Document& doc) {
  switch (doc.kind) {
    case DocKind::raw: return reduce(doc.raw);
    case DocKind::raw_complex: return reduce_complex(doc.complex);
    case DocKind::reduced: return doc.reduced;
    case DocKind::ratio: break;
  }
  throw InvalidInput("a ratio document has no single reduced form");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributions of quadratic forms in Gaussian vectors"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* s) {
    s->add_option("document", f.file, "input document (- for stdin)")->required();
    s->add_option("--method", f.method, "evaluation method");
    s->add_option("--tol", f.tol, "absolute error tolerance")->each([&](const std::string&) { f.tol_given = true; });
    s->add_option("--seed", f.seed, "Monte Carlo seed");
    s->add_option("--grid", f.grid, "start:stop:count");
    s->add_flag("--pretty", f.pretty, "human-readable output");
    s->add_option("--max-terms", f.max_terms, "term / panel limit");
    s->add_option("--quadrature-tol", f.quadrature_tol, "ratio moment quadrature tolerance");
    s->add_option("--tau", f.tau, "Davies convergence factor");
    s->add_flag("--upper", f.upper, "upper tail probability");
  };
  auto with_q = [&](CLI::App* s) { s->add_option("--q", f.q, "evaluation point"); };
  std::vector<std::pair<std::string, CLI::App*>> subs;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    common(s);
    subs.emplace_back(name, s);
    return s;
  };
  sub("reduce", "reduced effective parameters");
  with_q(sub("cdf", "cumulative distribution function"));
  with_q(sub("pdf", "density"));
  sub("quantile", "quantile function")->add_option("--p", f.p, "probability");
  sub("moments", "raw moments")->add_option("--order", f.order, "highest order");
  sub("cumulants", "cumulants")->add_option("--order", f.order, "highest order");
  sub("ratio-cdf", "CDF of a ratio of forms")->add_option("--r", f.r, "evaluation point");
  auto* rp = sub("ratio-pdf", "saddlepoint density of a ratio");
  rp->add_option("--r", f.r, "evaluation point");
  rp->add_flag("--raw", f.raw, "skip normalization");
  auto* rm = sub("ratio-moment", "moments of a ratio");
  rm->add_option("--p", f.p, "moment order");
  rm->add_option("--moment-method", f.moment_method, "series or integral");
  auto* mc = sub("mc-check", "compare against Monte Carlo");
  with_q(mc);
  mc->add_option("--p", f.p, "ratio moment order");
  mc->add_option("--n", f.n, "sample count");
  mc->add_option("--moment-method", f.moment_method, "series or integral");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    out << error_json("invalid_input", e.what()).dump() << "\n";
    return kExitInvalidInput;
  }

  std::string command;
  for (const auto& [name, s] : subs)
    if (s->parsed()) command = name;

  try {
    const Document doc = parse_document(read_file(f.file));
    if (doc.method && f.method == "auto") f.method = *doc.method;
    if (doc.tol && !f.tol_given) {
      f.tol = *doc.tol;
      f.tol_given = true;
    }
    if (!(f.tol > 0.0)) throw InvalidInput("--tol must be > 0");
    json result;
    if (command == "reduce") result = cmd_reduce(doc);
    else if (command == "cdf") result = cmd_distribution(doc, f, Quantity::cdf);
    else if (command == "pdf") result = cmd_distribution(doc, f, Quantity::pdf);
    else if (command == "quantile") result = cmd_quantile(doc, f);
    else if (command == "moments") result = cmd_moments(doc, f, true);
    else if (command == "cumulants") result = cmd_moments(doc, f, false);
    else if (command == "ratio-cdf") result = cmd_ratio_cdf(doc, f);
    else if (command == "ratio-pdf") result = cmd_ratio_pdf(doc, f);
    else if (command == "ratio-moment") result = cmd_ratio_moment(doc, f);
    else result = cmd_mc_check(doc, f);
    result["command"] = command;
    if (f.pretty)
      write_pretty(out, result);
    else
      out << result.dump() << "\n";
    return kExitOk;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    out << error_json("invalid_input", e.what()).dump() << "\n";
    return kExitInvalidInput;
  } catch (const ConvergenceFailure& e) {
    err << "convergence failure: " << e.what() << "\n";
    json j = error_json("convergence_failure", e.what());
    j["partial"] = result_json(e.partial);
    out << j.dump() << "\n";
    return kExitConvergence;
  } catch (const NotApplicable& e) {
    err << "not applicable: " << e.what() << "\n";
    out << error_json("not_applicable", e.what()).dump() << "\n";
    return kExitNotApplicable;
  } catch (const DomainError& e) {
    err << "not applicable: " << e.what() << "\n";
    out << error_json("not_applicable", e.what()).dump() << "\n";
    return kExitNotApplicable;
  } catch (const DegenerateConstant& e) {
    err << "invalid input: " << e.what() << "\n";
    out << error_json("invalid_input", e.what()).dump() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace quadform::cli
