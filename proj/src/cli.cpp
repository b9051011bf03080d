#include "oddgeo/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "oddgeo/algebra.hpp"

namespace oddgeo::cli {

namespace {

// ---------------------------------------------------------------------------
// Scenario parsing

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw InputError(path + ": " + what); }

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

double number_or(const Json& obj, const std::string& key, double def, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? def : number(*it, path + "." + key);
}

Expr expression(const Json& j, const Chart& chart, const std::string& path) {
  if (j.is_number()) return Expr(j.get<double>());
  if (!j.is_string()) fail(path, "expected an expression string");
  try {
    return parse_expr_text(j.get<std::string>(), chart);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::vector<Expr> expr_list(const Json& j, const Chart& chart, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.size() != n) fail(path, "expected a list of " + std::to_string(n) + " expressions");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(expression(j[i], chart, path + "[" + std::to_string(i) + "]"));
  return out;
}

void check_square(const Json& j, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.size() != n) fail(path, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  for (std::size_t i = 0; i < n; ++i)
    if (!j[i].is_array() || j[i].size() != n)
      fail(path + "[" + std::to_string(i) + "]", "expected a row of " + std::to_string(n) + " entries");
}

// Upper triangle (diagonal excluded) of a square matrix as a degree-2 object.
template <Variance V>
Antisym<V, Expr> two_tensor(const Json& j, const Chart& chart, const std::string& path) {
  const auto n = static_cast<std::size_t>(chart.dim());
  check_square(j, n, path);
  Antisym<V, Expr> out(chart.dim(), 2);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      out.add({int(a), int(b)}, expression(j[a][b], chart, path + "[" + std::to_string(a) + "][" + std::to_string(b) + "]"));
  return out;
}

template <Variance V>
Antisym<V, Expr> one_tensor(const Json& j, const Chart& chart, const std::string& path) {
  auto comps = expr_list(j, chart, static_cast<std::size_t>(chart.dim()), path);
  return Antisym<V, Expr>::from_components(comps);
}

// Symmetric (sign = 1) or antisymmetric (sign = -1) matrix on spacetime
// coordinates; the lower triangle is derived from the upper one.
SymMatrix spacetime_matrix(const Json& j, const Chart& chart, std::size_t n, double sign, const std::string& path) {
  check_square(j, n, path);
  SymMatrix m(n, std::vector<Expr>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      if (a == b && sign < 0) continue;
      std::string p = path + "[" + std::to_string(a) + "][" + std::to_string(b) + "]";
      Expr e = expression(j[a][b], chart, p);
      if (max_coord_index(e) > 3) fail(p, "spacetime data may only use x0, x1, x2, x3");
      m[a][b] = e;
      if (a != b) m[b][a] = sign > 0 ? e : -e;
    }
  return m;
}

Scales scales_of(const Json& obj, const std::string& path) {
  Scales sc{number_or(obj, "m", 1.0, path), number_or(obj, "hbar", 1.0, path), number_or(obj, "c", 1.0, path)};
  for (double v : {sc.m, sc.hbar, sc.c})
    if (!(v > 0.0) || !std::isfinite(v)) fail(path, "m, hbar and c must be positive");
  return sc;
}

std::vector<std::pair<std::string, double>> constants_of(const Json& doc) {
  std::vector<std::pair<std::string, double>> out;
  auto it = doc.find("constants");
  if (it == doc.end()) return out;
  if (!it->is_object()) fail("$.constants", "expected an object of name: number");
  for (const auto& [k, v] : it->items()) out.emplace_back(k, number(v, "$.constants." + k));
  return out;
}

std::vector<std::string> names_of(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty list of coordinate names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(path + "[" + std::to_string(i) + "]", "expected a coordinate name");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

Box box_of(const Json& doc, int dim) {
  auto it = doc.find("domain");
  if (it == doc.end()) return Sampler::cube(dim);
  const Json& d = *it;
  auto interval = [](const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
    double lo = number(j[0], path + "[0]"), hi = number(j[1], path + "[1]");
    if (!(lo < hi)) fail(path, "empty interval");
    return std::pair{lo, hi};
  };
  if (d.is_array() && d.size() == 2 && d[0].is_number()) return Box(dim, interval(d, "$.domain"));
  if (!d.is_array() || d.size() != static_cast<std::size_t>(dim))
    fail("$.domain", "expected [lo, hi] or one interval per coordinate (" + std::to_string(dim) + ")");
  Box b;
  for (int i = 0; i < dim; ++i) b.push_back(interval(d[i], "$.domain[" + std::to_string(i) + "]"));
  return b;
}

const std::vector<std::string> kKinds{"covariant", "contravariant", "darboux", "galilei", "einstein"};

}  // namespace

std::string Scenario::kind() const { return kKinds.at(data.index()); }

Sampler Scenario::sampler(std::uint64_t seed, int count) const {
  if (std::holds_alternative<GalileiInput>(data)) return galilei_sampler(chart, seed, count);
  if (const auto* e = std::get_if<EinsteinInput>(&data)) {
    try {
      return einstein_sampler(chart, *e, seed, count);
    } catch (const InputError&) {
      // No timelike points: report a signature failure when there is one.
      validate(*e, Sampler(chart, Sampler::cube(kPhaseDim), std::nullopt, seed, count));
      throw;
    }
  }
  return Sampler(chart, box, constraint, seed, count);
}

Scenario parse_scenario(const Json& doc) {
  if (!doc.is_object()) fail("$", "expected an object");
  int version = integer(field(doc, "version", "$"), "$.version");
  if (version != kScenarioVersion)
    fail("$.version", "unsupported version " + std::to_string(version) + " (expected " +
                          std::to_string(kScenarioVersion) + ")");
  std::vector<std::string> present;
  for (const auto& k : kKinds)
    if (doc.contains(k)) present.push_back(k);
  if (present.size() != 1) fail("$", "exactly one of covariant, contravariant, darboux, galilei, einstein is required");
  const std::string kind = present.front();
  const std::string path = "$." + kind;
  const Json& body = doc[kind];
  if (!body.is_object()) fail(path, "expected an object");
  auto constants = constants_of(doc);

  if (kind == "galilei" || kind == "einstein") {
    for (const char* k : {"domain", "constraint"})
      if (doc.contains(k)) fail(std::string("$.") + k, "not configurable for spacetime scenarios");
    Chart chart = phase_chart(constants);
    if (doc.contains("chart") && names_of(doc["chart"], "$.chart") != chart.coords())
      fail("$.chart", "spacetime scenarios use the chart x0, x1, x2, x3, x10, x20, x30");
    Scenario sc{chart, {}, std::nullopt, CovariantInput{KForm(1, 1), KForm(1, 0)}};
    if (kind == "galilei") {
      GalileiInput in;
      in.chart = chart;
      in.g = spacetime_matrix(field(body, "g", path), chart, 3, 1.0, path + ".g");
      if (body.contains("phi"))
        in.phi = spacetime_matrix(body["phi"], chart, 4, -1.0, path + ".phi");
      else
        in.phi.assign(4, std::vector<Expr>(4));
      in.scales = scales_of(body, path);
      sc.data = std::move(in);
    } else {
      EinsteinInput in;
      in.chart = chart;
      in.g = spacetime_matrix(field(body, "g", path), chart, 4, 1.0, path + ".g");
      in.scales = scales_of(body, path);
      sc.data = std::move(in);
    }
    return sc;
  }

  std::optional<Chart> chart;
  if (doc.contains("chart")) chart = Chart(names_of(doc["chart"], "$.chart"), constants);
  if (kind == "darboux") {
    int n = integer(field(body, "n", path), path + ".n");
    if (n < 1) fail(path + ".n", "must be at least 1");
    int s = body.contains("s") ? integer(body["s"], path + ".s") : n;
    if (s < 1 || s > n) fail(path + ".s", "must lie in 1..n");
    if (!chart) chart = Chart(darboux_chart(n).coords(), constants);
    if (chart->dim() != 2 * n + 1) fail("$.chart", "a darboux chart needs 2n + 1 = " + std::to_string(2 * n + 1) + " names");
    std::vector<Expr> funcs;
    if (body.contains("omega_funcs"))
      funcs = expr_list(body["omega_funcs"], *chart, static_cast<std::size_t>(2 * n), path + ".omega_funcs");
    else
      funcs.assign(2 * n, Expr());
    Scenario out{*chart, box_of(doc, chart->dim()), std::nullopt, DarbouxSpec(*chart, n, s, std::move(funcs))};
    if (doc.contains("constraint")) out.constraint = ScalarField(*chart, expression(doc["constraint"], *chart, "$.constraint"));
    return out;
  }

  if (!chart) fail("$", "missing field 'chart'");
  if (chart->dim() % 2 == 0) fail("$.chart", "the chart dimension must be odd");
  Scenario out{*chart, box_of(doc, chart->dim()), std::nullopt, CovariantInput{KForm(1, 1), KForm(1, 0)}};
  if (doc.contains("constraint")) out.constraint = ScalarField(*chart, expression(doc["constraint"], *chart, "$.constraint"));
  if (kind == "covariant") {
    out.data = CovariantInput{one_tensor<Variance::Covariant>(field(body, "omega", path), *chart, path + ".omega"),
                              two_tensor<Variance::Covariant>(field(body, "Omega", path), *chart, path + ".Omega")};
  } else {
    ContravariantInput in{one_tensor<Variance::Contravariant>(field(body, "E", path), *chart, path + ".E"),
                          two_tensor<Variance::Contravariant>(field(body, "Lambda", path), *chart, path + ".Lambda"),
                          std::nullopt};
    if (body.contains("omega")) in.omega = one_tensor<Variance::Covariant>(body["omega"], *chart, path + ".omega");
    out.data = std::move(in);
  }
  return out;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return parse_scenario(doc);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

namespace {

// ---------------------------------------------------------------------------
// Report building

struct Options {
  std::string file;
  int samples = kDefaultSamples;
  double tol = kDefaultTolerance;
  std::uint64_t seed = kDefaultSeed;
  std::string format = "text";
  std::string expect;
  bool roundtrip = false;
  std::string f, g, h;
  bool jacobi = false;
  bool omega_defect = false;
  std::string spacetime;
  std::string metric = "flat";
};

// Non-finite values are kept as strings so that both renderings agree.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(format_number(v)); }

Json residual_table(const std::map<std::string, double>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k] = num(v);
  return out;
}

std::string index_name(const Index& idx, const Chart& chart) {
  std::string s;
  for (int i : idx) s += (s.empty() ? "" : "^") + chart.coord(i);
  return s;
}

template <Variance V>
Json terms_json(const Antisym<V, Expr>& a, const Chart& chart) {
  Json out = Json::object();
  for (const auto& [i, c] : a.terms()) out[index_name(i, chart)] = print_expr(c, chart);
  return out;
}

Json classification_json(const ClassificationReport& r) {
  Json out;
  out["labels"] = r.labels;
  out["rank"] = {{"name", r.rank_name}, {"value", r.rank}, {"n", r.n}};
  out["residuals"] = residual_table(r.residuals);
  out["notes"] = r.notes;
  return out;
}

Json duality_json(const DualityResiduals& r) {
  Json out;
  out["i_E Omega"] = num(r.iE_Omega);
  out["i_omega Lambda"] = num(r.i_omega_Lambda);
  out["i_E omega - 1"] = num(r.iE_omega);
  out["Lambda# o Omega_b - (id - omega x E)"] = num(r.sharp_flat);
  out["Omega_b o Lambda# - (id - E x omega)"] = num(r.flat_sharp);
  return out;
}

Json spacetime_json(const SpacetimeReport& r) {
  Json out;
  out["covariant labels"] = r.covariant_labels;
  out["contravariant labels"] = r.contravariant_labels;
  out["residuals"] = residual_table(r.residuals);
  out["min |time ^ Omega^3|"] = num(r.min_top_form);
  out["notes"] = r.notes;
  return out;
}

std::optional<PhaseStructures> spacetime_of(const Scenario& sc, const Sampler& s) {
  if (const auto* g = std::get_if<GalileiInput>(&sc.data)) {
    validate(*g, s);
    return phase_structures(*g);
  }
  if (const auto* e = std::get_if<EinsteinInput>(&sc.data)) {
    validate(*e, s);
    return phase_structures(*e);
  }
  return std::nullopt;
}

const std::set<std::string> kLabels{label::kPreCosymplectic, label::kCosymplectic, label::kContact,
                                    label::kAlmostCosymplecticContact, label::kPreCoPoisson, label::kCoPoisson,
                                    label::kJacobi, label::kAlmostCoPoissonJacobi, label::kTrivial};

// Fills results and returns every label found.
std::set<std::string> classify(const Scenario& sc, const Sampler& s, double tol, Json& results) {
  std::set<std::string> labels;
  auto add = [&](const std::vector<std::string>& ls) { labels.insert(ls.begin(), ls.end()); };
  if (auto p = spacetime_of(sc, s)) {
    SpacetimeReport rep = verify_theorems(*p, s, tol);
    results["spacetime"] = spacetime_json(rep);
    add(rep.covariant_labels);
    add(rep.contravariant_labels);
    return labels;
  }
  if (const auto* c = std::get_if<CovariantInput>(&sc.data)) {
    auto r = classify_covariant(make_covariant_pair(sc.chart, c->omega, c->Omega, s, tol), s, tol);
    results["covariant"] = classification_json(r);
    add(r.labels);
  } else if (const auto* x = std::get_if<ContravariantInput>(&sc.data)) {
    auto r = classify_contravariant(make_contravariant_pair(sc.chart, x->E, x->Lambda, s, tol), x->omega, s, tol);
    results["contravariant"] = classification_json(r);
    add(r.labels);
  } else {
    const auto& spec = std::get<DarbouxSpec>(sc.data);
    auto rc = classify_covariant(darboux_covariant(spec, s), s, tol);
    ACPJTriple t = darboux_contravariant(spec);
    auto rx = classify_contravariant(make_contravariant_pair(sc.chart, t.E, t.Lambda, s, tol), t.omega, s, tol);
    results["covariant"] = classification_json(rc);
    results["contravariant"] = classification_json(rx);
    add(rc.labels);
    add(rx.labels);
  }
  return labels;
}

// Numeric table: coordinates, then the degree-1 and degree-2 objects at each sample.
template <Variance V1, Variance V2>
Json table_json(const Chart& chart, const Sampler& s, const std::vector<Antisym<V1, double>>& one,
                const std::vector<Antisym<V2, double>>& two, const std::string& n1, const std::string& n2) {
  Json cols = Json::array();
  for (const auto& c : chart.coords()) cols.push_back(c);
  for (const auto& c : chart.coords()) cols.push_back(n1 + ":" + c);
  auto pairs = increasing_indices(chart.dim(), 2);
  for (const auto& i : pairs) cols.push_back(n2 + ":" + index_name(i, chart));
  Json rows = Json::array();
  for (std::size_t k = 0; k < one.size(); ++k) {
    Json row = Json::array();
    for (double v : s.points()[k].values) row.push_back(num(v));
    for (int i = 0; i < chart.dim(); ++i) row.push_back(num(one[k].coeff({i})));
    for (const auto& i : pairs) row.push_back(num(two[k].coeff(i)));
    rows.push_back(std::move(row));
  }
  return {{"columns", std::move(cols)}, {"rows", std::move(rows)}};
}

template <Variance V>
double worst_numeric(const std::vector<Antisym<V, double>>& a, const std::vector<Antisym<V, double>>& b) {
  double r = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::map<Index, std::pair<double, double>> merged;
    for (const auto& [i, c] : a[k].terms()) merged[i].first = c;
    for (const auto& [i, c] : b[k].terms()) merged[i].second = c;
    for (const auto& [i, pr] : merged) {
      double x = relative_residual(pr.first, pr.second);
      if (std::isnan(x) || x > r) r = x;
    }
  }
  return r;
}

void dualize_covariant(const CovariantPair& p, const Sampler& s, const Options& o, Json& results,
                       const std::optional<ACPJTriple>& expected) {
  CovariantDual d = dual_of_covariant(p, s, o.tol);
  results["from"] = "covariant";
  results["dual"] = {{"E", terms_json(d.pair.E, p.chart)}, {"Lambda", terms_json(d.pair.Lambda, p.chart)}};
  results["duality"] = duality_json(d.residuals);
  double worst = d.residuals.max();
  if (expected) {
    ResidualCheck c;
    c.add(d.pair.E, expected->E);
    c.add(d.pair.Lambda, expected->Lambda);
    double r = c.run(s).residual;
    results["dual - Darboux (E, Lambda)"] = num(r);
    if (std::isnan(r) || r > worst) worst = r;
  }
  if (o.roundtrip) {
    ContravariantDual back = dual_of_contravariant(d.pair, s, o.tol);
    ResidualCheck c;
    c.add(back.pair.omega, p.omega);
    c.add(back.pair.Omega, p.Omega);
    double r = c.run(s).residual;
    results["roundtrip"] = num(r);
    if (std::isnan(r) || r > worst) worst = r;
  }
  results["table"] = table_json(p.chart, s, sample(d.pair.E, s), sample(d.pair.Lambda, s), "E", "Lambda");
  results["max residual"] = num(worst);
}

void dualize_contravariant(const ContravariantPair& p, const Sampler& s, const Options& o, Json& results) {
  ContravariantDual d = dual_of_contravariant(p, s, o.tol);
  results["from"] = "contravariant";
  results["dual"] = {{"omega", terms_json(d.pair.omega, p.chart)}, {"Omega", terms_json(d.pair.Omega, p.chart)}};
  results["duality"] = duality_json(d.residuals);
  double worst = d.residuals.max();
  if (o.roundtrip) {
    CovariantDual back = dual_of_covariant(d.pair, s, o.tol);
    ResidualCheck c;
    c.add(back.pair.E, p.E);
    c.add(back.pair.Lambda, p.Lambda);
    double r = c.run(s).residual;
    results["roundtrip"] = num(r);
    if (std::isnan(r) || r > worst) worst = r;
  }
  results["table"] = table_json(p.chart, s, sample(d.pair.omega, s), sample(d.pair.Omega, s), "omega", "Omega");
  results["max residual"] = num(worst);
}

// Spacetime pairs live in 7 dimensions; the dual is computed pointwise only.
void dualize_spacetime(const PhaseStructures& p, const Sampler& s, const Options& o, Json& results) {
  auto w = sample(p.omega_u, s);
  auto big = sample(p.Omega_u, s);
  std::vector<NumVector> e, lam;
  for (std::size_t k = 0; k < w.size(); ++k) {
    auto [ek, lk] = dual_at(w[k], big[k]);
    e.push_back(std::move(ek));
    lam.push_back(std::move(lk));
  }
  DualityResiduals dr = duality_residuals(w, big, e, lam);
  results["from"] = "covariant";
  results["duality"] = duality_json(dr);
  double worst = dr.max();
  double r = std::max(worst_numeric(e, sample(p.E_u, s)), worst_numeric(lam, sample(p.Lambda_u, s)));
  results["dual - (E, Lambda)"] = num(r);
  if (std::isnan(r) || r > worst) worst = r;
  if (o.roundtrip) {
    std::vector<NumForm> w2, big2;
    for (std::size_t k = 0; k < e.size(); ++k) {
      auto [wk, bk] = dual_at(e[k], lam[k]);
      w2.push_back(std::move(wk));
      big2.push_back(std::move(bk));
    }
    double rt = std::max(worst_numeric(w2, w), worst_numeric(big2, big));
    results["roundtrip"] = num(rt);
    if (std::isnan(rt) || rt > worst) worst = rt;
  }
  results["table"] = table_json(p.chart, s, e, lam, "E", "Lambda");
  results["max residual"] = num(worst);
}

int dualize(const Scenario& sc, const Sampler& s, const Options& o, Json& results) {
  if (auto p = spacetime_of(sc, s)) {
    dualize_spacetime(*p, s, o, results);
  } else if (const auto* c = std::get_if<CovariantInput>(&sc.data)) {
    dualize_covariant(make_covariant_pair(sc.chart, c->omega, c->Omega, s, o.tol), s, o, results, std::nullopt);
  } else if (const auto* x = std::get_if<ContravariantInput>(&sc.data)) {
    dualize_contravariant(make_contravariant_pair(sc.chart, x->E, x->Lambda, s, o.tol), s, o, results);
  } else {
    const auto& spec = std::get<DarbouxSpec>(sc.data);
    dualize_covariant(darboux_covariant(spec, s), s, o, results, darboux_contravariant(spec));
  }
  const Json& m = results["max residual"];
  return m.is_number() && m.get<double>() <= o.tol ? 0 : 2;
}

Json value_stats(const Expr& e, const Sampler& s, bool with_values) {
  std::vector<Expr> roots{e};
  Json values = Json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : sample_values(roots, s)) {
    values.push_back(num(row[0]));
    lo = std::min(lo, std::abs(row[0]));
    hi = std::isnan(row[0]) || std::abs(row[0]) > hi ? std::abs(row[0]) : hi;
  }
  Json out;
  out["min |value|"] = num(lo);
  out["max |value|"] = num(hi);
  if (with_values) out["values"] = std::move(values);
  return out;
}

Expr parse_flag(const std::string& text, const Chart& chart, const std::string& flag) {
  try {
    return parse_expr_text(text, chart);
  } catch (const Error& e) {
    throw InputError(flag + ": " + e.what());
  }
}

int bracket(const Scenario& sc, const Sampler& s, const Options& o, Json& results) {
  std::optional<BracketContext> ctx;
  if (auto p = spacetime_of(sc, s)) {
    ctx = make_context(make_contravariant_pair(sc.chart, p->E_u, p->Lambda_u, s, o.tol), p->omega_u);
  } else if (const auto* x = std::get_if<ContravariantInput>(&sc.data)) {
    ctx = make_context(make_contravariant_pair(sc.chart, x->E, x->Lambda, s, o.tol), x->omega);
  } else if (const auto* d = std::get_if<DarbouxSpec>(&sc.data)) {
    ctx = make_context(darboux_contravariant(*d), s);
  } else {
    throw InputError("bracket needs a contravariant, darboux, galilei or einstein scenario");
  }
  if (o.omega_defect && !ctx->omega) throw InputError("--omega-defect needs omega in the scenario");
  Expr f = parse_flag(o.f, sc.chart, "--f");
  Expr g = parse_flag(o.g, sc.chart, "--g");
  const BracketKind kind = o.jacobi ? BracketKind::Jacobi : BracketKind::Poisson;
  Expr b = o.jacobi ? jacobi_bracket(*ctx, f, g) : poisson_bracket(*ctx, f, g);
  results["bracket"] = o.jacobi ? "jacobi" : "poisson";
  results["f"] = print_expr(f, sc.chart);
  results["g"] = print_expr(g, sc.chart);
  results["value"] = print_expr(b, sc.chart);
  results["sampled"] = value_stats(b, s, true);
  if (!o.h.empty()) {
    Expr h = parse_flag(o.h, sc.chart, "--h");
    Expr j = jacobiator(*ctx, kind, f, g, h);
    ResidualCheck c;
    c.add(j, jacobiator_rhs(*ctx, kind, f, g, h));
    Json jr = value_stats(j, s, false);
    jr["h"] = print_expr(h, sc.chart);
    jr["identity residual"] = num(c.run(s).residual);
    results["jacobiator"] = std::move(jr);
    if (o.jacobi) {
      Expr ld = lift_defect(*ctx, f, g, h);
      ResidualCheck lc;
      lc.add(ld, lift_defect_rhs(*ctx, f, g, h));
      Json lr = value_stats(ld, s, false);
      lr["identity residual"] = num(lc.run(s).residual);
      results["([X_f,X_g] - X_[f,g]).h"] = std::move(lr);
    }
  }
  if (o.omega_defect) results["{f,g} + d omega(X_f, X_g)"] = value_stats(omega_defect(*ctx, f, g), s, false);
  return 0;
}

int scenario(const Options& o, Json& results, std::optional<Sampler>& used) {
  Scenario sc{phase_chart(), {}, std::nullopt, galilei_flat()};
  if (o.metric == "flat") {
    if (o.spacetime == "einstein") sc.data = einstein_minkowski();
  } else if (o.metric == "rindler") {
    if (o.spacetime != "einstein") throw InputError("--metric rindler is an einstein preset");
    sc.data = einstein_rindler();
  } else {
    sc = load_scenario(o.metric);
    if (sc.kind() != o.spacetime)
      throw InputError(o.metric + ": expected a " + o.spacetime + " scenario, found " + sc.kind());
  }
  used = sc.sampler(o.seed, o.samples);
  auto p = spacetime_of(sc, *used);
  SpacetimeReport rep = verify_theorems(*p, *used, o.tol);
  results = spacetime_json(rep);
  results["ok"] = rep.ok();
  return rep.ok() ? 0 : 2;
}

Json header(const std::string& command, const Options& o) {
  Json r;
  r["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  r["command"] = command;
  r["input"] = o.file;
  r["sampler"] = {{"seed", o.seed}, {"samples", o.samples}, {"tol", o.tol}};
  return r;
}

// ---------------------------------------------------------------------------
// Text rendering

std::string scalar_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_null()) return "-";
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  return format_number(j.get<double>());
}

bool all_scalars(const Json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

std::string join(const Json& arr, const std::string& sep) {
  std::string s;
  for (const auto& e : arr) s += (s.empty() ? "" : sep) + scalar_text(e);
  return s;
}

void render(const Json& j, int indent, std::ostringstream& out) {
  const std::string pad(indent, ' ');
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      out << pad << k << ":\n";
      render(v, indent + 2, out);
    } else if (v.is_array() && all_scalars(v)) {
      out << pad << k << ": " << (v.empty() ? "-" : join(v, ", ")) << "\n";
    } else if (v.is_array()) {
      out << pad << k << ":\n";
      for (const auto& row : v) out << pad << "  " << (row.is_array() ? join(row, " ") : row.dump()) << "\n";
    } else {
      out << pad << k << ": " << scalar_text(v) << "\n";
    }
  }
}

}  // namespace

std::string render_text(const Json& report) {
  std::ostringstream out;
  render(report, 0, out);
  return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structures on odd-dimensional manifolds: classification, duality, brackets, phase spaces",
               kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--samples", o.samples, "sample points")->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "sampler seed");
    sub->add_option("--format", o.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  };
  auto* classify_cmd = app.add_subcommand("classify", "label a scenario");
  classify_cmd->add_option("file", o.file, "scenario file")->required();
  classify_cmd->add_option("--expect", o.expect, "label that must be present")->check(CLI::IsMember(kLabels));
  common(classify_cmd);
  auto* dualize_cmd = app.add_subcommand("dualize", "dual pair and duality residuals");
  dualize_cmd->add_option("file", o.file, "scenario file")->required();
  dualize_cmd->add_flag("--roundtrip", o.roundtrip, "also compare the double dual with the input");
  common(dualize_cmd);
  auto* bracket_cmd = app.add_subcommand("bracket", "Poisson or Jacobi bracket of two functions");
  bracket_cmd->set_help_flag("--help", "print this help message and exit");  // frees --h
  bracket_cmd->add_option("file", o.file, "scenario file")->required();
  bracket_cmd->add_option("--f", o.f, "first function")->required();
  bracket_cmd->add_option("--g", o.g, "second function")->required();
  bracket_cmd->add_option("--h", o.h, "third function; adds the jacobiator");
  bracket_cmd->add_flag("--jacobi", o.jacobi, "Jacobi bracket instead of the Poisson bracket");
  bracket_cmd->add_flag("--omega-defect", o.omega_defect, "{f,g} + d omega(X_f, X_g) at the samples");
  common(bracket_cmd);
  auto* scenario_cmd = app.add_subcommand("scenario", "phase-space theorems for a spacetime");
  scenario_cmd->add_option("kind", o.spacetime, "galilei or einstein")
      ->required()
      ->check(CLI::IsMember({"galilei", "einstein"}));
  scenario_cmd->add_option("--metric", o.metric, "flat, rindler or a scenario file");
  common(scenario_cmd);

  std::vector<const char*> argv{kToolName};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string command = app.get_subcommands().front()->get_name();
  if (command == "scenario") o.file = o.metric;
  Json report = header(command, o);
  Json results = Json::object();
  int code = 0;
  try {
    if (command == "scenario") {
      std::optional<Sampler> used;
      code = scenario(o, results, used);
    } else {
      Scenario sc = load_scenario(o.file);
      Sampler s = sc.sampler(o.seed, o.samples);
      results["kind"] = sc.kind();
      if (command == "classify") {
        auto labels = classify(sc, s, o.tol, results);
        results["labels"] = std::vector<std::string>(labels.begin(), labels.end());
        if (!o.expect.empty() && !labels.count(o.expect)) code = 2;
      } else if (command == "dualize") {
        code = dualize(sc, s, o, results);
      } else {
        code = bracket(sc, s, o, results);
      }
    }
  } catch (const Error& e) {
    report["results"] = std::move(results);
    report["expect"] = o.expect.empty() ? Json() : Json(o.expect);
    report["status"] = "error";
    report["error"] = e.what();
    err << "error: " << e.what() << "\n";
    if (o.format == "structured") out << report.dump(2) << "\n";
    return 1;
  }
  report["results"] = std::move(results);
  report["expect"] = o.expect.empty() ? Json() : Json(o.expect);
  report["status"] = code == 0 ? "ok" : (o.expect.empty() ? "failed" : "mismatch");
  if (o.format == "structured")
    out << report.dump(2) << "\n";
  else
    out << render_text(report);
  return code;
}

}  // namespace oddgeo::cli
