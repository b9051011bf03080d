#include "oddgeo/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_map>

#include "oddgeo/error.hpp"

namespace oddgeo {

// ---------------------------------------------------------------------------
// Chart

struct Chart::Data {
  std::vector<std::string> coords;
  std::vector<std::string> const_names;
  std::vector<double> const_values;
};

Chart::Chart(std::vector<std::string> coords,
             std::vector<std::pair<std::string, double>> constants) {
  if (coords.empty()) throw InputError("chart needs at least one coordinate");
  auto data = std::make_shared<Data>();
  std::set<std::string> seen;
  for (auto& c : coords) {
    if (c.empty()) throw InputError("empty coordinate name");
    if (!seen.insert(c).second) throw InputError("duplicate chart symbol '" + c + "'");
  }
  for (auto& [name, value] : constants) {
    if (!seen.insert(name).second) throw InputError("duplicate chart symbol '" + name + "'");
    data->const_names.push_back(name);
    data->const_values.push_back(value);
  }
  data->coords = std::move(coords);
  data_ = std::move(data);
}

int Chart::dim() const noexcept { return static_cast<int>(data_->coords.size()); }
const std::string& Chart::coord(int i) const { return data_->coords.at(i); }
const std::vector<std::string>& Chart::coords() const noexcept { return data_->coords; }

std::optional<int> Chart::coord_index(std::string_view name) const {
  auto it = std::find(data_->coords.begin(), data_->coords.end(), name);
  if (it == data_->coords.end()) return std::nullopt;
  return static_cast<int>(it - data_->coords.begin());
}

int Chart::constant_count() const noexcept { return static_cast<int>(data_->const_names.size()); }
const std::string& Chart::constant_name(int i) const { return data_->const_names.at(i); }
double Chart::constant_value(int i) const { return data_->const_values.at(i); }
const std::vector<double>& Chart::constant_values() const noexcept { return data_->const_values; }

std::optional<int> Chart::constant_index(std::string_view name) const {
  auto it = std::find(data_->const_names.begin(), data_->const_names.end(), name);
  if (it == data_->const_names.end()) return std::nullopt;
  return static_cast<int>(it - data_->const_names.begin());
}

Chart Chart::with_constant(std::string_view name, double value) const {
  auto idx = constant_index(name);
  if (!idx) throw UnknownSymbolError(std::string(name));
  auto data = std::make_shared<Data>(*data_);
  data->const_values[*idx] = value;
  Chart out = *this;
  out.data_ = std::move(data);
  return out;
}

bool operator==(const Chart& a, const Chart& b) {
  if (a.data_ == b.data_) return true;
  return a.data_->coords == b.data_->coords && a.data_->const_names == b.data_->const_names &&
         a.data_->const_values == b.data_->const_values;
}

// ---------------------------------------------------------------------------
// Expr construction with light simplification

Expr make_node(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }

namespace {

const Expr& zero_expr() {
  static const Expr z = make_node(Node{Op::Literal, 0.0, 0, 0, {}});
  return z;
}

}  // namespace

Expr::Expr() : node_(zero_expr().node_) {}
Expr::Expr(double value) : Expr(literal(value)) {}

Expr Expr::literal(double v) {
  if (v == 0.0) return zero_expr();
  return make_node(Node{Op::Literal, v, 0, 0, {}});
}
Expr Expr::coord(int i) { return make_node(Node{Op::Coord, 0.0, i, 0, {}}); }
Expr Expr::constant(int i) { return make_node(Node{Op::Constant, 0.0, i, 0, {}}); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_literal() && b.is_literal()) return Expr::literal(a.literal_value() + b.literal_value());
  Node n{Op::Add, 0.0, 0, 0, {}};
  double folded = 0.0;
  for (const Expr* e : {&a, &b}) {
    if (e->op() == Op::Add) {
      for (const auto& t : e->node().args) {
        if (t.is_literal()) folded += t.literal_value();
        else n.args.push_back(t);
      }
    } else if (e->is_literal()) {
      folded += e->literal_value();
    } else {
      n.args.push_back(*e);
    }
  }
  if (folded != 0.0) n.args.push_back(Expr::literal(folded));
  if (n.args.empty()) return Expr();
  if (n.args.size() == 1) return n.args.front();
  return make_node(std::move(n));
}

Expr operator-(const Expr& a) {
  if (a.is_literal()) return Expr::literal(-a.literal_value());
  if (a.op() == Op::Neg) return a.node().args.front();
  return make_node(Node{Op::Neg, 0.0, 0, 0, {a}});
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_literal() && b.is_literal()) return Expr::literal(a.literal_value() * b.literal_value());
  Node n{Op::Mul, 0.0, 0, 0, {}};
  double folded = 1.0;
  for (const Expr* e : {&a, &b}) {
    const Expr* f = e;
    Expr inner;
    if (f->op() == Op::Neg) {
      folded = -folded;
      inner = f->node().args.front();
      f = &inner;
    }
    if (f->op() == Op::Mul) {
      for (const auto& t : f->node().args) {
        if (t.is_literal()) folded *= t.literal_value();
        else n.args.push_back(t);
      }
    } else if (f->is_literal()) {
      folded *= f->literal_value();
    } else {
      n.args.push_back(*f);
    }
  }
  if (folded == 0.0) return Expr();
  if (n.args.empty()) return Expr::literal(folded);
  if (folded == -1.0) {
    Expr body = n.args.size() == 1 ? n.args.front() : make_node(std::move(n));
    return -body;
  }
  if (folded != 1.0) n.args.insert(n.args.begin(), Expr::literal(folded));
  if (n.args.size() == 1) return n.args.front();
  return make_node(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_one()) return a;
  if (a.is_zero() && !b.is_zero()) return Expr();
  if (a.is_literal() && b.is_literal() && b.literal_value() != 0.0)
    return Expr::literal(a.literal_value() / b.literal_value());
  if (b.is_literal() && b.literal_value() == -1.0) return -a;
  return make_node(Node{Op::Div, 0.0, 0, 0, {a, b}});
}

Expr pow(const Expr& base, int exponent) {
  if (exponent < 0) throw InputError("negative integer exponent");
  if (exponent == 0) return Expr::literal(1.0);
  if (exponent == 1) return base;
  if (base.is_literal()) return Expr::literal(std::pow(base.literal_value(), exponent));
  if (base.op() == Op::Pow)
    return pow(base.node().args.front(), base.node().exponent * exponent);
  return make_node(Node{Op::Pow, 0.0, 0, exponent, {base}});
}

Expr sqrt(const Expr& arg) {
  if (arg.is_literal() && arg.literal_value() >= 0.0) return Expr::literal(std::sqrt(arg.literal_value()));
  return make_node(Node{Op::Sqrt, 0.0, 0, 0, {arg}});
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

struct Differ {
  int coord;
  std::unordered_map<const Node*, Expr> memo;
  std::unordered_map<const Node*, bool> depends;

  bool depends_on(const Expr& e) {
    auto it = depends.find(e.id());
    if (it != depends.end()) return it->second;
    bool d = false;
    switch (e.op()) {
      case Op::Coord: d = e.node().index == coord; break;
      case Op::Literal:
      case Op::Constant: d = false; break;
      default:
        for (const auto& a : e.node().args) {
          if (depends_on(a)) {
            d = true;
            break;
          }
        }
    }
    depends.emplace(e.id(), d);
    return d;
  }

  Expr operator()(const Expr& e) {
    if (!depends_on(e)) return Expr();
    auto it = memo.find(e.id());
    if (it != memo.end()) return it->second;
    const Node& n = e.node();
    Expr r;
    switch (n.op) {
      case Op::Literal:
      case Op::Constant: r = Expr(); break;
      case Op::Coord: r = Expr::literal(1.0); break;
      case Op::Add:
        for (const auto& a : n.args) r += (*this)(a);
        break;
      case Op::Mul:
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          Expr di = (*this)(n.args[i]);
          if (di.is_zero()) continue;
          Expr term = di;
          for (std::size_t j = 0; j < n.args.size(); ++j)
            if (j != i) term = term * n.args[j];
          r += term;
        }
        break;
      case Op::Div: {
        const Expr& u = n.args[0];
        const Expr& v = n.args[1];
        Expr du = (*this)(u);
        Expr dv = (*this)(v);
        // (u/v)' = u'/v - u v' / v^2
        r = du / v - (u * dv) / pow(v, 2);
        break;
      }
      case Op::Pow: {
        const Expr& b = n.args[0];
        r = Expr::literal(n.exponent) * pow(b, n.exponent - 1) * (*this)(b);
        break;
      }
      case Op::Sqrt:
        r = (*this)(n.args[0]) / (Expr::literal(2.0) * e);
        break;
      case Op::Neg: r = -(*this)(n.args[0]); break;
    }
    memo.emplace(e.id(), r);
    return r;
  }
};

}  // namespace

Expr diff(const Expr& e, int coord) {
  Differ d{coord, {}, {}};
  return d(e);
}

int max_coord_index(const Expr& e) {
  std::unordered_map<const Node*, int> memo;
  std::function<int(const Expr&)> rec = [&](const Expr& x) -> int {
    auto it = memo.find(x.id());
    if (it != memo.end()) return it->second;
    int m = -1;
    if (x.op() == Op::Coord) m = x.node().index;
    for (const auto& a : x.node().args) m = std::max(m, rec(a));
    memo.emplace(x.id(), m);
    return m;
  };
  return rec(e);
}

bool is_coordinate_free(const Expr& e) { return max_coord_index(e) < 0; }

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

bool is_atomic(const Expr& e) {
  switch (e.op()) {
    case Op::Coord:
    case Op::Constant:
    case Op::Sqrt: return true;
    case Op::Literal: return e.literal_value() >= 0.0;
    default: return false;
  }
}

void print_rec(const Expr& e, const Chart& chart, std::string& out);

void print_wrapped(const Expr& e, const Chart& chart, std::string& out) {
  if (is_atomic(e)) {
    print_rec(e, chart, out);
  } else {
    out += '(';
    print_rec(e, chart, out);
    out += ')';
  }
}

void print_rec(const Expr& e, const Chart& chart, std::string& out) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Literal:
      if (n.value < 0) {
        out += "(-";
        out += format_number(-n.value);
        out += ')';
      } else {
        out += format_number(n.value);
      }
      break;
    case Op::Constant: out += chart.constant_name(n.index); break;
    case Op::Coord: out += chart.coord(n.index); break;
    case Op::Add:
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += " + ";
        const Expr& a = n.args[i];
        // A sum term only needs parentheses when it is itself a sum.
        if (a.op() == Op::Add) print_wrapped(a, chart, out);
        else print_rec(a, chart, out);
      }
      break;
    case Op::Mul:
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += '*';
        const Expr& a = n.args[i];
        if (a.op() == Op::Pow || is_atomic(a)) print_rec(a, chart, out);
        else print_wrapped(a, chart, out);
      }
      break;
    case Op::Div:
      print_wrapped(n.args[0], chart, out);
      out += '/';
      print_wrapped(n.args[1], chart, out);
      break;
    case Op::Pow:
      print_wrapped(n.args[0], chart, out);
      out += '^';
      out += std::to_string(n.exponent);
      break;
    case Op::Sqrt:
      out += "sqrt(";
      print_rec(n.args[0], chart, out);
      out += ')';
      break;
    case Op::Neg:
      out += "(-";
      print_wrapped(n.args[0], chart, out);
      out += ')';
      break;
  }
}

}  // namespace

std::string print_expr(const Expr& e, const Chart& chart) {
  std::string out;
  print_rec(e, chart, out);
  return out;
}

// ---------------------------------------------------------------------------
// Tape

Tape::Tape(std::span<const Expr> roots) {
  std::unordered_map<const Node*, int> slot;
  // Iterative post-order so deep expressions cannot overflow the stack.
  auto emit = [&](const Expr& root) -> int {
    std::vector<std::pair<const Expr*, bool>> stack{{&root, false}};
    while (!stack.empty()) {
      auto [e, expanded] = stack.back();
      stack.pop_back();
      if (slot.count(e->id())) continue;
      const Node& n = e->node();
      if (!expanded && !n.args.empty()) {
        stack.push_back({e, true});
        for (auto it = n.args.rbegin(); it != n.args.rend(); ++it)
          if (!slot.count(it->id())) stack.push_back({&*it, false});
        continue;
      }
      Instr ins{n.op, n.exponent, 0, 0, n.value};
      if (n.op == Op::Coord || n.op == Op::Constant) {
        ins.first = n.index;
      } else if (!n.args.empty()) {
        ins.first = static_cast<int>(operands_.size());
        ins.count = static_cast<int>(n.args.size());
        for (const auto& a : n.args) operands_.push_back(slot.at(a.id()));
      }
      slot.emplace(e->id(), static_cast<int>(code_.size()));
      code_.push_back(ins);
    }
    return slot.at(root.id());
  };
  outputs_.reserve(roots.size());
  for (const auto& r : roots) outputs_.push_back(emit(r));
}

void Tape::evaluate(std::span<const double> coords, std::span<const double> constants,
                    std::span<double> out) const {
  std::vector<double> reg(code_.size());
  for (std::size_t k = 0; k < code_.size(); ++k) {
    const Instr& in = code_[k];
    const int* ops = operands_.data() + in.first;
    double v = 0.0;
    switch (in.op) {
      case Op::Literal: v = in.value; break;
      case Op::Coord: v = coords[in.first]; break;
      case Op::Constant: v = constants[in.first]; break;
      case Op::Add:
        for (int i = 0; i < in.count; ++i) v += reg[ops[i]];
        break;
      case Op::Mul:
        v = 1.0;
        for (int i = 0; i < in.count; ++i) v *= reg[ops[i]];
        break;
      case Op::Div: {
        double den = reg[ops[1]];
        if (den == 0.0)
          throw DomainError("division by zero", std::vector<double>(coords.begin(), coords.end()));
        v = reg[ops[0]] / den;
        break;
      }
      case Op::Pow: {
        double b = reg[ops[0]];
        v = 1.0;
        for (int i = 0; i < in.exponent; ++i) v *= b;
        break;
      }
      case Op::Sqrt: {
        double a = reg[ops[0]];
        if (a < 0.0)
          throw DomainError("square root of a negative number",
                            std::vector<double>(coords.begin(), coords.end()));
        v = std::sqrt(a);
        break;
      }
      case Op::Neg: v = -reg[ops[0]]; break;
    }
    reg[k] = v;
  }
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = reg[outputs_[i]];
}

std::vector<double> Tape::evaluate(std::span<const double> coords,
                                   std::span<const double> constants) const {
  std::vector<double> out(outputs_.size());
  evaluate(coords, constants, out);
  return out;
}

// ---------------------------------------------------------------------------
// Point / ScalarField

Point::Point(Chart c, std::vector<double> v) : chart(std::move(c)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != chart.dim())
    throw InputError("point has " + std::to_string(values.size()) + " values, chart dimension is " +
                     std::to_string(chart.dim()));
}

ScalarField::ScalarField(Chart chart, Expr expr) : chart_(std::move(chart)), expr_(std::move(expr)) {
  if (max_coord_index(expr_) >= chart_.dim())
    throw InputError("expression references a coordinate outside the chart");
}

double ScalarField::eval(const Point& p) const {
  if (!(p.chart == chart_)) throw InputError("point and field live on different charts");
  Expr roots[] = {expr_};
  Tape tape(roots);
  return tape.evaluate(p.values, chart_.constant_values()).front();
}

ScalarField parse_expr(std::string_view text, const Chart& chart) {
  return ScalarField(chart, parse_expr_text(text, chart));
}

ScalarField diff(const ScalarField& f, std::string_view coord) {
  auto idx = f.chart().coord_index(coord);
  if (!idx) throw UnknownSymbolError(std::string(coord));
  return ScalarField(f.chart(), diff(f.expr(), *idx));
}

double eval(const ScalarField& f, const Point& p) { return f.eval(p); }

// ---------------------------------------------------------------------------
// Random polynomials

double uniform(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Expr random_polynomial(std::span<const int> coords, int max_degree, std::mt19937_64& rng) {
  // Enumerate exponent vectors of total degree <= max_degree in a fixed order.
  const int k = static_cast<int>(coords.size());
  std::vector<int> exps(k, 0);
  Expr sum;
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == k) {
      Expr mono = Expr::literal(uniform(rng, -1.0, 1.0));
      for (int i = 0; i < k; ++i) mono = mono * pow(Expr::coord(coords[i]), exps[i]);
      sum += mono;
      return;
    }
    for (int e = 0; e <= left; ++e) {
      exps[pos] = e;
      rec(pos + 1, left - e);
    }
    exps[pos] = 0;
  };
  rec(0, max_degree);
  return sum;
}

Expr random_polynomial(int dim, int max_degree, std::mt19937_64& rng) {
  std::vector<int> coords(dim);
  for (int i = 0; i < dim; ++i) coords[i] = i;
  return random_polynomial(coords, max_degree, rng);
}

}  // namespace oddgeo
