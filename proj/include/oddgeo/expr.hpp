#pragma once

// Minimal computer-algebra kernel: expression DAGs over chart coordinates and
// named constants, exact partial derivatives, and fast batched evaluation.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oddgeo {

/// Ordered coordinate names plus named real constants. Immutable and cheap to
/// copy; two charts compare equal when names and constant values agree.
class Chart {
 public:
  Chart(std::vector<std::string> coords,
        std::vector<std::pair<std::string, double>> constants = {});

  int dim() const noexcept;
  const std::string& coord(int i) const;
  const std::vector<std::string>& coords() const noexcept;
  std::optional<int> coord_index(std::string_view name) const;

  int constant_count() const noexcept;
  const std::string& constant_name(int i) const;
  double constant_value(int i) const;
  std::optional<int> constant_index(std::string_view name) const;
  const std::vector<double>& constant_values() const noexcept;

  /// Same coordinates and constant names, different constant values.
  Chart with_constant(std::string_view name, double value) const;

  friend bool operator==(const Chart& a, const Chart& b);

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

enum class Op : std::uint8_t { Literal, Constant, Coord, Add, Mul, Div, Pow, Sqrt, Neg };

class Expr;

struct Node {
  Op op;
  double value = 0.0;  // Literal
  int index = 0;       // Coord / Constant
  int exponent = 0;    // Pow
  std::vector<Expr> args;
};

/// Immutable expression handle. Subtrees are shared, so an expression is a DAG.
/// Construction applies constant folding and 0/1 identities only.
class Expr {
 public:
  Expr();  // literal zero
  Expr(double value);  // NOLINT(google-explicit-constructor): literals read naturally

  static Expr literal(double v);
  static Expr coord(int i);
  static Expr constant(int i);

  const Node& node() const noexcept { return *node_; }
  const Node* id() const noexcept { return node_.get(); }
  Op op() const noexcept { return node_->op; }

  bool is_literal() const noexcept { return node_->op == Op::Literal; }
  bool is_zero() const noexcept { return is_literal() && node_->value == 0.0; }
  bool is_one() const noexcept { return is_literal() && node_->value == 1.0; }
  double literal_value() const noexcept { return node_->value; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  friend Expr make_node(Node n);
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr sqrt(const Expr& arg);

/// Exact partial derivative with respect to coordinate `coord`.
Expr diff(const Expr& e, int coord);

/// True when no coordinate appears in `e` (constants and literals only).
bool is_coordinate_free(const Expr& e);

/// Largest coordinate index referenced, or -1.
int max_coord_index(const Expr& e);

/// Rendering in the ASCII expression grammar; `parse_expr(print_expr(e))`
/// evaluates identically.
std::string print_expr(const Expr& e, const Chart& chart);

/// Recursive-descent parser for the expression grammar.
/// Throws ParseError (with byte offset) or UnknownSymbolError.
Expr parse_expr_text(std::string_view text, const Chart& chart);

/// Number formatting shared by printers and reports (shortest round-trip).
std::string format_number(double v);

/// Straight-line program evaluating a batch of expressions. Shared subtrees
/// are computed once per evaluation.
class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> roots);

  std::size_t size() const noexcept { return outputs_.size(); }

  /// Evaluates every root at (coords, constants) into `out`.
  /// Throws DomainError carrying `coords` on division by zero or sqrt(<0).
  void evaluate(std::span<const double> coords, std::span<const double> constants,
                std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> coords,
                               std::span<const double> constants) const;

 private:
  struct Instr {
    Op op;
    int exponent;
    int first;  // operand range into operands_, or coord/constant index
    int count;
    double value;
  };
  std::vector<Instr> code_;
  std::vector<int> operands_;
  std::vector<int> outputs_;
};

/// A point of a chart: one value per coordinate.
struct Point {
  Chart chart;
  std::vector<double> values;

  Point(Chart c, std::vector<double> v);
};

/// An expression bound to the chart it is written on.
class ScalarField {
 public:
  ScalarField(Chart chart, Expr expr);

  const Chart& chart() const noexcept { return chart_; }
  const Expr& expr() const noexcept { return expr_; }

  double eval(const Point& p) const;
  std::string print() const { return print_expr(expr_, chart_); }

 private:
  Chart chart_;
  Expr expr_;
};

ScalarField parse_expr(std::string_view text, const Chart& chart);
ScalarField diff(const ScalarField& f, std::string_view coord);
double eval(const ScalarField& f, const Point& p);

/// Uniform double in [lo, hi) from the top 53 bits of a 64-bit draw; spelled
/// out so sample sequences do not depend on the standard library's
/// distribution implementation.
double uniform(std::mt19937_64& rng, double lo, double hi);

/// Polynomial in all chart coordinates of total degree <= `max_degree`, with
/// every monomial coefficient uniform in [-1, 1].
Expr random_polynomial(int dim, int max_degree, std::mt19937_64& rng);

/// Same, restricted to the listed coordinates.
Expr random_polynomial(std::span<const int> coords, int max_degree, std::mt19937_64& rng);

}  // namespace oddgeo
