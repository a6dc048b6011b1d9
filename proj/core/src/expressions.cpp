#include "holderlab/expressions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "holderlab/error.hpp"

namespace holderlab {

using json = nlohmann::json;

struct Expression::Node {
  Kind kind;
  std::vector<double> p;
  int n = 1;
  std::vector<double> breaks;
  std::vector<std::vector<double>> coefficients;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double radius2(double x, double y, double x0, double y0) {
  return (x - x0) * (x - x0) + (y - y0) * (y - y0);
}

double eval_node(const Node& nd, const SpaceTimePoint& pt) {
  const auto& p = nd.p;
  switch (nd.kind) {
    case Expression::Kind::Constant:
      return p[0];
    case Expression::Kind::Affine:
      return p[0] * pt.x + p[1] * pt.y + p[2] * pt.t + p[3];
    case Expression::Kind::Power: {
      const double r = std::sqrt(radius2(pt.x, pt.y, p[2], p[3]));
      return p[1] * std::pow(r, p[0]);
    }
    case Expression::Kind::TimePower:
      return p[1] * std::pow(std::abs(p[2] - pt.t), p[0]);
    case Expression::Kind::HeatMode: {
      const double k = p[0];
      double v = p[1] * std::sin(k * std::numbers::pi * pt.x);
      if (nd.n == 2) v *= std::sin(k * std::numbers::pi * pt.y);
      return v * std::exp(-nd.n * k * k * std::numbers::pi * std::numbers::pi * pt.t);
    }
    case Expression::Kind::Trig:
      return p[1] * std::cos(p[0] * pt.x + p[2]);
    case Expression::Kind::Gaussian:
      return p[1] * std::exp(-radius2(pt.x, pt.y, p[2], p[3]) / (2.0 * p[0] * p[0]));
    case Expression::Kind::Barenblatt: {
      if (!(pt.t > 0.0)) return kNaN;
      const double m = p[0];
      const auto e = barenblatt_exponents(m, nd.n);
      const double r2 = nd.n == 2 ? pt.x * pt.x + pt.y * pt.y : pt.x * pt.x;
      const double inner = p[1] - e.b * r2 * std::pow(pt.t, -2.0 * e.a / nd.n);
      if (inner <= 0.0) return 0.0;
      return std::pow(pt.t, -e.a) * std::pow(inner, 1.0 / (m - 1.0));
    }
    case Expression::Kind::HeatKernel: {
      if (!(pt.t > 0.0)) return kNaN;
      const double r2 = nd.n == 2 ? radius2(pt.x, pt.y, p[1], 0.0) : (pt.x - p[1]) * (pt.x - p[1]);
      return p[0] * std::pow(4.0 * std::numbers::pi * pt.t, -0.5 * nd.n) *
             std::exp(-r2 / (4.0 * pt.t));
    }
    case Expression::Kind::PiecewisePolynomial: {
      const auto& b = nd.breaks;
      if (pt.x < b.front() || pt.x > b.back()) return 0.0;
      std::size_t piece = 0;
      while (piece + 2 < b.size() && pt.x >= b[piece + 1]) ++piece;
      const auto& c = nd.coefficients[piece];
      const double s = pt.x - b[piece];
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
      return v;
    }
    case Expression::Kind::Sum:
      return eval_node(*nd.lhs, pt) + eval_node(*nd.rhs, pt);
    case Expression::Kind::Product:
      return eval_node(*nd.lhs, pt) * eval_node(*nd.rhs, pt);
  }
  return kNaN;
}

std::shared_ptr<const Node> make(Expression::Kind kind, std::vector<double> params, int n = 1) {
  auto nd = std::make_shared<Node>();
  nd->kind = kind;
  nd->p = std::move(params);
  nd->n = n;
  return nd;
}

const char* kind_name(Expression::Kind k) {
  switch (k) {
    case Expression::Kind::Constant: return "constant";
    case Expression::Kind::Affine: return "affine";
    case Expression::Kind::Power: return "power";
    case Expression::Kind::TimePower: return "time_power";
    case Expression::Kind::HeatMode: return "heat_mode";
    case Expression::Kind::Trig: return "trig";
    case Expression::Kind::Gaussian: return "gaussian";
    case Expression::Kind::Barenblatt: return "barenblatt";
    case Expression::Kind::HeatKernel: return "heat_kernel";
    case Expression::Kind::PiecewisePolynomial: return "piecewise_polynomial";
    case Expression::Kind::Sum: return "sum";
    case Expression::Kind::Product: return "product";
  }
  return "unknown";
}

json node_to_json(const Node& nd) {
  json j;
  j["kind"] = kind_name(nd.kind);
  const auto& p = nd.p;
  switch (nd.kind) {
    case Expression::Kind::Constant: j["value"] = p[0]; break;
    case Expression::Kind::Affine:
      j["ax"] = p[0]; j["ay"] = p[1]; j["at"] = p[2]; j["c"] = p[3];
      break;
    case Expression::Kind::Power:
      j["s"] = p[0]; j["coeff"] = p[1]; j["x0"] = p[2]; j["y0"] = p[3];
      break;
    case Expression::Kind::TimePower:
      j["s"] = p[0]; j["coeff"] = p[1]; j["t0"] = p[2];
      break;
    case Expression::Kind::HeatMode:
      j["k"] = static_cast<int>(p[0]); j["amplitude"] = p[1]; j["n"] = nd.n;
      break;
    case Expression::Kind::Trig:
      j["w"] = p[0]; j["amplitude"] = p[1]; j["phase"] = p[2];
      break;
    case Expression::Kind::Gaussian:
      j["width"] = p[0]; j["amplitude"] = p[1]; j["x0"] = p[2]; j["y0"] = p[3];
      break;
    case Expression::Kind::Barenblatt:
      j["m"] = p[0]; j["C"] = p[1]; j["n"] = nd.n;
      break;
    case Expression::Kind::HeatKernel:
      j["mass"] = p[0]; j["x0"] = p[1]; j["n"] = nd.n;
      break;
    case Expression::Kind::PiecewisePolynomial:
      j["breaks"] = nd.breaks; j["coefficients"] = nd.coefficients;
      break;
    case Expression::Kind::Sum:
    case Expression::Kind::Product:
      j["a"] = node_to_json(*nd.lhs);
      j["b"] = node_to_json(*nd.rhs);
      break;
  }
  return j;
}

double get(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
  if (j.contains(key)) {
    if (!j[key].is_number()) {
      throw Error(ErrorKind::ConfigInvalid, std::string("expression field '") + key +
                                                "' must be a number");
    }
    return j[key].get<double>();
  }
  if (fallback) return *fallback;
  throw Error(ErrorKind::ConfigInvalid, std::string("expression is missing '") + key + "'");
}

Expression from_json_value(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorKind::ConfigInvalid, "expression must be an object with a 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  const int n = static_cast<int>(get(j, "n", 1.0));
  if (kind == "constant") return Expression::constant(get(j, "value"));
  if (kind == "affine") {
    return Expression::affine(get(j, "ax", 0.0), get(j, "ay", 0.0), get(j, "at", 0.0),
                              get(j, "c", 0.0));
  }
  if (kind == "power") {
    return Expression::power(get(j, "s"), get(j, "coeff", 1.0), get(j, "x0", 0.0),
                             get(j, "y0", 0.0));
  }
  if (kind == "time_power") {
    return Expression::time_power(get(j, "s"), get(j, "coeff", 1.0), get(j, "t0", 0.0));
  }
  if (kind == "heat_mode") {
    return Expression::heat_mode(static_cast<int>(get(j, "k", 1.0)), get(j, "amplitude", 1.0), n);
  }
  if (kind == "trig") {
    return Expression::trig(get(j, "w"), get(j, "amplitude", 1.0), get(j, "phase", 0.0));
  }
  if (kind == "gaussian") {
    return Expression::gaussian(get(j, "width"), get(j, "amplitude", 1.0), get(j, "x0", 0.0),
                                get(j, "y0", 0.0));
  }
  if (kind == "barenblatt") {
    if (j.contains("mass")) {
      const double m = get(j, "m");
      return Expression::barenblatt(m, n, barenblatt_constant_for_mass(m, n, get(j, "mass")));
    }
    return Expression::barenblatt(get(j, "m"), n, get(j, "C"));
  }
  if (kind == "heat_kernel") {
    return Expression::heat_kernel(get(j, "mass", 1.0), n, get(j, "x0", 0.0));
  }
  if (kind == "piecewise_polynomial") {
    try {
      return Expression::piecewise_polynomial(
          j.at("breaks").get<std::vector<double>>(),
          j.at("coefficients").get<std::vector<std::vector<double>>>());
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ConfigInvalid, std::string("piecewise_polynomial: ") + e.what());
    }
  }
  if (kind == "sum" || kind == "product") {
    if (!j.contains("a") || !j.contains("b")) {
      throw Error(ErrorKind::ConfigInvalid, kind + " needs operands 'a' and 'b'");
    }
    auto a = from_json_value(j["a"]);
    auto b = from_json_value(j["b"]);
    return kind == "sum" ? Expression::sum(std::move(a), std::move(b))
                         : Expression::product(std::move(a), std::move(b));
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown expression kind '" + kind + "'");
}

void require(bool ok, const char* why) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, why);
}

}  // namespace

Expression Expression::constant(double c) { return Expression(make(Kind::Constant, {c})); }

Expression Expression::affine(double ax, double ay, double at, double c) {
  return Expression(make(Kind::Affine, {ax, ay, at, c}));
}

Expression Expression::power(double s, double coeff, double x0, double y0) {
  return Expression(make(Kind::Power, {s, coeff, x0, y0}));
}

Expression Expression::time_power(double s, double coeff, double t0) {
  return Expression(make(Kind::TimePower, {s, coeff, t0}));
}

Expression Expression::heat_mode(int k, double amplitude, int n) {
  require(n == 1 || n == 2, "heat_mode: n must be 1 or 2");
  return Expression(make(Kind::HeatMode, {static_cast<double>(k), amplitude}, n));
}

Expression Expression::trig(double w, double amplitude, double phase) {
  return Expression(make(Kind::Trig, {w, amplitude, phase}));
}

Expression Expression::gaussian(double width, double amplitude, double x0, double y0) {
  require(width > 0.0, "gaussian: width must be positive");
  return Expression(make(Kind::Gaussian, {width, amplitude, x0, y0}));
}

Expression Expression::barenblatt(double m, int n, double constant_c) {
  require(m > 1.0, "barenblatt: m must exceed 1");
  require(n == 1 || n == 2, "barenblatt: n must be 1 or 2");
  require(constant_c > 0.0, "barenblatt: C must be positive");
  return Expression(make(Kind::Barenblatt, {m, constant_c}, n));
}

Expression Expression::heat_kernel(double mass, int n, double x0) {
  require(n == 1 || n == 2, "heat_kernel: n must be 1 or 2");
  return Expression(make(Kind::HeatKernel, {mass, x0}, n));
}

Expression Expression::piecewise_polynomial(std::vector<double> breaks,
                                            std::vector<std::vector<double>> coefficients) {
  require(breaks.size() >= 2, "piecewise_polynomial: need at least two breaks");
  require(coefficients.size() + 1 == breaks.size(),
          "piecewise_polynomial: one coefficient list per piece");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    require(breaks[i] < breaks[i + 1], "piecewise_polynomial: breaks must increase");
  }
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::PiecewisePolynomial;
  nd->breaks = std::move(breaks);
  nd->coefficients = std::move(coefficients);
  return Expression(std::move(nd));
}

Expression Expression::sum(Expression a, Expression b) {
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::Sum;
  nd->lhs = std::move(a.node_);
  nd->rhs = std::move(b.node_);
  return Expression(std::move(nd));
}

Expression Expression::product(Expression a, Expression b) {
  auto nd = std::make_shared<Node>();
  nd->kind = Kind::Product;
  nd->lhs = std::move(a.node_);
  nd->rhs = std::move(b.node_);
  return Expression(std::move(nd));
}

Expression::Kind Expression::kind() const noexcept { return node_->kind; }

double Expression::operator()(const SpaceTimePoint& p) const { return eval_node(*node_, p); }

std::string Expression::to_json() const { return node_to_json(*node_).dump(); }

Expression Expression::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("expression JSON: ") + e.what());
  }
  return from_json_value(j);
}

BarenblattExponents barenblatt_exponents(double m, int n) {
  const double a = n / (n * (m - 1.0) + 2.0);
  return {a, a * (m - 1.0) / (2.0 * m * n)};
}

namespace {

// Mass per unit C^{1/(m-1) + n/2}: b^{-n/2} pi^{n/2} Gamma(k+1) / Gamma(k+1+n/2).
double unit_mass(double m, int n) {
  const double k = 1.0 / (m - 1.0);
  const auto e = barenblatt_exponents(m, n);
  return std::pow(e.b, -0.5 * n) * std::pow(std::numbers::pi, 0.5 * n) *
         std::exp(std::lgamma(k + 1.0) - std::lgamma(k + 1.0 + 0.5 * n));
}

}  // namespace

double barenblatt_constant_for_mass(double m, int n, double mass) {
  require(m > 1.0 && mass > 0.0, "barenblatt: need m > 1 and positive mass");
  const double k = 1.0 / (m - 1.0);
  return std::pow(mass / unit_mass(m, n), 1.0 / (k + 0.5 * n));
}

double barenblatt_mass_for_constant(double m, int n, double constant_c) {
  require(m > 1.0 && constant_c > 0.0, "barenblatt: need m > 1 and positive C");
  const double k = 1.0 / (m - 1.0);
  return unit_mass(m, n) * std::pow(constant_c, k + 0.5 * n);
}

SourceTerm SourceTerm::zero() {
  SourceTerm s;
  s.q_ = s.r_ = std::numeric_limits<double>::infinity();
  return s;
}

SourceTerm SourceTerm::closed_form(Expression expr, double q, double r) {
  SourceTerm s;
  s.form_ = Form::ClosedForm;
  s.expr_ = std::move(expr);
  s.q_ = q;
  s.r_ = r;
  return s;
}

SourceTerm SourceTerm::sampled(SpaceTimeField field, double q, double r) {
  SourceTerm s;
  s.form_ = Form::Sampled;
  s.field_ = std::make_shared<const SpaceTimeField>(std::move(field));
  s.q_ = q;
  s.r_ = r;
  return s;
}

double SourceTerm::eval(const SpaceTimePoint& p) const {
  switch (form_) {
    case Form::Zero: return 0.0;
    case Form::ClosedForm: return (*expr_)(p);
    case Form::Sampled: return field_->eval(p);
  }
  return 0.0;
}

double SourceTerm::eval_node(const GridSpec& grid, const SpaceTimePoint& node) const {
  const double v = eval(node);
  if (std::isfinite(v) || form_ != Form::ClosedForm) return v;
  const double hx = 0.25 * grid.dx();
  double sum = eval({node.x - hx, node.y, node.t}) + eval({node.x + hx, node.y, node.t});
  int count = 2;
  if (grid.dim == 2) {
    const double hy = 0.25 * grid.dy();
    sum += eval({node.x, node.y - hy, node.t}) + eval({node.x, node.y + hy, node.t});
    count += 2;
  }
  const double avg = sum / count;
  if (!std::isfinite(avg)) {
    std::ostringstream os;
    os << "source is singular near (" << node.x << ", " << node.y << ", " << node.t << ")";
    throw Error(ErrorKind::EvaluationFailure, os.str());
  }
  return avg;
}

SpaceTimeField SourceTerm::sample_on(const GridSpec& grid) const {
  std::size_t regularized = 0;
  auto fn = [&](const SpaceTimePoint& p) {
    const double v = eval_node(grid, p);
    if (form_ == Form::ClosedForm && !std::isfinite(eval(p))) ++regularized;
    return v;
  };
  auto field = sample(fn, grid, "source", "source-term");
  field.set_metadata("regularized_nodes", std::to_string(regularized));
  return field;
}

}  // namespace holderlab
