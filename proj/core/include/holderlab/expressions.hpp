#pragma once

// Fixed catalog of closed-form space-time expressions and source terms.
//
// There is no general parser: every experiment names one of the catalog
// entries below (possibly combined through sum/product), and the JSON form
// mirrors the factory functions one to one.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holderlab/fields.hpp"

namespace holderlab {

class Expression {
 public:
  enum class Kind {
    Constant,
    Affine,
    Power,
    TimePower,
    HeatMode,
    Trig,
    Gaussian,
    Barenblatt,
    HeatKernel,
    PiecewisePolynomial,
    Sum,
    Product,
  };

  static Expression constant(double c);
  /// ax x + ay y + at t + c
  static Expression affine(double ax, double ay, double at, double c);
  /// coeff |x - x0|^s (Euclidean distance in two dimensions).
  static Expression power(double s, double coeff = 1.0, double x0 = 0.0, double y0 = 0.0);
  /// coeff |t0 - t|^s
  static Expression time_power(double s, double coeff = 1.0, double t0 = 0.0);
  /// A prod_i sin(k pi x_i) exp(-n k^2 pi^2 t): separable heat solution on [0,1]^n.
  static Expression heat_mode(int k, double amplitude = 1.0, int n = 1);
  /// A cos(w x + phase)
  static Expression trig(double w, double amplitude = 1.0, double phase = 0.0);
  /// A exp(-|x - x0|^2 / (2 width^2))
  static Expression gaussian(double width, double amplitude = 1.0, double x0 = 0.0,
                             double y0 = 0.0);
  /// Barenblatt profile t^{-a} (C - b |x|^2 t^{-2a/n})_+^{1/(m-1)}; undefined for t <= 0.
  static Expression barenblatt(double m, int n, double constant_c);
  /// mass (4 pi t)^{-n/2} exp(-|x - x0|^2/(4t)); undefined for t <= 0.
  static Expression heat_kernel(double mass, int n = 1, double x0 = 0.0);
  /// Piecewise polynomial in x on breaks b_0 < ... < b_P; piece i uses
  /// coefficients[i] (ascending powers of x - b_i). Zero outside [b_0, b_P].
  static Expression piecewise_polynomial(std::vector<double> breaks,
                                         std::vector<std::vector<double>> coefficients);
  static Expression sum(Expression a, Expression b);
  static Expression product(Expression a, Expression b);

  Kind kind() const noexcept;
  double operator()(const SpaceTimePoint& p) const;

  std::string to_json() const;
  /// Throws ConfigInvalid on an unknown entry or missing parameter.
  static Expression from_json(std::string_view text);

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Barenblatt self-similar exponents: a = n/(n(m-1)+2), b = a(m-1)/(2mn).
struct BarenblattExponents {
  double a;
  double b;
};
BarenblattExponents barenblatt_exponents(double m, int n);

/// Constant C of the Barenblatt profile carrying total mass `mass`.
double barenblatt_constant_for_mass(double m, int n, double mass);
double barenblatt_mass_for_constant(double m, int n, double constant_c);

/// Right-hand side f of the equations, carrying its declared integrability.
class SourceTerm {
 public:
  static SourceTerm zero();
  static SourceTerm closed_form(Expression expr, double q, double r);
  static SourceTerm sampled(SpaceTimeField field, double q, double r);

  bool is_zero() const noexcept { return form_ == Form::Zero; }
  double declared_q() const noexcept { return q_; }
  double declared_r() const noexcept { return r_; }
  const std::optional<Expression>& expression() const noexcept { return expr_; }

  double eval(const SpaceTimePoint& p) const;

  /// Value used at a grid node. Closed forms that are singular at the node
  /// (e.g. |x|^{-s} at 0) are replaced by the average over node-avoiding
  /// offsets at a quarter grid spacing.
  double eval_node(const GridSpec& grid, const SpaceTimePoint& node) const;

  /// Samples the source on `grid`; records the number of regularized nodes
  /// in the "regularized_nodes" metadata entry.
  SpaceTimeField sample_on(const GridSpec& grid) const;

 private:
  enum class Form { Zero, ClosedForm, Sampled };
  Form form_ = Form::Zero;
  std::optional<Expression> expr_;
  std::shared_ptr<const SpaceTimeField> field_;
  double q_ = 0.0;
  double r_ = 0.0;
};

}  // namespace holderlab
