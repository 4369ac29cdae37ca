#pragma once

#include <array>
#include <string>

namespace thorin::measure {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;  // may be +inf
  bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class MapKind { hyperbolic, quadratic, affine, reciprocal, inv_one_plus, bilateral_root };

// Strictly monotone scalar maps with closed-form inverse and derivative.
//
//   hyperbolic(theta, sigma)    x -> sqrt(theta^2 + 2 sigma^2 x) / sigma^2      on [0, inf)
//   quadratic(theta, sigma)     y -> (sigma^4 y^2 - theta^2) / (2 sigma^2)      on [|theta|/sigma^2, inf)
//   affine(c, m)                x -> c + m x
//   reciprocal                  x -> 1 / x                                      on (0, inf]
//   inv_one_plus                x -> 1 / (1 + x)                                on [0, inf]
//   bilateral_root(b+, b-)      x -> sqrt((b+ + b-)^2 - 4 b+ b- x) / 2          on [0, 1]
//
// quadratic(theta, sigma) is the exact inverse of hyperbolic(theta, sigma).
class MonotoneMap {
 public:
  static MonotoneMap hyperbolic(double theta, double sigma);
  static MonotoneMap quadratic(double theta, double sigma);
  static MonotoneMap affine(double offset, double slope);
  // s -> s - theta, the left translation.
  static MonotoneMap shift(double theta) { return affine(-theta, 1.0); }
  // x -> beta (1 - x)
  static MonotoneMap reflect(double beta) { return affine(beta, -beta); }
  static MonotoneMap reciprocal();
  static MonotoneMap inv_one_plus();
  static MonotoneMap bilateral_root(double beta_plus, double beta_minus);

  MapKind kind() const { return kind_; }
  const std::array<double, 2>& params() const { return params_; }

  double operator()(double x) const;
  double inverse(double y) const;
  double derivative(double x) const;
  // |d inverse / dy|
  double inverse_jacobian(double y) const;
  // phi(x0 + dx) - phi(x0) without cancellation.
  double forward_offset(double x0, double dx) const;
  // inverse(y0 + dy) - inverse(y0) without cancellation.
  double inverse_offset(double y0, double dy) const;

  bool increasing() const;
  Interval domain() const;
  Interval image(const Interval& in) const;

  bool is_inverse_of(const MonotoneMap& other) const;
  bool operator==(const MonotoneMap& other) const = default;

  // phi(x) - phi(x0) ~ (x - x0)^order near a finite point of the domain.
  double local_order(double x0) const;
  // phi(x) ~ x^growth as x -> inf; only meaningful when phi(inf) = inf.
  double growth_order() const;

  std::string name() const;

 private:
  MonotoneMap(MapKind kind, double a, double b) : kind_(kind), params_{a, b} {}
  MapKind kind_;
  std::array<double, 2> params_;
};

}  // namespace thorin::measure
