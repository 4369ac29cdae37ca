#include "thorin/monotone_map.hpp"

#include "thorin/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace thorin::measure {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

MonotoneMap MonotoneMap::hyperbolic(double theta, double sigma) {
  require(std::isfinite(theta) && sigma > 0 && std::isfinite(sigma),
          "hyperbolic map needs finite theta and sigma > 0");
  return {MapKind::hyperbolic, theta, sigma};
}

MonotoneMap MonotoneMap::quadratic(double theta, double sigma) {
  require(std::isfinite(theta) && sigma > 0 && std::isfinite(sigma),
          "quadratic map needs finite theta and sigma > 0");
  return {MapKind::quadratic, theta, sigma};
}

MonotoneMap MonotoneMap::affine(double offset, double slope) {
  require(std::isfinite(offset) && std::isfinite(slope) && slope != 0.0,
          "affine map needs a finite offset and a nonzero slope");
  return {MapKind::affine, offset, slope};
}

MonotoneMap MonotoneMap::reciprocal() { return {MapKind::reciprocal, 0.0, 0.0}; }

MonotoneMap MonotoneMap::inv_one_plus() { return {MapKind::inv_one_plus, 0.0, 0.0}; }

MonotoneMap MonotoneMap::bilateral_root(double beta_plus, double beta_minus) {
  require(beta_plus > 0 && beta_minus > 0 && std::isfinite(beta_plus) && std::isfinite(beta_minus),
          "bilateral root map needs positive finite rates");
  return {MapKind::bilateral_root, beta_plus, beta_minus};
}

double MonotoneMap::operator()(double x) const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic:
      if (std::isinf(x)) return inf;
      return std::sqrt(a * a + 2 * b * b * x) / (b * b);
    case MapKind::quadratic:
      if (std::isinf(x)) return inf;
      // (s^2 y^2 - t^2) / 2 s^2 factored to keep the zero at y = |t|/s^2 exact
      return (b * b * x - std::abs(a)) * (b * b * x + std::abs(a)) / (2 * b * b);
    case MapKind::affine:
      return a + b * x;
    case MapKind::reciprocal:
      return x == 0.0 ? inf : 1.0 / x;
    case MapKind::inv_one_plus:
      return std::isinf(x) ? 0.0 : 1.0 / (1.0 + x);
    case MapKind::bilateral_root:
      // B^2 - 4Px = (a-b)^2 + 4ab(1-x), positive on [0,1]
      return 0.5 * std::sqrt((a - b) * (a - b) + 4 * a * b * (1.0 - x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double MonotoneMap::inverse(double y) const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic:
      return quadratic(a, b)(y);
    case MapKind::quadratic:
      return hyperbolic(a, b)(y);
    case MapKind::affine:
      return (y - a) / b;
    case MapKind::reciprocal:
      return y == 0.0 ? inf : 1.0 / y;
    case MapKind::inv_one_plus:
      return y == 0.0 ? inf : (1.0 - y) / y;
    case MapKind::bilateral_root:
      // 1 - x = (4y^2 - (a-b)^2) / 4ab
      return 1.0 - (2 * y - std::abs(a - b)) * (2 * y + std::abs(a - b)) / (4 * a * b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double MonotoneMap::derivative(double x) const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic:
      return 1.0 / std::sqrt(a * a + 2 * b * b * x);
    case MapKind::quadratic:
      return b * b * x;
    case MapKind::affine:
      return b;
    case MapKind::reciprocal:
      return -1.0 / (x * x);
    case MapKind::inv_one_plus:
      return -1.0 / ((1.0 + x) * (1.0 + x));
    case MapKind::bilateral_root:
      return -a * b / (2.0 * (*this)(x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double MonotoneMap::inverse_jacobian(double y) const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic:
      return b * b * y;
    case MapKind::quadratic:
      return 1.0 / std::sqrt(a * a + 2 * b * b * y);
    case MapKind::affine:
      return 1.0 / std::abs(b);
    case MapKind::reciprocal:
    case MapKind::inv_one_plus:
      return 1.0 / (y * y);
    case MapKind::bilateral_root:
      return 2.0 * y / (a * b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double MonotoneMap::inverse_offset(double y0, double dy) const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic:
      return quadratic(a, b).forward_offset(y0, dy);
    case MapKind::quadratic:
      return hyperbolic(a, b).forward_offset(y0, dy);
    case MapKind::affine:
      return dy / b;
    case MapKind::reciprocal:
    case MapKind::inv_one_plus:
      // both inverses are 1/y up to a constant
      return -dy / (y0 * (y0 + dy));
    case MapKind::bilateral_root:
      return -dy * (2 * y0 + dy) / (a * b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double MonotoneMap::forward_offset(double x0, double dx) const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic: {
      const double a0 = a * a + 2 * b * b * x0;
      const double a1 = a0 + 2 * b * b * dx;
      return 2 * dx / (std::sqrt(std::max(a1, 0.0)) + std::sqrt(std::max(a0, 0.0)));
    }
    case MapKind::quadratic:
      return b * b * dx * (x0 + 0.5 * dx);
    case MapKind::affine:
      return b * dx;
    case MapKind::reciprocal:
      return -dx / (x0 * (x0 + dx));
    case MapKind::inv_one_plus:
      return -dx / ((1.0 + x0) * (1.0 + x0 + dx));
    case MapKind::bilateral_root: {
      const double r0 = (*this)(x0), r1 = (*this)(x0 + dx);
      return -a * b * dx / (r0 + r1);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool MonotoneMap::increasing() const {
  switch (kind_) {
    case MapKind::hyperbolic:
    case MapKind::quadratic:
      return true;
    case MapKind::affine:
      return params_[1] > 0;
    case MapKind::reciprocal:
    case MapKind::inv_one_plus:
    case MapKind::bilateral_root:
      return false;
  }
  return true;
}

Interval MonotoneMap::domain() const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic:
      return {0.0, inf};
    case MapKind::quadratic:
      return {std::abs(a) / (b * b), inf};
    case MapKind::affine:
      return {-inf, inf};
    case MapKind::reciprocal:
    case MapKind::inv_one_plus:
      return {0.0, inf};
    case MapKind::bilateral_root:
      return {0.0, 1.0};
  }
  return {};
}

Interval MonotoneMap::image(const Interval& in) const {
  const double p = (*this)(in.lo), q = (*this)(in.hi);
  return increasing() ? Interval{p, q} : Interval{q, p};
}

bool MonotoneMap::is_inverse_of(const MonotoneMap& other) const {
  switch (kind_) {
    case MapKind::hyperbolic:
      return other.kind_ == MapKind::quadratic && other.params_ == params_;
    case MapKind::quadratic:
      return other.kind_ == MapKind::hyperbolic && other.params_ == params_;
    case MapKind::affine:
      return other.kind_ == MapKind::affine && other.params_[1] * params_[1] == 1.0 &&
             other.params_[0] == -params_[0] / params_[1];
    case MapKind::reciprocal:
      return other.kind_ == MapKind::reciprocal;
    case MapKind::inv_one_plus:
    case MapKind::bilateral_root:
      return false;
  }
  return false;
}

double MonotoneMap::local_order(double x0) const {
  const auto [a, b] = params_;
  switch (kind_) {
    case MapKind::hyperbolic:
      return a * a + 2 * b * b * x0 == 0.0 ? 0.5 : 1.0;
    case MapKind::quadratic:
      return x0 == 0.0 ? 2.0 : 1.0;
    case MapKind::bilateral_root:
      return (*this)(x0) == 0.0 ? 0.5 : 1.0;
    default:
      return 1.0;
  }
}

double MonotoneMap::growth_order() const {
  switch (kind_) {
    case MapKind::hyperbolic:
      return 0.5;
    case MapKind::quadratic:
      return 2.0;
    case MapKind::affine:
      return 1.0;
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

std::string MonotoneMap::name() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case MapKind::hyperbolic:
      out << "hyperbolic(" << params_[0] << ", " << params_[1] << ")";
      break;
    case MapKind::quadratic:
      out << "quadratic(" << params_[0] << ", " << params_[1] << ")";
      break;
    case MapKind::affine:
      out << "affine(" << params_[0] << ", " << params_[1] << ")";
      break;
    case MapKind::reciprocal:
      out << "reciprocal";
      break;
    case MapKind::inv_one_plus:
      out << "inv_one_plus";
      break;
    case MapKind::bilateral_root:
      out << "bilateral_root(" << params_[0] << ", " << params_[1] << ")";
      break;
  }
  return out.str();
}

}  // namespace thorin::measure
