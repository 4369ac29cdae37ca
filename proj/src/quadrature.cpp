#include "thorin/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace thorin::quad {
namespace {

namespace bq = boost::math::quadrature;

// Abscissa tables are expensive to build; one per thread keeps calls reentrant.
bq::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local bq::tanh_sinh<double> rule(15);
  return rule;
}

bq::exp_sinh<double>& exp_sinh_rule() {
  thread_local bq::exp_sinh<double> rule(9);
  return rule;
}

bool acceptable(double error, double l1, double tol) {
  return std::isfinite(error) && error <= std::max(100.0 * tol, 1e-10) * l1 + absolute_floor;
}

Estimate finite_once(const Function& f, double a, double b, double tol) {
  Estimate out;
  double l1 = 0.0;
  try {
    out.value = tanh_sinh_rule().integrate(f, a, b, tol, &out.error, &l1);
  } catch (const std::exception&) {
    out.converged = false;
    out.error = std::numeric_limits<double>::infinity();
    return out;
  }
  out.converged = std::isfinite(out.value) && acceptable(out.error, l1, tol);
  return out;
}

Estimate finite_split(const Function& f, double a, double b, double tol, int depth) {
  Estimate whole = finite_once(f, a, b, tol);
  if (whole.converged || depth == 0) return whole;
  const double mid = a + 0.5 * (b - a);
  Estimate split = finite_split(f, a, mid, tol, depth - 1) + finite_split(f, mid, b, tol, depth - 1);
  return split.converged || !std::isfinite(whole.value) ? split : whole;
}

}  // namespace

Estimate operator+(const Estimate& x, const Estimate& y) {
  return {x.value + y.value, x.error + y.error, x.converged && y.converged};
}

Estimate finite(const Function& f, double a, double b, double tol) {
  if (!(b > a)) return {};
  return finite_split(f, a, b, tol, 3);
}

Estimate half_line(const Function& f, double a, double tol) {
  Estimate out;
  double l1 = 0.0;
  try {
    out.value = exp_sinh_rule().integrate(f, a, std::numeric_limits<double>::infinity(), tol,
                                          &out.error, &l1);
    out.converged = std::isfinite(out.value) && acceptable(out.error, l1, tol);
  } catch (const std::exception&) {
    out.converged = false;
  }
  if (out.converged) return out;
  // Fallback: resolve the neighbourhood of a separately, then the tail.
  const double step = std::max(1.0, std::abs(a));
  Estimate head = finite(f, a, a + step, tol);
  Estimate tail;
  double tail_l1 = 0.0;
  try {
    tail.value = exp_sinh_rule().integrate(f, a + step, std::numeric_limits<double>::infinity(),
                                           tol, &tail.error, &tail_l1);
    tail.converged = std::isfinite(tail.value) && acceptable(tail.error, tail_l1, tol);
  } catch (const std::exception&) {
    tail.converged = false;
    tail.error = std::numeric_limits<double>::infinity();
  }
  return head + tail;
}

Estimate integrate(const Function& f, double a, double b, double tol) {
  if (std::isinf(b)) return half_line(f, a, tol);
  return finite(f, a, b, tol);
}

}  // namespace thorin::quad
