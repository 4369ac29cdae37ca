#include "thorin/levy.hpp"

#include "thorin/errors.hpp"
#include "thorin/quadrature.hpp"
#include "thorin/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thorin::levy {

namespace {

const measure::RadialMeasure& side_of(const LevyView& v, double x) {
  if (x == 0.0 || std::isnan(x)) throw ParameterError("jump density needs x != 0");
  return x > 0.0 ? v.source().tau_plus : v.source().tau_minus;
}

}  // namespace

double canonical_function(const LevyView& v, double x) {
  const auto& tau = side_of(v, x);
  if (tau.empty()) return 0.0;
  const auto r = measure::laplace(tau, std::abs(x));
  if (r.divergent) throw NumericalError("canonical function diverges", r.error);
  return r.value;
}

double levy_density(const LevyView& v, double x) { return canonical_function(v, x) / std::abs(x); }

double levy_tail(const LevyView& v, double x) {
  const auto& tau = side_of(v, x);
  if (tau.empty()) return 0.0;
  const double ax = std::abs(x);
  // int_x^inf e^(-s y)/y dy = E1(s x); atoms take it in closed form, pieces by quadrature
  const auto e1 = [ax](double s) { return specfun::gamma_upper(0.0, s * ax).value; };
  double total = 0.0;
  for (const auto& at : tau.atoms()) total += at.weight * e1(at.location);
  const measure::RadialMeasure rest(std::vector<measure::Atom>{}, tau.pieces(), tau.trains());
  if (!rest.empty()) {
    const auto q = measure::integrate(rest, [&](const measure::Point& p) { return e1(p.s); }, 0.0,
                                      measure::infinity, 1e-10);
    if (!q.converged) throw NumericalError("tail integral did not converge", q.error);
    total += q.value;
  }
  return total;
}

double bm_potential_levy_density(double q, double x) {
  if (!(q > 0.0)) throw ParameterError("potential order q must be positive");
  if (x == 0.0) throw ParameterError("jump density needs x != 0");
  return std::exp(-std::sqrt(2.0 * q) * std::abs(x)) / std::abs(x);
}

double subordinated_levy_density_potential(const measure::RadialMeasure& rho, double b_T, double x) {
  if (!(b_T >= 0.0)) throw ParameterError("subordinator drift must be non-negative");
  if (x == 0.0) throw ParameterError("jump density needs x != 0");
  if (rho.empty()) return 0.0;
  const auto q = measure::integrate(
      rho, [x](const measure::Point& p) { return bm_potential_levy_density(p.s, x); }, 0.0, measure::infinity);
  if (!q.converged) throw NumericalError("potential integral did not converge", q.error);
  return q.value;
}

double bochner_levy_density(const std::function<double(double)>& subordinator_levy, double theta, double sigma,
                            double x) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (x == 0.0) throw ParameterError("jump density needs x != 0");
  const double var = sigma * sigma;
  const auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double d = x - theta * s;
    const double g = std::exp(-d * d / (2.0 * var * s)) / std::sqrt(2.0 * std::numbers::pi * var * s);
    return g == 0.0 ? 0.0 : g * subordinator_levy(s);
  };
  // the Gaussian factor peaks near s = |x|/sqrt(theta^2 + ...); split there and at 1
  const double peak = std::abs(x) / std::max(sigma, std::abs(theta) + 1e-300);
  const double mid = std::max(1.0, peak);
  const auto q = quad::finite(integrand, 0.0, std::min(1.0, mid), 1e-12) +
                 (mid > 1.0 ? quad::finite(integrand, 1.0, mid, 1e-12) : quad::Estimate{}) +
                 quad::half_line(integrand, mid, 1e-12);
  if (!q.converged) throw NumericalError("Bochner integral did not converge", q.error);
  return q.value;
}

std::vector<double> default_cm_starts() {
  std::vector<double> out;
  for (double x = 0.05; x <= 6.0; x *= 1.35) out.push_back(x);
  return out;
}

CmReport complete_monotonicity(const std::function<double(double)>& k, const std::vector<double>& starts,
                               int max_order) {
  if (max_order < 1) throw ParameterError("order must be at least 1");
  CmReport out;
  for (double x0 : starts) {
    if (!(x0 > 0.0)) throw ParameterError("grid must lie in (0, inf)");
    const double h = std::max(0.1, x0 / 4.0);
    CmWitness w;
    for (int j = 0; j <= max_order; ++j) {
      w.grid.push_back(x0 + j * h);
      w.values.push_back(k(w.grid.back()));
    }
    double scale = 0.0;
    for (double v : w.values) scale = std::max(scale, std::abs(v));
    ++out.grids_checked;
    std::vector<double> d = w.values;
    for (int n = 1; n <= max_order; ++n) {
      for (std::size_t j = 0; j + 1 < d.size(); ++j) d[j] = d[j + 1] - d[j];
      d.pop_back();
      const double sign = n % 2 ? -1.0 : 1.0;
      const auto worst = std::min_element(d.begin(), d.end(), [&](double a, double b) { return sign * a < sign * b; });
      if (sign * *worst < -1e-9 * scale * std::ldexp(1.0, n)) {
        w.order = n;
        w.difference = *worst;
        out.passed = false;
        out.witness = std::move(w);
        return out;
      }
    }
  }
  return out;
}

CmReport complete_monotonicity(const LevyView& v, int max_order) {
  const auto starts = default_cm_starts();
  CmReport out;
  for (double sign : {1.0, -1.0}) {
    const auto side = complete_monotonicity([&](double x) { return canonical_function(v, sign * x); }, starts,
                                            max_order);
    out.grids_checked += side.grids_checked;
    if (!side.passed) {
      out.passed = false;
      out.witness = side.witness;
      if (sign < 0) {
        for (double& g : out.witness->grid) g = -g;
      }
      return out;
    }
  }
  return out;
}

}  // namespace thorin::levy
