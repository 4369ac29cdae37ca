#include "thorin/subordinate.hpp"

#include "thorin/errors.hpp"
#include "thorin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace thorin::subordinate {

using measure::Atom;
using measure::infinity;
using measure::MonotoneMap;
using measure::Point;
using measure::RadialMeasure;
using measure::Region;

namespace {

double before(double x) { return std::nextafter(x, -infinity); }

RadialMeasure non_atomic(const RadialMeasure& m) {
  return RadialMeasure(std::vector<Atom>{}, m.pieces(), m.trains());
}

std::vector<Atom> sorted_atoms(const RadialMeasure& m) {
  auto atoms = m.atoms();
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  return atoms;
}

bool same_atoms(const RadialMeasure& a, const RadialMeasure& b) {
  const auto x = sorted_atoms(a), y = sorted_atoms(b);
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i].location - y[i].location) > measure::default_atom_tolerance(x[i].location)) return false;
    if (std::abs(x[i].weight - y[i].weight) > 1e-12 * std::max(1.0, std::abs(x[i].weight))) return false;
  }
  return true;
}

// m + w delta_at, folding into an existing atom at the same place.
RadialMeasure add_atom(const RadialMeasure& m, double at, double w) {
  if (w <= 0.0) return m;
  auto atoms = m.atoms();
  for (auto& a : atoms) {
    if (std::abs(a.location - at) <= measure::default_atom_tolerance(at)) {
      a.weight += w;
      a.origin = nullptr;
      return RadialMeasure(atoms, m.pieces(), m.trains());
    }
  }
  atoms.push_back(Atom{at, w, nullptr});
  return RadialMeasure(atoms, m.pieces(), m.trains());
}

double outer_first_moment(const RadialMeasure& m) {
  if (m.empty()) return 0.0;
  const auto r = measure::moment_integral(m, 1.0, Region::outer);
  if (!r.finite) throw NumericalError("int_1^inf tau(ds)/s diverges", r.error);
  return r.value;
}

void require_valid(const LgnbcQuadruplet& q, double alpha) {
  const auto report = lgnbc_validate(q);
  if (!report.valid) {
    std::string all;
    for (const auto& s : report.issues) all += (all.empty() ? "" : "; ") + s;
    throw PreconditionError("lgnbc_quadruplet", all);
  }
  if (!(alpha > 0.0)) throw ParameterError("gamma shape alpha must be positive");
  if (std::abs(q.alpha_scale * alpha - 1.0) > 1e-12)
    throw PreconditionError("lattice_scale", "the lattice scale of the subordinator must be 1/alpha");
  if (q.a_poisson != 0.0) throw PreconditionError("no_poisson_part", "the Poisson rate a must be 0");
}

// (pi[0,1], c alpha - pi[0,1])
std::pair<double, double> masses(const LgnbcQuadruplet& q, double alpha) {
  const double mass = measure::total_mass(q.pi).value;
  if (!(mass > 0.0)) throw PreconditionError("positive_mass", "pi([0,1]) must be positive");
  const double residual = q.c * alpha - mass;
  if (residual < -1e-12 * mass)
    throw PreconditionError("residual_weight", "c alpha must be at least pi([0,1])");
  return {mass, std::max(0.0, residual)};
}

}  // namespace

void validate(const BrownianParent& x) {
  if (!(x.sigma > 0.0) || !std::isfinite(x.sigma)) throw ParameterError("Brownian sigma must be positive");
  if (!std::isfinite(x.theta)) throw ParameterError("Brownian drift must be finite");
}

void validate(const GgcSubordinator& t) {
  if (!(t.a >= 0.0)) throw ParameterError("subordinator drift must be non-negative");
  const auto report = measure::validate_thorin(t.rho, {});
  for (const auto& c : report.checks)
    if (!c.passed) throw PreconditionError(c.condition, "subordinator: " + c.detail);
  if (!t.rho.empty() && !measure::moment_integral(t.rho, 1.0, Region::outer).finite)
    throw PreconditionError("finite_variation", "int_1^inf rho(dt)/t diverges, not a subordinator");
  if (measure::support_inf(t.rho).value < 0.0)
    throw PreconditionError("radial_support", "rho must live on [0, inf)");
}

exponent::ThorinTriplet as_triplet(const GgcSubordinator& t) {
  return {t.a + outer_first_moment(t.rho), 0.0, t.rho, {}, exponent::Truncation::indicator};
}

double forward_drift(const GgcSubordinator& t, const BrownianParent& x) {
  const double theta = x.theta, var = x.sigma * x.sigma;
  if (theta == 0.0) return 0.0;
  const double at = std::abs(theta);
  const double upper = 0.5 * var + at;
  // theta int_{t >= var/2 + |theta|} rho/t - sgn(theta) int_[var/2 - |theta|, var/2 + |theta|) rho/f^(-sgn theta)
  const auto far = measure::integrate(t.rho, [](const Point& p) { return 1.0 / p.s; }, upper, infinity);
  const double lower = std::max(0.0, 0.5 * var - at);
  const auto mid = measure::integrate(
      t.rho, [&](const Point& p) { return var / (at + std::sqrt(theta * theta + 2.0 * var * p.s)); }, lower,
      before(upper));
  if (!far.converged || !mid.converged)
    throw NumericalError("forward drift integral did not converge", std::max(far.error, mid.error));
  return t.a * theta + theta * far.value - std::copysign(1.0, theta) * mid.value;
}

exponent::ThorinTriplet brownian_forward(const GgcSubordinator& t, const BrownianParent& x) {
  validate(t);
  validate(x);
  const double var = x.sigma * x.sigma;
  const auto image = measure::pushforward(t.rho, MonotoneMap::hyperbolic(x.theta, x.sigma));
  const double c = x.theta / var;
  exponent::ThorinTriplet out;
  out.tau_plus = measure::shift(image, c);
  out.tau_minus = measure::shift(image, -c);
  out.gaussian_var = t.a * var;
  out.drift = forward_drift(t, x);
  out.truncation = exponent::Truncation::indicator;
  return out;
}

bool shift_symmetric(const RadialMeasure& tau_plus, const RadialMeasure& tau_minus, double theta) {
  const auto a = measure::shift(tau_plus, -theta, false), b = measure::shift(tau_minus, theta, false);
  if (measure::identical(a, b)) return true;
  if (!same_atoms(a, b)) return false;
  const auto pa = non_atomic(tau_plus), pb = non_atomic(tau_minus);
  if (measure::identical(non_atomic(a), non_atomic(b))) return true;
  if (pa.empty() != pb.empty()) return false;
  // L(tau+^-theta)(r) = e^(-r theta) L(tau+)(r), L(tau-^theta)(r) = e^(r theta) L(tau-)(r)
  for (int i = 0; i < 20; ++i) {
    const double r = 0.1 * std::pow(100.0, i / 19.0);
    const auto la = measure::laplace(pa, r), lb = measure::laplace(pb, r);
    if (la.divergent || lb.divergent) return false;
    const double va = std::exp(-r * theta) * la.value, vb = std::exp(r * theta) * lb.value;
    if (std::abs(va - vb) > 1e-9 * std::max(std::abs(va), std::abs(vb))) return false;
  }
  return true;
}

GgcSubordinator brownian_inverse(const exponent::ThorinTriplet& t, double theta) {
  if (!std::isfinite(theta)) throw ParameterError("theta must be finite");
  if (t.gaussian_var != 0.0)
    throw PreconditionError("no_gaussian_part", "the Gaussian variance must be 0 for the inverse transform");
  if (!shift_symmetric(t.tau_plus, t.tau_minus, theta)) {
    std::ostringstream msg;
    msg << "tau+^(-theta) != tau-^(theta): not Brownian-representable for theta = " << theta;
    throw PreconditionError("shift_symmetry", msg.str());
  }
  if (t.tau_plus.empty()) return {};
  const double start = measure::support_inf(t.tau_plus).value + theta;
  if (start < std::abs(theta) - measure::default_atom_tolerance(theta)) {
    std::ostringstream msg;
    msg << "the shifted Thorin measure starts at " << start << " < |theta| = " << std::abs(theta)
        << "; a drifted Brownian representation needs the moment generating function at theta";
    throw PreconditionError("support_condition", msg.str());
  }
  const auto centred = measure::shift(t.tau_plus, -theta);
  return {0.0, measure::pushforward(centred, MonotoneMap::quadratic(theta, 1.0))};
}

double subordinated_levy_density_ig(const GgcSubordinator& t, const BrownianParent& x, double z) {
  validate(x);
  if (z == 0.0) throw ParameterError("jump density needs x != 0");
  const double var = x.sigma * x.sigma, az = std::abs(z);
  if (t.rho.empty()) return 0.0;
  if (x.theta == 0.0) {
    const auto k = measure::integrate(
        t.rho, [&](const Point& p) { return std::exp(-az * std::sqrt(2.0 * var * p.s) / var); }, 0.0, infinity);
    if (!k.converged) throw NumericalError("canonical function integral did not converge", k.error);
    return k.value / az;
  }
  // Z ~ IG(a, b) with a = |x/theta|, b = (x/sigma)^2
  const double a = std::abs(z / x.theta), b = z * z / var;
  const auto density = [&](double s) {
    if (s <= 0.0) return 0.0;
    // log form: s^-3/2 overflows where the exponential already vanishes
    return std::exp(0.5 * std::log(b / (2.0 * std::numbers::pi)) - 1.5 * std::log(s) -
                    b * (s - a) * (s - a) / (2.0 * a * a * s));
  };
  const auto integrand = [&](double s) {
    const double h = density(s);
    if (h < 1e-300) return 0.0;
    const auto k = measure::laplace(t.rho, s);
    if (k.divergent) throw NumericalError("canonical function of the subordinator diverges", k.error);
    return h * k.value;
  };
  const double r = 1.5 * a / b;
  const double mode = a * (std::sqrt(1.0 + r * r) - r);
  const auto e = quad::finite(integrand, 0.0, mode, 1e-11) + quad::half_line(integrand, mode, 1e-11);
  if (!e.converged) throw NumericalError("inverse Gaussian mixture did not converge", e.error);
  const double factor = (z > 0.0) == (x.theta > 0.0) ? 1.0 : std::exp(2.0 * z * x.theta / var);
  return factor * e.value / az;
}

double subordinator_canonical_from_symmetric(const RadialMeasure& tau_plus, double theta, double x) {
  if (!(x > 0.0)) throw ParameterError("subordinator canonical function needs x > 0");
  const auto k = measure::integrate(
      tau_plus, [&](const Point& p) { return std::exp(-x * p.s * (0.5 * p.s + theta)); }, 0.0, infinity);
  if (!k.converged) throw NumericalError("canonical function integral did not converge", k.error);
  return k.value;
}

LgnbcReport lgnbc_validate(const LgnbcQuadruplet& q) {
  LgnbcReport r;
  const auto issue = [&](std::string s) {
    r.valid = false;
    r.issues.push_back(std::move(s));
  };
  if (!(q.c >= 0.0)) issue("c must be non-negative");
  if (!(q.alpha_scale > 0.0)) issue("alpha_scale must be positive");
  if (!(q.a_poisson >= 0.0)) issue("a must be non-negative");
  if (q.pi.empty()) return r;
  if (measure::support_inf(q.pi).value < 0.0 || measure::support_sup(q.pi).value > 1.0) {
    issue("pi has mass outside [0,1]");
    return r;
  }
  const auto low = measure::integrate(q.pi, [](const Point& p) { return p.s; }, 0.0, 0.5);
  if (!low.converged || !std::isfinite(low.value)) issue("int_0^1/2 q pi(dq) is not finite");
  if (measure::has_atom_at(q.pi, 1.0)) {
    issue("pi has an atom at 1, so int |log(1-q)| pi(dq) diverges");
  } else {
    const auto high =
        measure::integrate(q.pi, [](const Point& p) { return -std::log(p.to_end); }, std::nextafter(0.5, 1.0), 1.0);
    if (!high.converged || !std::isfinite(high.value)) issue("int_1/2^1 |log(1-q)| pi(dq) is not finite");
  }
  return r;
}

double lgnbc_pgf(const LgnbcQuadruplet& q, double z) {
  if (!(z > 0.0 && z < 1.0)) throw ParameterError("p.g.f. argument must lie in (0,1)");
  const auto report = lgnbc_validate(q);
  if (!report.valid) throw PreconditionError("lgnbc_quadruplet", report.issues.front());
  const double za = std::pow(z, q.alpha_scale);
  double log_phi = q.c * std::log(z) + q.a_poisson * (za - 1.0);
  if (!q.pi.empty()) {
    const auto integral = measure::integrate(
        q.pi, [&](const Point& p) { return std::log(p.to_end) - std::log1p(-p.s * za); }, 0.0, 1.0);
    if (!integral.converged) throw NumericalError("p.g.f. integral did not converge", integral.error);
    log_phi += integral.value;
  }
  return std::exp(log_phi);
}

LgnbcQuadruplet lgnbc_from_ggc(const RadialMeasure& tau, double c, double alpha_scale, double a_poisson) {
  return {c, alpha_scale, a_poisson, measure::pushforward(tau, MonotoneMap::inv_one_plus())};
}

LgnbcImage lgnbc_sub_gamma(const LgnbcQuadruplet& q, double alpha, double beta) {
  require_valid(q, alpha);
  if (!(beta > 0.0)) throw ParameterError("gamma rate beta must be positive");
  const auto [mass, residual] = masses(q, alpha);
  LgnbcImage out;
  out.pushed_plus = measure::pushforward(q.pi, MonotoneMap::reflect(beta));
  out.residual_weight = residual;
  out.triplet.tau_plus = add_atom(out.pushed_plus, beta, residual);
  out.triplet.drift = outer_first_moment(out.triplet.tau_plus);
  out.triplet.truncation = exponent::Truncation::indicator;
  return out;
}

LgnbcImage lgnbc_sub_bilateral(const LgnbcQuadruplet& q, double alpha, double beta_plus, double beta_minus) {
  require_valid(q, alpha);
  if (!(beta_plus > 0.0) || !(beta_minus > 0.0)) throw ParameterError("bilateral gamma rates must be positive");
  const auto [mass, residual] = masses(q, alpha);
  const auto image = measure::pushforward(q.pi, MonotoneMap::bilateral_root(beta_plus, beta_minus));
  const double beta0 = 0.5 * (beta_minus - beta_plus);
  LgnbcImage out;
  out.pushed_plus = measure::shift(image, beta0);
  out.pushed_minus = measure::shift(image, -beta0);
  out.residual_weight = residual;
  out.triplet.tau_plus = add_atom(out.pushed_plus, beta_plus, residual);
  out.triplet.tau_minus = add_atom(out.pushed_minus, beta_minus, residual);
  for (const auto& [tau, cap] : {std::pair{&out.triplet.tau_plus, beta_plus}, {&out.triplet.tau_minus, beta_minus}}) {
    if (measure::support_sup(*tau).value > cap + measure::default_atom_tolerance(cap))
      throw NumericalError("LGNBC image leaves [-beta-, beta+]", measure::support_sup(*tau).value - cap);
  }
  out.triplet.drift = outer_first_moment(out.triplet.tau_plus) - outer_first_moment(out.triplet.tau_minus);
  out.triplet.truncation = exponent::Truncation::indicator;
  return out;
}

}  // namespace thorin::subordinate
