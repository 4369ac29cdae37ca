#include "thorin/exponent.hpp"

#include "thorin/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace thorin::exponent {

using measure::infinity;
using measure::Point;
using measure::RadialMeasure;
using measure::Region;

namespace {

constexpr double below_one = 0.99999999999999989;  // nextafter(1, 0)
constexpr double above_one = 1.0000000000000002;   // nextafter(1, inf)

// -1/2 log(1 + x^2) without overflow for huge x.
double neg_half_log1p_sq(double x) {
  const double ax = std::abs(x);
  if (ax > 1.0) return -std::log(ax) - 0.5 * std::log1p(1.0 / (ax * ax));
  return -0.5 * std::log1p(x * x);
}

// atan(x) - x, by series when the subtraction would cancel.
double atan_minus_x(double x) {
  if (std::abs(x) >= 0.1) return std::atan(x) - x;
  const double x2 = x * x;
  double term = -x * x2 / 3.0, sum = 0.0;
  for (int k = 1; k < 12; ++k) {
    sum += term;
    term *= -x2 * (2.0 * k + 1.0) / (2.0 * k + 3.0);
  }
  return sum;
}

// -log(1 - q) - q c for complex q with Re(1 - q) > 0.
cplx neg_log1m(cplx q, bool compensate) {
  if (compensate && std::abs(q) < 0.1) {
    // sum_{k>=2} q^k / k
    cplx power = q * q, sum = 0.0;
    for (int k = 2; k < 18; ++k) {
      sum += power / double(k);
      power *= q;
    }
    return sum;
  }
  const cplx u = -q;
  const cplx log1p_u(0.5 * std::log1p(2.0 * u.real() + std::norm(u)),
                     std::atan2(u.imag(), 1.0 + u.real()));
  return -log1p_u - (compensate ? q : cplx(0.0));
}

// int_[a,b] (-log(1 - i x(s)) - i x(s) c) m(ds) for real x(s).
cplx real_jump_integral(const RadialMeasure& m, const std::function<double(double)>& x_of, bool compensate,
                        double a, double b) {
  if (m.empty()) return 0.0;
  const auto re = measure::integrate(m, [&](const Point& p) { return neg_half_log1p_sq(x_of(p.s)); }, a, b);
  const auto im = measure::integrate(
      m,
      [&](const Point& p) {
        const double x = x_of(p.s);
        return compensate ? atan_minus_x(x) : std::atan(x);
      },
      a, b);
  if (!re.converged || !im.converged)
    throw NumericalError("jump integral did not converge", std::max(re.error, im.error));
  return {re.value, im.value};
}

cplx complex_jump_integral(const RadialMeasure& m, cplx w, bool compensate, double a, double b) {
  if (m.empty()) return 0.0;
  const auto part = [&](bool imag) {
    return measure::integrate(
        m,
        [&, imag](const Point& p) {
          const cplx v = neg_log1m(cplx(0.0, 1.0) * w / p.s, compensate);
          return imag ? v.imag() : v.real();
        },
        a, b);
  };
  const auto re = part(false), im = part(true);
  if (!re.converged || !im.converged)
    throw NumericalError("jump integral did not converge", std::max(re.error, im.error));
  return {re.value, im.value};
}

struct Compensator {
  bool inner;  // h on (0, 1)
  bool outer;  // h on [1, inf)
};

Compensator compensator(Truncation h) {
  switch (h) {
    case Truncation::indicator:
      return {false, true};
    case Truncation::centered:
      return {true, true};
    case Truncation::none:
      return {false, false};
  }
  return {false, false};
}

void require_strip(const RadialMeasure& tau, double im_w) {
  // Re(1 - i w/s) = (s + Im w)/s must stay positive on the support.
  if (im_w >= 0.0 || tau.empty()) return;
  const auto lo = measure::support_inf(tau);
  if (!lo.empty && !(lo.value > -im_w))
    throw PreconditionError("analyticity_strip", "argument leaves the strip of analyticity");
}

// int s^-1 over (0,1) or [1,inf), with a named failure.
double first_moment(const RadialMeasure& tau, Region region, const char* condition) {
  if (tau.empty()) return 0.0;
  const auto mom = measure::moment_integral(tau, 1.0, region);
  if (!mom.finite) throw PreconditionError(condition, "int tau(ds)/s diverges");
  return mom.value;
}

// int ((1 - e^-s) - 1{s >= 1}) / s tau(ds)
double levy_drift_correction(const RadialMeasure& tau) {
  if (tau.empty()) return 0.0;
  const auto inner = measure::integrate(
      tau, [](const Point& p) { return -std::expm1(-p.s) / p.s; }, 0.0, below_one);
  const auto outer =
      measure::integrate(tau, [](const Point& p) { return -std::exp(-p.s) / p.s; }, 1.0, infinity);
  return inner.value + outer.value;
}

// int (-log(1 - v/s) - (v/s) h(s)) tau(ds) for real v <= support_inf(tau).
double real_mgf_side(const RadialMeasure& tau, double v, Compensator c) {
  if (tau.empty() || v == 0.0) return 0.0;
  const auto inf = measure::support_inf(tau);
  if (v > 0.0 && v > inf.value) return infinity;
  // -log((s - v)/s) - (v/s) h with the distance s - v supplied by the caller
  const auto term = [&](double s, double gap, bool comp) {
    const double y = v / s;
    if (comp && std::abs(y) < 0.1) {
      double power = y * y, sum = 0.0;
      for (int k = 2; k < 18; ++k) {
        sum += power / k;
        power *= y;
      }
      return sum;
    }
    if (gap <= 0.0) return infinity;
    const double val = v < 0.0 ? -std::log1p(-y) : -std::log(gap / s);
    return val - (comp ? y : 0.0);
  };
  double total = 0.0;
  for (const auto& at : tau.atoms()) {
    const double s = at.location;
    total += at.weight * term(s, s - v, s < 1.0 ? c.inner : c.outer);
  }
  for (const auto& piece : tau.pieces()) {
    const auto one = RadialMeasure::piece(piece);
    const auto f = [&](bool comp) {
      return [&, comp](const Point& p) { return term(p.s, p.from_lo + (piece.lo - v), comp); };
    };
    const auto lo = measure::integrate(one, f(c.inner), 0.0, below_one);
    const auto hi = measure::integrate(one, f(c.outer), 1.0, infinity);
    total += lo.value + hi.value;
  }
  for (const auto& tr : tau.trains()) {
    total += measure::sum_train(tr, [&](double s) { return term(s, s - v, c.inner); }, 0.0, below_one).value;
    total += measure::sum_train(tr, [&](double s) { return term(s, s - v, c.outer); }, 1.0, infinity).value;
  }
  return std::isnan(total) ? infinity : total;
}

}  // namespace

const char* to_string(Truncation h) {
  switch (h) {
    case Truncation::indicator:
      return "indicator";
    case Truncation::centered:
      return "centered";
    case Truncation::none:
      return "none";
  }
  return "indicator";
}

Truncation truncation_from_string(const std::string& name) {
  if (name == "indicator") return Truncation::indicator;
  if (name == "centered") return Truncation::centered;
  if (name == "none") return Truncation::none;
  throw ParameterError("unknown truncation '" + name + "'");
}

cplx side_integral(const RadialMeasure& tau, cplx w, Truncation h) {
  const Compensator c = compensator(h);
  if (w.imag() == 0.0) {
    const double z = w.real();
    if (z == 0.0) return 0.0;
    const auto x_of = [z](double s) { return z / s; };
    return real_jump_integral(tau, x_of, c.inner, 0.0, below_one) +
           real_jump_integral(tau, x_of, c.outer, 1.0, infinity);
  }
  require_strip(tau, w.imag());
  return complex_jump_integral(tau, w, c.inner, 0.0, below_one) +
         complex_jump_integral(tau, w, c.outer, 1.0, infinity);
}

void validate(const ThorinTriplet& t) {
  if (!std::isfinite(t.drift)) throw PreconditionError("drift", "drift must be finite");
  if (!(t.gaussian_var >= 0.0) || !std::isfinite(t.gaussian_var))
    throw PreconditionError("gaussian_var", "Gaussian variance must be finite and non-negative");
  const auto report = measure::validate_thorin(t.tau_plus, t.tau_minus);
  if (!report.valid) {
    for (const auto& check : report.checks)
      if (!check.passed) throw PreconditionError(check.condition, check.side + ": " + check.detail);
  }
  if (t.truncation == Truncation::centered) {
    first_moment(t.tau_plus, Region::inner, "first_moment");
    first_moment(t.tau_minus, Region::inner, "first_moment");
  } else if (t.truncation == Truncation::none) {
    first_moment(t.tau_plus, Region::outer, "finite_variation");
    first_moment(t.tau_minus, Region::outer, "finite_variation");
  }
}

cplx char_exponent(const ThorinTriplet& t, double z) {
  const cplx iz(0.0, z);
  return iz * t.drift - 0.5 * t.gaussian_var * z * z + side_integral(t.tau_plus, z, t.truncation) +
         side_integral(t.tau_minus, -z, t.truncation);
}

cplx char_exponent_complex(const ThorinTriplet& t, cplx z) {
  const cplx iz = cplx(0.0, 1.0) * z;
  return iz * t.drift - 0.5 * t.gaussian_var * z * z + side_integral(t.tau_plus, z, t.truncation) +
         side_integral(t.tau_minus, -z, t.truncation);
}

double laplace_exponent(const ThorinTriplet& t, double s) {
  if (!t.tau_minus.empty() || t.gaussian_var != 0.0)
    throw PreconditionError("ggc_triplet", "Laplace exponent needs tau- = 0 and no Gaussian part");
  if (!(s >= 0.0)) throw ParameterError("Laplace argument must be non-negative");
  if (s == 0.0) return 0.0;
  const Compensator c = compensator(t.truncation);
  // log1p(y) - y h with y = s/x
  const auto term = [s](double x, bool comp) {
    const double y = s / x;
    if (comp && y < 0.1) {
      double power = y * y, sum = 0.0, sign = -1.0;
      for (int k = 2; k < 18; ++k) {
        sum += sign * power / k;
        power *= y;
        sign = -sign;
      }
      return sum;
    }
    return std::log1p(y) - (comp ? y : 0.0);
  };
  double total = -s * t.drift;
  if (!t.tau_plus.empty()) {
    const auto lo = measure::integrate(t.tau_plus, [&](const Point& p) { return term(p.s, c.inner); }, 0.0,
                                       below_one);
    const auto hi = measure::integrate(t.tau_plus, [&](const Point& p) { return term(p.s, c.outer); }, 1.0,
                                       infinity);
    if (!lo.converged || !hi.converged)
      throw NumericalError("Laplace exponent did not converge", std::max(lo.error, hi.error));
    total -= lo.value + hi.value;
  }
  return total;
}

double mgf_log(const ThorinTriplet& t, double u) {
  const Compensator c = compensator(t.truncation);
  const double plus = real_mgf_side(t.tau_plus, u, c);
  const double minus = real_mgf_side(t.tau_minus, -u, c);
  if (std::isinf(plus) || std::isinf(minus)) return infinity;
  return u * t.drift + 0.5 * t.gaussian_var * u * u + plus + minus;
}

ThorinTriplet convert_truncation(const ThorinTriplet& t, Truncation target) {
  ThorinTriplet out = t;
  out.truncation = target;
  if (target == t.truncation) return out;
  const Compensator from = compensator(t.truncation), to = compensator(target);
  // b2 = b1 - int (h1 - h2)/s tau+ + int (h1 - h2)/s tau-
  const auto shift = [&](const RadialMeasure& tau) {
    double total = 0.0;
    if (from.inner != to.inner)
      total += (double(from.inner) - double(to.inner)) * first_moment(tau, Region::inner, "first_moment");
    if (from.outer != to.outer)
      total +=
          (double(from.outer) - double(to.outer)) * first_moment(tau, Region::outer, "finite_variation");
    return total;
  };
  out.drift = t.drift - shift(t.tau_plus) + shift(t.tau_minus);
  return out;
}

LevyTriplet drift_convert(const ThorinTriplet& t) {
  const ThorinTriplet ind = convert_truncation(t, Truncation::indicator);
  return {ind.drift + levy_drift_correction(ind.tau_plus) - levy_drift_correction(ind.tau_minus),
          ind.gaussian_var};
}

ThorinTriplet from_levy(const LevyTriplet& l, const RadialMeasure& tau_plus, const RadialMeasure& tau_minus) {
  return {l.a - levy_drift_correction(tau_plus) + levy_drift_correction(tau_minus), l.gaussian_var, tau_plus,
          tau_minus, Truncation::indicator};
}

DualRepresentation dual_measure(const ThorinTriplet& t) {
  const auto recip = measure::MonotoneMap::reciprocal();
  for (const auto* tau : {&t.tau_plus, &t.tau_minus})
    if (measure::has_atom_at(*tau, 0.0))
      throw PreconditionError("no_mass_at_zero", "the dual needs tau({0}) = 0");
  return {t.drift, t.gaussian_var, measure::pushforward(t.tau_plus, recip),
          measure::pushforward(t.tau_minus, recip), t.truncation};
}

ThorinTriplet from_dual(const DualRepresentation& d) {
  const auto recip = measure::MonotoneMap::reciprocal();
  return {d.drift, d.gaussian_var, measure::pushforward(d.dual_plus, recip),
          measure::pushforward(d.dual_minus, recip), d.truncation};
}

cplx char_exponent_dual(const DualRepresentation& d, double z) {
  const Compensator c = compensator(d.truncation);
  // h*(y) = h(1/y): the outer flag applies on (0, 1], the inner one on (1, inf)
  const auto side = [&](const RadialMeasure& tau, double w) -> cplx {
    if (w == 0.0) return 0.0;
    const auto x_of = [w](double y) { return w * y; };
    return real_jump_integral(tau, x_of, c.outer, 0.0, 1.0) +
           real_jump_integral(tau, x_of, c.inner, above_one, infinity);
  };
  return cplx(0.0, z) * d.drift - 0.5 * d.gaussian_var * z * z + side(d.dual_plus, z) + side(d.dual_minus, -z);
}

void validate(const PolarThorin& p) {
  const Eigen::Index dim = p.b.size();
  if (dim < 1) throw ParameterError("dimension must be at least 1");
  if (p.sigma.rows() != dim || p.sigma.cols() != dim)
    throw ParameterError("Sigma must be " + std::to_string(dim) + "x" + std::to_string(dim));
  if (!p.sigma.isApprox(p.sigma.transpose(), 1e-12))
    throw PreconditionError("sigma_psd", "Sigma is not symmetric");
  if (dim > 0 && p.sigma.size() > 0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.sigma, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, p.sigma.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
      throw PreconditionError("sigma_psd", "Sigma has a negative eigenvalue");
  }
  for (const auto& d : p.directions) {
    if (d.u.size() != dim) throw ParameterError("direction has the wrong dimension");
    if (std::abs(d.u.norm() - 1.0) > 1e-12) throw PreconditionError("unit_direction", "direction is not a unit vector");
    if (!(d.lambda > 0.0)) throw ParameterError("direction weight must be positive");
    const auto report = measure::validate_thorin(d.radial, {});
    if (!report.valid) throw PreconditionError("thorin_measure", "radial measure of a direction is not Thorin");
  }
}

cplx char_exponent_multi(const PolarThorin& p, const Eigen::VectorXd& z) {
  if (z.size() != p.b.size()) throw ParameterError("argument has the wrong dimension");
  cplx out(-0.5 * z.dot(p.sigma * z), z.dot(p.b));
  for (const auto& d : p.directions) out += d.lambda * side_integral(d.radial, z.dot(d.u), p.truncation);
  return out;
}

}  // namespace thorin::exponent
