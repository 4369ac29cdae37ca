#include "thorin/specfun.hpp"

#include "thorin/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <limits>

namespace thorin::specfun {
namespace {

constexpr double pi = boost::math::constants::pi<double>();
constexpr double eps = std::numeric_limits<double>::epsilon();
const double nan_value = std::numeric_limits<double>::quiet_NaN();

Result domain() { return {nan_value, 0.0, true}; }

template <class F>
Result guarded(F&& f, double ulps = 8.0) {
  try {
    const double v = f();
    if (std::isnan(v)) return domain();
    return {v, ulps * eps * std::abs(v), false};
  } catch (const std::exception&) {
    return domain();
  }
}

}  // namespace

const Thresholds& thresholds() {
  static const Thresholds t{};
  return t;
}

Result gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return domain();
  return guarded([&] { return boost::math::tgamma(x); });
}

Result log_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return domain();
  return guarded([&] { return boost::math::lgamma(x); });
}

Result gamma_lower(double a, double x) {
  if (!(a > 0.0) || x < 0.0) return domain();
  return guarded([&] { return boost::math::tgamma_lower(a, x); });
}

Result gamma_upper(double a, double x) {
  if (a < 0.0 || !(x > 0.0 || (x == 0.0 && a > 0.0))) return domain();
  if (a == 0.0) return guarded([&] { return boost::math::expint(1, x); });
  return guarded([&] { return boost::math::tgamma(a, x); });
}

Result beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return domain();
  return guarded([&] { return boost::math::beta(a, b); });
}

Result digamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return domain();
  return guarded([&] { return boost::math::digamma(x); });
}

Result gamma_family(GammaKind which, double x, double y) {
  switch (which) {
    case GammaKind::gamma: return gamma(x);
    case GammaKind::log_gamma: return log_gamma(x);
    case GammaKind::lower_incomplete: return gamma_lower(x, y);
    case GammaKind::upper_incomplete: return gamma_upper(x, y);
    case GammaKind::beta: return beta(x, y);
    case GammaKind::digamma: return digamma(x);
  }
  return domain();
}

ComplexResult log_gamma(std::complex<double> z) {
  if (!(z.real() > 0.0)) return {{nan_value, nan_value}, 0.0, true};
  // Shift up by recurrence, then Stirling. Each log(z+k) has argument in (-pi/2, pi/2),
  // so the sum stays on the branch continuous from the positive real axis.
  std::complex<double> shift_sum{0.0, 0.0};
  std::complex<double> w = z;
  while (std::abs(w) < thresholds().lgamma_shift) {
    shift_sum += std::log(w);
    w += 1.0;
  }
  static constexpr std::array<double, 8> coeffs = {
      1.0 / 12.0,     -1.0 / 360.0,        1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,   -691.0 / 360360.0,   1.0 / 156.0,  -3617.0 / 122400.0};
  const std::complex<double> inv = 1.0 / w;
  const std::complex<double> inv2 = inv * inv;
  std::complex<double> series{0.0, 0.0};
  std::complex<double> power = inv;
  for (double c : coeffs) {
    series += c * power;
    power *= inv2;
  }
  const std::complex<double> stirling =
      (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * pi) + series;
  const std::complex<double> value = stirling - shift_sum;
  return {value, 16.0 * eps * std::max(1.0, std::abs(value)), false};
}

Result bessel_k(double order, double x) {
  if (!(x > 0.0)) return domain();
  return guarded([&] { return boost::math::cyl_bessel_k(order, x); });
}

Result bessel_i0(double x) {
  return guarded([&] { return boost::math::cyl_bessel_i(0.0, x); });
}

Result bessel_i0_minus_struve_l0(double x) {
  if (x < 0.0) return domain();
  if (x == 0.0) return {1.0, 0.0, false};
  // I0 - L0 = (2/pi) int_0^{pi/2} exp(-x cos t) dt; positive integrand, no cancellation.
  const auto est = quad::finite([x](double t) { return std::exp(-x * std::cos(t)); }, 0.0,
                                0.5 * pi, 1e-14);
  if (!est.converged) return {2.0 / pi * est.value, 2.0 / pi * est.error, false};
  const double v = 2.0 / pi * est.value;
  return {v, std::max(2.0 / pi * est.error, 16.0 * eps * v), false};
}

Result struve_l0(double x) {
  if (x < 0.0) return domain();
  if (x <= thresholds().struve_series_max) {
    // L0(x) = sum_k (x/2)^(2k+1) / Gamma(k+3/2)^2; all terms positive.
    const double h = 0.5 * x;
    double term = 2.0 * x / pi;
    double sum = term;
    for (int k = 0; k < 500; ++k) {
      const double d = k + 1.5;
      term *= h * h / (d * d);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return {sum, 8.0 * eps * sum, false};
  }
  const Result diff = bessel_i0_minus_struve_l0(x);
  const Result i0 = bessel_i0(x);
  return {i0.value - diff.value, i0.est_error + diff.est_error, false};
}

Result bessel_family(BesselKind which, double order, double x) {
  switch (which) {
    case BesselKind::k: return bessel_k(order, x);
    case BesselKind::i0: return bessel_i0(x);
    case BesselKind::struve_l0: return struve_l0(x);
  }
  return domain();
}

Result mittag_leffler(double a, double z) {
  if (!(a > 0.0) || a > 1.0 || std::isnan(z)) return domain();
  if (a == 1.0) return {std::exp(z), 4.0 * eps * std::exp(z), false};
  if (z == 0.0) return {1.0, 0.0, false};
  if (z >= thresholds().mittag_leffler_series_min) {
    const double log_abs = std::log(std::abs(z));
    double sum = 1.0;
    double max_term = 1.0;
    for (int k = 1; k < 20000; ++k) {
      const double mag = std::exp(k * log_abs - boost::math::lgamma(a * k + 1.0));
      const double term = (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
      sum += term;
      max_term = std::max(max_term, mag);
      // Past the peak (Gamma growth dominates) and below resolution.
      if (a * k > 2.0 * std::abs(z) + 2.0 && mag < 1e-18 * std::max(1.0, std::abs(sum))) break;
    }
    return {sum, 16.0 * eps * max_term, false};
  }
  // E_a(-x) = int_0^inf exp(-s r) K_a(r) dr with s = x^(1/a) and the Lamperti kernel K_a.
  const double s = std::pow(-z, 1.0 / a);
  const double sin_ap = std::sin(a * pi);
  const double cos_ap = std::cos(a * pi);
  // Substituting u = s r puts the exponential on unit scale.
  auto integrand = [=](double u) {
    const double r = u / s;
    const double ra = std::pow(r, a);
    return std::exp(-u) * ra / r * sin_ap / pi / (ra * ra + 2.0 * ra * cos_ap + 1.0) / s;
  };
  quad::Estimate est;
  if (s < 700.0) {
    est = quad::finite(integrand, 0.0, s, 1e-14) + quad::half_line(integrand, s, 1e-14);
  } else {
    est = quad::half_line(integrand, 0.0, 1e-14);
  }
  return {est.value, std::max(est.error, 16.0 * eps * est.value), false};
}

Result hermite_function(double a, double z) {
  if (!(a < 0.0) || !(z > 0.0)) return domain();
  const double p = -a - 1.0;
  auto integrand = [=](double x) {
    if (x == 0.0) return p == 0.0 ? 1.0 : (p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return std::exp(-0.5 * x * x - x * z + p * std::log(x));
  };
  const auto est = quad::half_line(integrand, 0.0, 1e-14);
  const double g = boost::math::tgamma(-a);
  const double v = est.value / g;
  return {v, std::max(est.error / g, 16.0 * eps * v), false};
}

}  // namespace thorin::specfun
