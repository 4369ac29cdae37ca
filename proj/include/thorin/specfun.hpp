#pragma once

#include <complex>

namespace thorin::specfun {

struct Result {
  double value = 0.0;
  double est_error = 0.0;
  bool domain_error = false;
};

struct ComplexResult {
  std::complex<double> value;
  double est_error = 0.0;
  bool domain_error = false;
};

// Algorithm switch points, all in one place so the oracle tests can probe both sides.
struct Thresholds {
  double lgamma_shift = 15.0;          // Stirling series used once |z| reaches this
  double struve_series_max = 16.0;     // power series for L0 below, integral form above
  double mittag_leffler_series_min = -1.0;  // series for z >= this, Laplace integral below
  double small_argument = 1e-2;        // switch to Taylor forms of log1p/atan differences
};

const Thresholds& thresholds();

enum class GammaKind { gamma, log_gamma, lower_incomplete, upper_incomplete, beta, digamma };

// Dispatcher over the real gamma family; `y` is the second argument where one exists
// (incomplete gammas take (a, x), beta takes (a, b)).
Result gamma_family(GammaKind which, double x, double y = 0.0);

Result gamma(double x);
Result log_gamma(double x);
Result gamma_lower(double a, double x);
// Accepts a == 0, where it is the exponential integral E1(x).
Result gamma_upper(double a, double x);
Result beta(double a, double b);
Result digamma(double x);

// Principal-branch log Gamma for Re z > 0, continuous in z.
ComplexResult log_gamma(std::complex<double> z);

enum class BesselKind { k, i0, struve_l0 };
Result bessel_family(BesselKind which, double order, double x);

Result bessel_k(double order, double x);
Result bessel_i0(double x);
Result struve_l0(double x);
// I0(x) - L0(x) without cancellation; decays like 2/(pi x).
Result bessel_i0_minus_struve_l0(double x);

// E_a(z) = sum_k z^k / Gamma(a k + 1), a in (0, 1].
Result mittag_leffler(double a, double z);

// H_a(z) = (1/Gamma(-a)) int_0^inf exp(-x^2/2 - x z) x^(-a-1) dx, a < 0.
Result hermite_function(double a, double z);

}  // namespace thorin::specfun
