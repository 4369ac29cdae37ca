#include <doctest.h>

#include "thorin/errors.hpp"
#include "thorin/exponent.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace thorin::exponent;
using thorin::measure::DensityPiece;
using thorin::measure::infinity;
using thorin::measure::LogPower;
using thorin::measure::PowerExp;
using thorin::measure::RadialMeasure;
using std::numbers::pi;

namespace {

double cdist(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

RadialMeasure atom(double at, double w) { return RadialMeasure::atom(at, w); }

// lambda I^alpha delta_theta: density lambda (s - theta)^(alpha-1)/Gamma(alpha) on (theta, inf)
RadialMeasure cts_tau(double lambda, double theta, double alpha) {
  return RadialMeasure::piece(
      DensityPiece{theta, infinity, lambda / std::tgamma(alpha), PowerExp{alpha - 1.0, 0.0}, nullptr});
}

cplx cts_closed_form(double lambda, double theta, double alpha, double z) {
  const cplx iz(0.0, z);
  return lambda * std::tgamma(-alpha) *
         (std::pow(theta - iz, alpha) - std::pow(theta, alpha) + iz * alpha * std::pow(theta, alpha - 1.0));
}

ThorinTriplet triplet(double b, double var, RadialMeasure plus, RadialMeasure minus, Truncation h) {
  return ThorinTriplet{b, var, std::move(plus), std::move(minus), h};
}

// Levy-Khintchine with jump density nu(x) = lambda exp(-theta|x|)/|x| per side, evaluated with
// a separate quadrature library in x.
cplx levy_khintchine_gamma(double a, double lp, double tp, double lm, double tm, double z) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const auto side = [&](double lambda, double theta, double sign) {
    const double w = sign * z;
    const auto re = [&](double x) { return (std::cos(w * x) - 1.0) * lambda * std::exp(-theta * x) / x; };
    const auto im_inner = [&](double x) {
      return (std::sin(w * x) - w * x) * lambda * std::exp(-theta * x) / x;
    };
    const auto im_outer = [&](double x) { return std::sin(w * x) * lambda * std::exp(-theta * x) / x; };
    const double r = ts.integrate(re, 0.0, 1.0) + es.integrate(re, 1.0, infinity);
    const double i = ts.integrate(im_inner, 0.0, 1.0) + es.integrate(im_outer, 1.0, infinity);
    return cplx(r, i);
  };
  return cplx(0.0, a * z) + side(lp, tp, 1.0) + side(lm, tm, -1.0);
}

}  // namespace

TEST_CASE("gamma characteristic exponent") {
  const auto t = triplet(0.0, 0.0, atom(1.0, 1.0), {}, Truncation::none);
  const cplx expected(-0.5 * std::log(2.0), pi / 4);
  CHECK(cdist(char_exponent(t, 1.0), expected) < 1e-13);
  // centered form carries the mean lambda/theta as drift
  const auto c = triplet(1.0, 0.0, atom(1.0, 1.0), {}, Truncation::centered);
  CHECK(cdist(char_exponent(c, 1.0), expected) < 1e-13);
  const auto g = triplet(0.0, 0.0, atom(2.5, 3.0), {}, Truncation::none);
  for (double z : {0.1, 1.0, 7.0, 300.0}) {
    const cplx want = -3.0 * std::log(cplx(1.0, -z / 2.5));
    CHECK(cdist(char_exponent(g, z), want) < 1e-13);
  }
}

TEST_CASE("gaussian and drift parts") {
  const auto t = triplet(0.3, 2.0, {}, {}, Truncation::indicator);
  for (double z : {-2.0, 0.5, 4.0}) CHECK(cdist(char_exponent(t, z), cplx(-z * z, 0.3 * z)) < 1e-15);
}

TEST_CASE("tempered stable exponent against its closed form") {
  for (double alpha : {0.3, 0.5, 0.8, 1.5}) {
    const auto t = triplet(0.0, 0.0, cts_tau(1.0, 1.0, alpha), {}, Truncation::centered);
    for (double z : {0.5, 1.0, 2.0, 5.0}) {
      CAPTURE(alpha);
      CAPTURE(z);
      CHECK(cdist(char_exponent(t, z), cts_closed_form(1.0, 1.0, alpha, z)) < 1e-8);
    }
  }
}

TEST_CASE("bilateral gamma against Levy-Khintchine in the jump variable") {
  const auto t = triplet(0.2, 0.0, atom(1.5, 0.7), atom(0.8, 1.3), Truncation::indicator);
  const LevyTriplet lt = drift_convert(t);
  for (double z : {0.3, 1.0, 4.0}) {
    CAPTURE(z);
    CHECK(cdist(char_exponent(t, z), levy_khintchine_gamma(lt.a, 0.7, 1.5, 1.3, 0.8, z)) < 1e-9);
  }
}

TEST_CASE("psi(0) = 0 and hermitian symmetry") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = triplet(U(rng) - 1.5, U(rng), atom(U(rng), U(rng)) + cts_tau(U(rng), U(rng), 0.5),
                           atom(U(rng), U(rng)), Truncation::indicator);
    CHECK(std::abs(char_exponent(t, 0.0)) == 0.0);
    for (double z : {0.4, 2.0, 11.0}) {
      const cplx p = char_exponent(t, z), m = char_exponent(t, -z);
      CHECK(cdist(m, std::conj(p)) < 1e-12);
      CHECK(p.real() <= 1e-14);  // |exp psi| <= 1
    }
  }
}

TEST_CASE("laplace exponent on the real path equals psi(is)") {
  const auto gamma = triplet(0.0, 0.0, atom(1.0, 1.0), {}, Truncation::none);
  CHECK(std::abs(laplace_exponent(gamma, 1.0) - std::log(0.5)) < 1e-15);
  CHECK(laplace_exponent(gamma, 0.0) == 0.0);

  // alpha = 1 tempered stable subordinator: lambda((theta + s) log(1 + s/theta) - s) with sign -
  const double lambda = 1.3, theta = 0.9;
  const auto cts1 = triplet(0.0, 0.0, cts_tau(lambda, theta, 1.0), {}, Truncation::centered);
  for (double s : {0.1, 1.0, 3.0, 10.0}) {
    const double want = lambda * ((theta + s) * std::log1p(s / theta) - s);
    CHECK(std::abs(laplace_exponent(cts1, s) - want) < 1e-10 * std::max(1.0, std::abs(want)));
  }

  const auto mixed = triplet(0.4, 0.0, atom(0.5, 2.0) + cts_tau(0.7, 1.2, 0.4), {}, Truncation::indicator);
  for (double s = 0.25; s <= 10.0; s += 0.25) {
    const cplx via_complex = char_exponent_complex(mixed, cplx(0.0, s));
    CHECK(std::abs(via_complex.imag()) < 1e-12);
    CHECK(std::abs(laplace_exponent(mixed, s) - via_complex.real()) < 1e-10);
  }
  CHECK_THROWS_AS(laplace_exponent(triplet(0.0, 1.0, atom(1.0, 1.0), {}, Truncation::none), 1.0),
                  thorin::PreconditionError);
}

TEST_CASE("complex argument leaving the strip is refused") {
  const auto t = triplet(0.0, 0.0, atom(1.0, 1.0), {}, Truncation::none);
  // Im z = -2 crosses the singularity at s = 1 on the positive side
  CHECK_THROWS_AS(char_exponent_complex(t, cplx(0.5, -2.0)), thorin::PreconditionError);
}

TEST_CASE("log moment generating function") {
  const auto gamma = triplet(0.0, 0.0, atom(2.0, 1.5), {}, Truncation::none);
  for (double u : {-3.0, 0.5, 1.9}) CHECK(std::abs(mgf_log(gamma, u) + 1.5 * std::log1p(-u / 2.0)) < 1e-13);
  CHECK(std::isinf(mgf_log(gamma, 2.0)));

  // tempered stable: finite at u = theta, lambda Gamma(-alpha)(alpha - 1) theta^alpha
  const double alpha = 0.5, theta = 1.0, lambda = 1.0;
  const auto cts = triplet(0.0, 0.0, cts_tau(lambda, theta, alpha), {}, Truncation::centered);
  const double at_edge = lambda * std::tgamma(-alpha) * (alpha - 1.0) * std::pow(theta, alpha);
  CHECK(std::abs(mgf_log(cts, theta) - at_edge) < 1e-8);
  CHECK(std::abs(mgf_log(cts, 0.3) - char_exponent_complex(cts, cplx(0.0, -0.3)).real()) < 1e-10);
}

TEST_CASE("drift conversion") {
  const auto none = triplet(0.7, 0.0, {}, {}, Truncation::indicator);
  CHECK(drift_convert(none).a == 0.7);

  const auto d2 = triplet(0.0, 0.0, atom(2.0, 1.0), {}, Truncation::indicator);
  CHECK(std::abs(drift_convert(d2).a + std::exp(-2.0) / 2.0) < 1e-15);

  // stable 1/2: int ((1 - e^-s) - 1{s >= 1}) s^(-3/2) ds / Gamma(1/2) = 2 - 2/sqrt(pi)
  const auto st = triplet(0.0, 0.0, cts_tau(1.0, 0.0, 0.5), {}, Truncation::indicator);
  CHECK(std::abs(drift_convert(st).a - (2.0 - 2.0 / std::sqrt(pi))) < 1e-10);

  // negative side enters with the opposite sign
  const auto mirrored = triplet(0.0, 0.0, {}, atom(2.0, 1.0), Truncation::indicator);
  CHECK(std::abs(drift_convert(mirrored).a - std::exp(-2.0) / 2.0) < 1e-15);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.2, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = triplet(U(rng), U(rng), atom(U(rng), U(rng)) + cts_tau(U(rng), U(rng), 0.6),
                           cts_tau(U(rng), U(rng), 1.4), Truncation::indicator);
    const auto back = from_levy(drift_convert(t), t.tau_plus, t.tau_minus);
    CHECK(std::abs(back.drift - t.drift) < 1e-12 * std::max(1.0, std::abs(t.drift)));
    CHECK(back.gaussian_var == t.gaussian_var);
  }
}

TEST_CASE("truncation conversion keeps the exponent") {
  const auto t = triplet(0.3, 0.5, atom(0.7, 1.2) + cts_tau(0.5, 1.1, 0.7), atom(2.0, 0.4),
                         Truncation::indicator);
  for (auto target : {Truncation::centered, Truncation::none, Truncation::indicator}) {
    const auto u = convert_truncation(t, target);
    CHECK(u.truncation == target);
    for (double z : {0.5, 3.0}) CHECK(cdist(char_exponent(u, z), char_exponent(t, z)) < 1e-11);
  }
  // 'none' is unavailable when int_1^inf tau/s diverges
  const auto heavy = triplet(0.0, 0.0, cts_tau(1.0, 0.5, 1.0), {}, Truncation::centered);
  CHECK_THROWS_AS(convert_truncation(heavy, Truncation::none), thorin::PreconditionError);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(triplet(0.0, -1.0, {}, {}, Truncation::none)), thorin::PreconditionError);
  // s^-2 near zero breaks the log moment condition
  const auto bad = RadialMeasure::piece(DensityPiece{0.0, 1.0, 1.0, LogPower{-2.0, 0.0}, nullptr});
  CHECK_THROWS_AS(validate(triplet(0.0, 0.0, bad, {}, Truncation::indicator)), thorin::PreconditionError);
  // centering needs a finite first moment: stable 1/2 has none
  CHECK_THROWS_AS(validate(triplet(0.0, 0.0, cts_tau(1.0, 0.0, 0.5), {}, Truncation::centered)),
                  thorin::PreconditionError);
  CHECK_NOTHROW(validate(triplet(0.0, 0.0, cts_tau(1.0, 0.0, 0.5), {}, Truncation::indicator)));
}

TEST_CASE("dual representation") {
  const auto t = triplet(0.1, 0.3, atom(2.0, 1.5) + cts_tau(0.8, 0.5, 0.7), atom(0.25, 2.0),
                         Truncation::indicator);
  const auto d = dual_measure(t);
  CHECK(d.dual_minus.atoms().size() == 1);
  CHECK(std::abs(d.dual_minus.atoms()[0].location - 4.0) < 1e-15);
  for (double z : {0.3, 1.0, 6.0}) CHECK(cdist(char_exponent_dual(d, z), char_exponent(t, z)) < 1e-10);
  // inverting the dual restores the original atoms bit for bit
  CHECK(identical(from_dual(d).tau_minus, t.tau_minus));

  // stable 1/2: the dual density y^(-3/2)/Gamma(1/2) built directly in y
  const auto st = triplet(0.0, 0.0, cts_tau(1.0, 0.0, 0.5), {}, Truncation::indicator);
  const DualRepresentation explicit_dual{
      0.0, 0.0,
      RadialMeasure::piece(DensityPiece{0.0, infinity, 1.0 / std::tgamma(0.5), LogPower{-1.5, 0.0}, nullptr}),
      {}, Truncation::indicator};
  for (double z : {0.2, 1.0, 5.0}) {
    CAPTURE(z);
    CHECK(cdist(char_exponent_dual(explicit_dual, z), char_exponent(st, z)) < 1e-9);
  }
  CHECK_THROWS_AS(dual_measure(triplet(0.0, 0.0, atom(0.0, 1.0), {}, Truncation::indicator)),
                  thorin::PreconditionError);
}

TEST_CASE("multivariate exponent") {
  // d = 1 with rays +1 and -1 reduces to the univariate exponent
  const auto t = triplet(0.2, 0.6, atom(1.5, 0.7) + cts_tau(0.4, 2.0, 0.5), atom(0.8, 1.3),
                         Truncation::indicator);
  PolarThorin one;
  one.b = Eigen::VectorXd::Constant(1, 0.2);
  one.sigma = Eigen::MatrixXd::Constant(1, 1, 0.6);
  one.directions.push_back({Eigen::VectorXd::Constant(1, 1.0), 1.0, t.tau_plus});
  one.directions.push_back({Eigen::VectorXd::Constant(1, -1.0), 1.0, t.tau_minus});
  for (double z : {-3.0, 0.4, 2.5})
    CHECK(cdist(char_exponent_multi(one, Eigen::VectorXd::Constant(1, z)), char_exponent(t, z)) < 1e-13);

  // orthogonal rays factorize into independent coordinates
  PolarThorin two;
  two.b = Eigen::Vector2d(0.0, 0.0);
  two.sigma = Eigen::Matrix2d::Zero();
  two.truncation = Truncation::none;
  two.directions.push_back({Eigen::Vector2d(1.0, 0.0), 2.0, atom(1.0, 1.0)});
  two.directions.push_back({Eigen::Vector2d(0.0, 1.0), 1.0, atom(3.0, 0.5)});
  const Eigen::Vector2d z(0.7, -1.9);
  const cplx want = -2.0 * std::log(cplx(1.0, -0.7)) - 0.5 * std::log(cplx(1.0, 1.9 / 3.0));
  CHECK(cdist(char_exponent_multi(two, z), want) < 1e-14);

  // a single oblique ray: the law of V u with V gamma, so psi(z) = -a log(1 - i<z,u>/b)
  PolarThorin ray;
  ray.b = Eigen::Vector3d::Zero();
  ray.sigma = Eigen::Matrix3d::Identity();
  ray.truncation = Truncation::none;
  const Eigen::Vector3d u = Eigen::Vector3d(1.0, 2.0, -2.0) / 3.0;
  ray.directions.push_back({u, 1.0, atom(0.5, 1.7)});
  const Eigen::Vector3d w(0.3, -1.1, 2.0);
  const cplx want_ray = -1.7 * std::log(cplx(1.0, -u.dot(w) / 0.5)) - 0.5 * w.squaredNorm();
  CHECK(cdist(char_exponent_multi(ray, w), want_ray) < 1e-14);

  PolarThorin bad = ray;
  bad.directions[0].u = Eigen::Vector3d(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(validate(bad), thorin::PreconditionError);
  bad = ray;
  bad.sigma(0, 0) = -1.0;
  CHECK_THROWS_AS(validate(bad), thorin::PreconditionError);
}
