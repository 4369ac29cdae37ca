#include <doctest.h>

#include "thorin/errors.hpp"
#include "thorin/measure.hpp"
#include "thorin/quadrature.hpp"
#include "thorin/specfun.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace thorin::measure;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

DensityPiece power_exp_piece(double lo, double power, double rate, double coef = 1.0,
                             double hi = infinity) {
  return DensityPiece{lo, hi, coef, PowerExp{power, rate}, nullptr};
}

RadialMeasure stable_tau(double alpha) {
  return RadialMeasure::piece(power_exp_piece(0.0, alpha - 1.0, 0.0, 1.0 / std::tgamma(alpha)));
}

// Integrates a piece's pointwise density directly, bypassing the measure machinery. Each
// segment between breakpoints is split in half and each half is parametrised by the
// distance to its own end, so endpoint singularities see exact offsets.
double direct_density_integral(const DensityPiece& p, double a, double b,
                               const std::function<double(double)>& f = [](double) { return 1.0; },
                               std::vector<double> breaks = {}) {
  const auto at = [&](double s, double from_lo, double to_hi) {
    const double v = p.value(Point{s, from_lo, std::isinf(p.hi) ? infinity : to_hi, 0.0, infinity});
    return v == 0.0 ? 0.0 : f(s) * v;
  };
  breaks.insert(breaks.begin(), a);
  breaks.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double c = breaks[i], d = breaks[i + 1];
    const auto low = [&](double t) { return at(c + t, (c - p.lo) + t, (p.hi - c) - t); };
    const auto high = [&](double t) { return at(d - t, (d - p.lo) - t, (p.hi - d) + t); };
    if (std::isinf(d)) {
      total += thorin::quad::finite(low, 0.0, 1.0, 1e-14).value +
               thorin::quad::half_line(low, 1.0, 1e-14).value;
    } else {
      const double h = 0.5 * (d - c);
      total += thorin::quad::finite(low, 0.0, h, 1e-14).value +
               thorin::quad::finite(high, 0.0, d - c - h, 1e-14).value;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("monotone maps: inverses, offsets and orders") {
  const auto f = MonotoneMap::hyperbolic(0.7, 1.3);
  const auto g = MonotoneMap::quadratic(0.7, 1.3);
  CHECK(f.is_inverse_of(g));
  CHECK(g.is_inverse_of(f));
  for (double x : {0.0, 1e-9, 0.3, 2.0, 50.0}) {
    CHECK(std::abs(g(f(x)) - x) < 1e-13 * std::max(1.0, x));
    CHECK(std::abs(f.inverse(f(x)) - x) < 1e-13 * std::max(1.0, x));
  }
  CHECK(f(0.5) == doctest::Approx(std::sqrt(0.49 + 2 * 1.69 * 0.5) / 1.69).epsilon(1e-15));
  // Offsets agree with the plain difference where that is well conditioned, and stay
  // accurate where it is not.
  for (const auto& phi :
       {f, g, MonotoneMap::affine(2.0, -3.0), MonotoneMap::reciprocal(), MonotoneMap::inv_one_plus(),
        MonotoneMap::bilateral_root(2.0, 0.5)}) {
    const double x0 = phi.kind() == MapKind::quadratic ? 1.0 : 0.4;
    CHECK(rel(phi.forward_offset(x0, 0.05), phi(x0 + 0.05) - phi(x0)) < 1e-10);
    const double tiny = 1e-14;
    CHECK(rel(phi.forward_offset(x0, tiny), phi.derivative(x0) * tiny) < 1e-6);
  }
  CHECK(MonotoneMap::shift(1.5).is_inverse_of(MonotoneMap::shift(-1.5)));
  CHECK_FALSE(MonotoneMap::shift(1.5).is_inverse_of(MonotoneMap::shift(1.5)));
  CHECK(MonotoneMap::hyperbolic(0.0, 1.0).local_order(0.0) == 0.5);
  CHECK(MonotoneMap::hyperbolic(0.5, 1.0).local_order(0.0) == 1.0);
  const auto r = MonotoneMap::bilateral_root(1.0, 1.0);
  CHECK(r(1.0) == 0.0);
  CHECK(r(0.0) == 1.0);
  CHECK(r.local_order(1.0) == 0.5);
  CHECK_THROWS_AS(MonotoneMap::hyperbolic(0.0, 0.0), thorin::ParameterError);
}

TEST_CASE("laplace: spot values") {
  CHECK(rel(laplace(RadialMeasure::atom(2.0, 1.0), 1.0).value, std::exp(-2.0)) < 1e-15);
  // int e^(-rs) s^(a-1)/Gamma(a) ds = r^(-a)
  CHECK(rel(laplace(stable_tau(0.5), 4.0).value, 0.5) < 1e-14);
  // atoms at (k + c)/sigma, c = 1, sigma = 1
  const auto gzd = RadialMeasure::train(AtomTrain{1.0, 1.0, 1.0, {}});
  CHECK(std::abs(laplace(gzd, 2.0).value - std::exp(-2.0) / (1 - std::exp(-2.0))) < 1e-10);
  CHECK_THROWS_AS(laplace(gzd, 0.0), thorin::ParameterError);
}

TEST_CASE("laplace: quadrature path against incomplete gamma") {
  // t^p e^(-q t) on (lo, lo + b): e^(-r lo) gamma_lower(p+1, (q+r) b) / (q+r)^(p+1)
  for (double p : {-0.7, 0.0, 1.5}) {
    for (double r : {0.1, 1.0, 9.0}) {
      const double lo = 0.3, b = 2.0, q = 0.5;
      const auto m = RadialMeasure::piece(power_exp_piece(lo, p, q, 1.0, lo + b));
      const double oracle = std::exp(-r * lo) *
                            thorin::specfun::gamma_lower(p + 1, (q + r) * b).value /
                            std::pow(q + r, p + 1);
      const auto got = laplace(m, r);
      CHECK_FALSE(got.divergent);
      CHECK(rel(got.value, oracle) < 1e-10);
    }
  }
}

TEST_CASE("laplace: divergence is reported, not returned as a number") {
  const auto growing = RadialMeasure::piece(power_exp_piece(0.0, 0.0, -2.0));
  CHECK(laplace(growing, 1.0).divergent);
  CHECK_FALSE(laplace(growing, 3.0).divergent);
  const auto nonintegrable = RadialMeasure::piece(power_exp_piece(0.0, -1.5, 1.0));
  CHECK(laplace(nonintegrable, 1.0).divergent);
}

TEST_CASE("pushforward: atoms") {
  const auto f = MonotoneMap::hyperbolic(0.0, 1.0);
  const auto img = pushforward(RadialMeasure::atom(0.5, 1.0), f);
  REQUIRE(img.atoms().size() == 1);
  CHECK(img.atoms()[0].location == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(img.atoms()[0].weight == 1.0);
  const double lambda = 2.5, beta = 0.8, theta = -0.4, sigma = 0.9;
  const auto vg = pushforward(RadialMeasure::atom(beta, lambda), MonotoneMap::hyperbolic(theta, sigma));
  CHECK(rel(vg.atoms()[0].location,
            std::sqrt(theta * theta + 2 * sigma * sigma * beta) / (sigma * sigma)) < 1e-15);
  CHECK(vg.atoms()[0].weight == lambda);
  CHECK_THROWS_AS(pushforward(RadialMeasure::atom(1.5, 1.0), MonotoneMap::bilateral_root(1.0, 2.0)),
                  thorin::PreconditionError);
}

TEST_CASE("pushforward: beta kernel under reflection") {
  // pi(dq) = (1/2pi) q^(-1/2) (kappa - q)^(-1/2) on (0, kappa), pushed by x -> beta (1 - x)
  const double kappa = 0.6, beta = 2.0;
  const DensityPiece pi_piece{0.0, kappa, 1.0 / (2 * pi), BetaKernel{0.5, 0.5}, nullptr};
  const auto img = pushforward(RadialMeasure::piece(pi_piece), MonotoneMap::reflect(beta));
  REQUIRE(img.pieces().size() == 1);
  const auto& p = img.pieces()[0];
  CHECK(rel(p.lo, (1 - kappa) * beta) < 1e-15);
  CHECK(rel(p.hi, beta) < 1e-15);
  CHECK(std::abs(direct_density_integral(p, p.lo, p.hi) - 0.5) < 1e-8);
  // Change of variables: (1/2pi) (beta - y)^(-1/2) (y - (1-kappa) beta)^(-1/2), both -1/2.
  for (double y : {1.0, 1.3, 1.9}) {
    const double oracle =
        1.0 / (2 * pi) / std::sqrt((beta - y) * (y - (1 - kappa) * beta));
    CHECK(rel(p.value(y), oracle) < 1e-12);
  }
  CHECK(p.order_at_lo() == doctest::Approx(-0.5));
  CHECK(p.order_at_hi() == doctest::Approx(-0.5));
}

TEST_CASE("pushforward: composed Laplace against the pulled-back integral") {
  const DensityPiece base = power_exp_piece(0.2, -0.4, 1.5, 0.7);
  const auto phi = MonotoneMap::hyperbolic(0.3, 1.2);
  const auto img = pushforward(RadialMeasure::piece(base), phi);
  for (double r : {0.05, 1.0, 6.0}) {
    const double oracle = direct_density_integral(base, base.lo, infinity,
                                                  [&](double x) { return std::exp(-r * phi(x)); });
    CHECK(rel(laplace(img, r).value, oracle) < 1e-10);
  }
}

TEST_CASE("shift") {
  const auto d = shift(RadialMeasure::atom(2.0, 1.0), 1.0);
  CHECK(d.atoms()[0].location == 1.0);
  // (s - theta)^(a-1)/Gamma(a) shifted by theta is the stable kernel at the origin.
  const double theta = 1.7, a = 0.6;
  const auto cts = RadialMeasure::piece(power_exp_piece(theta, a - 1, 0.0, 1 / std::tgamma(a)));
  const auto back = shift(cts, theta);
  CHECK(back.pieces()[0].lo == 0.0);
  CHECK(identical(RadialMeasure::piece(power_exp_piece(0.0, a - 1, 0.0, 1 / std::tgamma(a))),
                  RadialMeasure(back.atoms(), {DensityPiece{back.pieces()[0].lo, back.pieces()[0].hi,
                                                            back.pieces()[0].coef,
                                                            back.pieces()[0].kernel, nullptr}})));
  CHECK_THROWS_AS(shift(RadialMeasure::atom(0.5, 1.0), 1.0), thorin::PreconditionError);
  CHECK_NOTHROW(shift(RadialMeasure::atom(0.5, 1.0), 1.0, false));
}

TEST_CASE("support bounds and atom queries") {
  const auto m = RadialMeasure::atom(3.0, 1.0) + RadialMeasure::piece(power_exp_piece(5.0, 0.0, 1.0));
  CHECK(support_inf(m).value == 3.0);
  CHECK(support_sup(m).value == infinity);
  CHECK(has_atom_at(m, 3.0));
  CHECK_FALSE(has_atom_at(m, 5.0));
  const auto cts = RadialMeasure::piece(power_exp_piece(0.8, -0.5, 0.0));
  CHECK(support_inf(cts).value == 0.8);
  CHECK_FALSE(has_atom_at(cts, 0.8));
  const double c = 0.7, sigma = 2.0;
  const auto gzd = RadialMeasure::train(AtomTrain{c / sigma, 1 / sigma, 1.0, {}});
  CHECK(support_inf(gzd).value == c / sigma);
  CHECK(has_atom_at(gzd, c / sigma));
  CHECK(has_atom_at(gzd, (5 + c) / sigma));
  CHECK_FALSE(has_atom_at(gzd, (5.5 + c) / sigma));
  CHECK(support_inf(RadialMeasure()).empty);
  CHECK(support_inf(RadialMeasure()).value == infinity);
}

TEST_CASE("validate_thorin") {
  for (double a : {0.2, 1.0, 1.9}) CHECK(validate_thorin(stable_tau(a), RadialMeasure()).valid);
  // density ~ s at infinity: int s^-2 dm diverges
  const auto linear_tail = RadialMeasure::piece(power_exp_piece(1.0, 1.0, 0.0));
  const auto bad = validate_thorin(linear_tail, RadialMeasure());
  CHECK_FALSE(bad.valid);
  // 1/(s log^2 s) near 0: the log-moment diverges like log log, caught numerically
  const auto loglog = RadialMeasure::piece(DensityPiece{0.0, 0.5, 1.0, LogPower{-1.0, -2.0}, nullptr});
  const auto rep = validate_thorin(RadialMeasure(), loglog);
  CHECK_FALSE(rep.valid);
  bool numeric = false;
  for (const auto& c : rep.checks)
    if (!c.passed) numeric = numeric || c.method == "numeric";
  CHECK(numeric);
  // one more log power converges
  const auto control = RadialMeasure::piece(DensityPiece{0.0, 0.5, 1.0, LogPower{-1.0, -3.0}, nullptr});
  CHECK(validate_thorin(control, RadialMeasure()).valid);
  CHECK_FALSE(validate_thorin(RadialMeasure::atom(0.0, 1.0), RadialMeasure()).valid);
}

TEST_CASE("fractional integral") {
  const double theta = 0.9, a = 0.7;
  const auto fi = fractional_integral(RadialMeasure::atom(theta, 2.0), a);
  REQUIRE(fi.pieces().size() == 1);
  const auto& p = fi.pieces()[0];
  CHECK(p.lo == theta);
  CHECK(rel(p.value(theta + 1.3), 2.0 * std::pow(1.3, a - 1) / std::tgamma(a)) < 1e-14);
  CHECK_THROWS_AS(fractional_integral(RadialMeasure::atom(1, 1), 2.0), thorin::ParameterError);
  CHECK_THROWS_AS(fractional_integral(RadialMeasure::atom(1, 1), 0.0), thorin::ParameterError);

  // alpha = 1 gives the distribution function.
  const DensityPiece beta_piece{0.5, 2.0, 1.0, BetaKernel{2.0, 0.5}, nullptr};
  const auto m = RadialMeasure::piece(beta_piece) + RadialMeasure::atom(1.0, 0.25);
  const auto cdf = fractional_integral(m, 1.0);
  for (double x : {0.7, 1.0 + 1e-9, 1.6, 3.0}) {
    const double oracle = direct_density_integral(beta_piece, 0.5, std::min(x, 2.0)) + (x > 1.0 ? 0.25 : 0.0);
    CHECK(rel(cdf.pieces()[0].value(x), oracle) < 1e-9);
  }

  // Linnik with alpha = 1 gives the Lamperti CDF, F(1) = 1/2 at rho = 1/2.
  const DensityPiece linnik{0.0, infinity, 1.0, LinnikRational{0.5, 1.0}, nullptr};
  const auto lamperti = fractional_integral(RadialMeasure::piece(linnik), 1.0);
  REQUIRE(lamperti.pieces().size() == 1);
  CHECK(std::holds_alternative<LampertiCdf>(lamperti.pieces()[0].kernel));
  CHECK(std::abs(lamperti.pieces()[0].value(1.0) - 0.5) < 1e-15);
  for (double rho : {0.3, 0.5, 0.85}) {
    const DensityPiece l{0.4, infinity, 1.0, LinnikRational{rho, 1.7}, nullptr};
    const auto F = fractional_integral(RadialMeasure::piece(l), 1.0).pieces()[0];
    CHECK(std::abs(direct_density_integral(l, l.lo, infinity) - 1.0) < 1e-9);
    for (double x : {0.41, 1.0, 5.0}) {
      CHECK(std::abs(F.value(x) - direct_density_integral(l, l.lo, x)) < 1e-9);
    }
  }

  // Laplace of I^a m is r^-a L(m); checked against the nested quadrature of the density.
  const auto rl = fractional_integral(m, 0.6);
  for (double r : {0.5, 2.0}) {
    const double closed = std::pow(r, -0.6) * laplace(m, r).value;
    CHECK(rel(laplace(rl, r).value, closed) < 1e-12);
    // the atom at 1 puts a (x-1)^(-0.4) singularity inside the piece
    const double nested = direct_density_integral(
        rl.pieces()[0], 0.5, infinity, [r](double s) { return std::exp(-r * s); }, {1.0});
    CHECK(rel(nested, closed) < 1e-7);
  }
}

TEST_CASE("moment integrals") {
  const double a = 0.6;
  const auto st = stable_tau(a);
  const auto outer = moment_integral(st, 1.5, Region::outer);
  CHECK(outer.finite);
  CHECK(rel(outer.value, 1.0 / ((1.5 - a) * std::tgamma(a))) < 1e-9);
  CHECK_FALSE(moment_integral(st, 0.3, Region::outer).finite);
  const auto d = RadialMeasure::atom(2.0, 3.0);
  CHECK(rel(moment_integral(d, 1.5, Region::outer).value, 3.0 * std::pow(2.0, -1.5)) < 1e-15);
  CHECK(moment_integral(d, 1.5, Region::inner).value == 0.0);
  const auto cts = RadialMeasure::piece(power_exp_piece(1.4, -0.5, 2.0));
  const auto inner = moment_integral(cts, 1.0, Region::inner);
  CHECK(inner.finite);
  CHECK(inner.value == 0.0);
  // int_0^1 s^(-p) s^(a-1)/Gamma(a) = 1/((a - p) Gamma(a)) for p < a
  CHECK(rel(moment_integral(st, 0.2, Region::inner).value, 1 / ((a - 0.2) * std::tgamma(a))) < 1e-9);
  CHECK_FALSE(moment_integral(st, 0.7, Region::inner).finite);
}

TEST_CASE("atom train sums") {
  // sum_k 1/(k+1)^2 = pi^2/6 through the Euler-Maclaurin tail
  const AtomTrain t{1.0, 1.0, 1.0, {}};
  const auto s = sum_train(t, [](double x) { return 1.0 / (x * x); });
  CHECK(std::abs(s.value - pi * pi / 6) < 1e-10);
  // restricted to [3, 10]: atoms at 3..10
  double direct = 0.0;
  for (int k = 3; k <= 10; ++k) direct += 1.0 / (k * k);
  CHECK(rel(sum_train(t, [](double x) { return 1.0 / (x * x); }, 3.0, 10.0).value, direct) < 1e-15);
  // image of the train under the hyperbolic map
  const auto f = MonotoneMap::hyperbolic(0.2, 1.0);
  const auto img = pushforward(RadialMeasure::train(t), f);
  double hand = 0.0;
  for (int k = 0; k < 400000; ++k) hand += std::exp(-3.0 * f(1.0 + k));
  CHECK(rel(laplace(img, 3.0).value, hand) < 1e-10);
}

TEST_CASE("property: laplace transforms are completely monotone") {
  const std::vector<RadialMeasure> ms = {
      stable_tau(0.4),
      RadialMeasure::atom(0.5, 2.0) + RadialMeasure::piece(power_exp_piece(1.0, 0.3, 0.2)),
      RadialMeasure::train(AtomTrain{0.3, 0.5, 1.0, {}}),
      pushforward(stable_tau(1.2), MonotoneMap::hyperbolic(0.4, 0.8)),
      RadialMeasure::piece(DensityPiece{0.2, infinity, 1.0, LinnikRational{0.7, 2.0}, nullptr}),
  };
  for (const auto& m : ms) {
    std::vector<double> v;
    for (int i = 0; i <= 6; ++i) v.push_back(laplace(m, 0.5 + 0.25 * i).value);
    // n-th forward difference has sign (-1)^n
    for (int n = 1; n <= 6; ++n) {
      for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
      v.pop_back();
      for (double d : v) CHECK(d * (n % 2 ? -1.0 : 1.0) > 0.0);
    }
  }
}

TEST_CASE("property: pushforward preserves mass on bounded sets") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int i = 0; i < 6; ++i) {
    const DensityPiece base = power_exp_piece(0.1, u(rng) - 1.0, u(rng));
    for (const auto& phi : {MonotoneMap::hyperbolic(u(rng) - 1.0, u(rng)), MonotoneMap::affine(0.5, 2.0),
                            MonotoneMap::inv_one_plus()}) {
      const auto img = pushforward(RadialMeasure::piece(base), phi);
      const double b0 = 0.3, b1 = 1.7;
      const double lo = std::min(phi(b0), phi(b1)), hi = std::max(phi(b0), phi(b1));
      const double image_mass = direct_density_integral(img.pieces()[0], lo, hi);
      const double base_mass = direct_density_integral(base, b0, b1);
      CHECK(std::abs(image_mass - base_mass) < 1e-8);
    }
  }
}

TEST_CASE("property: shift round trip is exact and support follows the map") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double th = u(rng);
    const auto m = RadialMeasure::atom(u(rng) + 3.0, 1.0 + u(rng)) +
                   pushforward(RadialMeasure::piece(power_exp_piece(7.0 + u(rng), -0.5, 1.0)),
                               MonotoneMap::hyperbolic(u(rng), 1.0 + u(rng))) +
                   RadialMeasure::train(AtomTrain{3.0 + u(rng), 0.5, 1.0, {}});
    CHECK(identical(shift(shift(m, th, false), -th, false), m));
    CHECK(identical(shift(shift(m, -th, false), th, false), m));
  }
  const auto m = RadialMeasure::atom(0.5, 1.0) + RadialMeasure::piece(power_exp_piece(1.0, 0.0, 0.0, 1.0, 2.0));
  const auto up = MonotoneMap::hyperbolic(0.3, 1.1);
  CHECK(support_inf(pushforward(m, up)).value == up(0.5));
  const auto down = MonotoneMap::inv_one_plus();
  CHECK(support_inf(pushforward(m, down)).value == down(2.0));
  CHECK(support_sup(pushforward(m, down)).value == down(0.5));
}

TEST_CASE("property: tail exponents match the kernels") {
  CHECK(tail_exponent_consistent(power_exp_piece(0.0, 0.7, 0.0)));
  CHECK(tail_exponent_consistent(DensityPiece{0.0, infinity, 1.0, LinnikRational{0.6, 1.5}, nullptr}));
  const auto img = pushforward(RadialMeasure::piece(power_exp_piece(0.0, -0.3, 0.0)),
                               MonotoneMap::hyperbolic(0.0, 1.0));
  CHECK(img.pieces()[0].tail_exponent() == doctest::Approx(2 * -0.3 + 1));
  CHECK(tail_exponent_consistent(img.pieces()[0]));
  const auto rl = fractional_integral(
      RadialMeasure::piece(DensityPiece{0.0, infinity, 1.0, LinnikRational{0.6, 1.5}, nullptr}), 0.5);
  CHECK(rl.pieces()[0].tail_exponent() == doctest::Approx(-0.5));
  CHECK(tail_exponent_consistent(rl.pieces()[0]));
}
