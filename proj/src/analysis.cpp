#include "thorin/analysis.hpp"

#include "thorin/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace thorin::analysis {

using exponent::cplx;
using exponent::Truncation;
using measure::infinity;
using measure::RadialMeasure;
using measure::Region;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool finite_moment(const RadialMeasure& m, double p, Region r) { return m.empty() || measure::moment_integral(m, p, r).finite; }

double full_moment(const RadialMeasure& m, double p) {
  if (m.empty()) return 0.0;
  const auto in = measure::moment_integral(m, p, Region::inner);
  const auto out = measure::moment_integral(m, p, Region::outer);
  if (!in.finite || !out.finite) return infinity;
  return in.value + out.value;
}

// (index, analytic) for one side
std::pair<double, bool> side_index(const RadialMeasure& m) {
  double v = 0.0;
  bool analytic = true;
  for (const auto& p : m.pieces()) {
    if (std::isfinite(p.hi)) continue;
    const double e = p.tail_exponent();
    if (std::isnan(e)) {
      analytic = false;
      continue;
    }
    if (e == -infinity) continue;
    v = std::max(v, e + 1.0);
  }
  for (const auto& t : m.trains()) {
    if (t.increasing()) v = std::max(v, t.counting_exponent() + 1.0);
  }
  if (!analytic) {
    // bisection on the convergence set of int_1^inf s^-p dm
    double lo = v, hi = 2.0;
    if (!measure::moment_integral(m, lo + 1e-9, Region::outer).finite) {
      for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (measure::moment_integral(m, mid, Region::outer).finite ? hi : lo) = mid;
      }
      v = hi;
    }
  }
  return {std::clamp(v, 0.0, 2.0), analytic};
}

ThorinTriplet scaled(const ThorinTriplet& t, double c) {
  return {t.drift * c, t.gaussian_var * c, measure::scale(t.tau_plus, c), measure::scale(t.tau_minus, c),
          t.truncation};
}

double inf_support(const RadialMeasure& m) { return m.empty() ? infinity : measure::support_inf(m).value; }

CeSide ce_side(const ThorinTriplet& t, const RadialMeasure& m, double sign) {
  CeSide out;
  if (m.empty()) {
    out.verdict = Verdict::no;
    out.gamma = infinity;
    out.reason = "no jumps on this side";
    return out;
  }
  out.gamma = measure::support_inf(m).value;
  if (measure::has_atom_at(m, out.gamma)) {
    out.verdict = Verdict::no;
    out.reason = "atom of the Thorin measure at the critical exponent";
    return out;
  }
  const double tol = measure::default_atom_tolerance(out.gamma);
  for (const auto& p : m.pieces()) {
    if (p.lo > out.gamma + tol) continue;
    const double order = p.order_at_lo();
    if (!std::isfinite(order) || order <= -1.0) {
      out.verdict = Verdict::unknown;
      out.reason = "regular variation at the critical exponent undecided for kernel " + p.tag();
      return out;
    }
  }
  const double mgf = exponent::mgf_log(t, sign * out.gamma);
  if (!std::isfinite(mgf)) {
    out.verdict = Verdict::no;
    out.reason = "moment generating function infinite at the critical exponent";
    return out;
  }
  out.verdict = Verdict::yes;
  out.reason = "regularly varying Thorin distribution at the critical exponent, no atom, finite m.g.f.";
  return out;
}

double gamma_density(double shape, double rate, double y) {
  if (y <= 0.0) return 0.0;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(y) - rate * y - std::lgamma(shape));
}

// Binomial coefficient C(a, k) for real a.
double binom(double a, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= (a - i) / (i + 1);
  return out;
}

struct Singular {
  double side = 1.0;
  double b_star = 0.0;
  double rate = 0.0;
  std::vector<DensityGrid::Kernel> kernels;
};

// Gamma kernels reproducing the first terms of the large-|z| expansion of the characteristic
// function of a one-sided law with finite Thorin mass:
//   phi(z) e^(-iz b*) = w^-zeta e^L0 exp(sum_m (-1)^m M_m/(m w^m)),  w = -i side z,
// with L0 = int log s tau(ds) and M_m = int s^m tau(ds).
std::optional<Singular> singular_part(const ThorinTriplet& T) {
  if (T.gaussian_var != 0.0 || T.tau_plus.empty() == T.tau_minus.empty()) return std::nullopt;
  const double side = T.tau_plus.empty() ? -1.0 : 1.0;
  const RadialMeasure& m = side > 0 ? T.tau_plus : T.tau_minus;
  const auto mass = measure::total_mass(m);
  if (!mass.finite || !(mass.value > 0.0)) return std::nullopt;
  const double zeta = mass.value;
  const auto l0 = measure::integrate(m, [](const measure::Point& p) { return std::log(p.s); });
  const double inv_mean = full_moment(m, 1.0);
  if (!l0.converged || !std::isfinite(inv_mean)) return std::nullopt;
  std::vector<double> c;  // c_m, m = 1..
  for (int k = 1; k <= 3; ++k) {
    quad::Estimate e;
    try {
      e = measure::integrate(m, [k](const measure::Point& p) { return std::pow(p.s, k); });
    } catch (const std::exception&) {
      break;
    }
    if (!e.converged || !std::isfinite(e.value)) break;
    c.push_back((k % 2 ? -1.0 : 1.0) * e.value / k);
  }
  const int terms = static_cast<int>(c.size()) + 1;
  std::vector<double> a(terms, 0.0);
  a[0] = 1.0;
  for (int n = 1; n < terms; ++n) {
    for (int k = 1; k <= n; ++k) a[n] += k * c[k - 1] * a[n - k];
    a[n] /= n;
  }
  Singular s;
  s.side = side;
  s.b_star = exponent::convert_truncation(T, Truncation::none).drift;
  // twice the rate of the gamma law with the same zeta and mean, so the kernels never
  // coincide with the law itself
  s.rate = 2.0 * zeta / inv_mean;
  const double scale0 = std::exp(l0.value);
  std::vector<double> beta(terms, 0.0);
  for (int n = 0; n < terms; ++n) {
    // coefficient of w^-(zeta+n): sum_{j<=n} beta_j c^(zeta+n) C(-zeta-j, n-j) = e^L0 a_n
    const double cn = std::pow(s.rate, zeta + n);
    double rhs = scale0 * a[n];
    for (int j = 0; j < n; ++j) rhs -= beta[j] * cn * binom(-zeta - j, n - j);
    beta[n] = rhs / cn;
    s.kernels.push_back({beta[n], zeta + n});
  }
  return s;
}

cplx singular_cf(const Singular& s, double z) {
  const cplx w(0.0, -s.side * z);
  cplx sum = 0.0;
  for (const auto& k : s.kernels) sum += k.weight * std::exp(-k.shape * std::log(1.0 + w / s.rate));
  return std::exp(cplx(0.0, z * s.b_star)) * sum;
}

double singular_density(const Singular& s, double x) {
  double out = 0.0;
  for (const auto& k : s.kernels) out += k.weight * gamma_density(k.shape, s.rate, s.side * (x - s.b_star));
  return out;
}

// log E exp(v X_u) for the law tilted by u
double tilted_log_mgf(const ThorinTriplet& T, double u, double log_m_u, double v) {
  return exponent::mgf_log(T, u + v) - log_m_u;
}

// Chernoff bound point: P(side X > x) <= e^-25 beyond it.
double chernoff_end(const ThorinTriplet& T, double u, double log_m_u, double side, double room,
                    std::optional<double> sd) {
  if (!(room > 0.0)) return std::nan("");
  double v = std::isinf(room) ? (sd ? 8.0 / *sd : 1.0) : room / 2.0;
  if (sd) v = std::min(v, 8.0 / *sd);
  const double lm = tilted_log_mgf(T, u, log_m_u, side * v);
  if (!std::isfinite(lm)) return std::nan("");
  return side * (lm + 25.0) / v;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

BgIndex bg_index(const ThorinTriplet& t) {
  const auto [p, ap] = side_index(t.tau_plus);
  const auto [m, am] = side_index(t.tau_minus);
  return {std::max(p, m), t.gaussian_var > 0.0, ap && am ? "analytic" : "numeric"};
}

std::optional<double> activity_zeta(const ThorinTriplet& t) {
  if (bg_index(t).value != 0.0) return std::nullopt;
  double z = 0.0;
  for (const auto* m : {&t.tau_plus, &t.tau_minus}) {
    if (m->empty()) continue;
    const auto mass = measure::total_mass(*m);
    if (!mass.finite) return std::nullopt;
    z += mass.value;
  }
  return z;
}

bool moment_exists(const ThorinTriplet& t, int n) {
  if (n < 1) throw ParameterError("moment order must be at least 1");
  return finite_moment(t.tau_plus, n, Region::inner) && finite_moment(t.tau_minus, n, Region::inner);
}

Cumulant cumulant(const ThorinTriplet& t, int n) {
  if (!moment_exists(t, n)) return {0.0, false};
  if (n == 1) return {exponent::convert_truncation(t, Truncation::centered).drift, true};
  const double ip = full_moment(t.tau_plus, n), im = full_moment(t.tau_minus, n);
  const double value = std::tgamma(n) * (ip + (n % 2 ? -im : im)) + (n == 2 ? t.gaussian_var : 0.0);
  return {value, std::isfinite(value)};
}

CriticalExponent critical_exponent(const ThorinTriplet& t) {
  CriticalExponent c;
  c.gamma_plus = inf_support(t.tau_plus);
  c.gamma_minus = inf_support(t.tau_minus);
  c.mgf_plus = t.tau_plus.empty() || !measure::has_atom_at(t.tau_plus, c.gamma_plus);
  c.mgf_minus = t.tau_minus.empty() || !measure::has_atom_at(t.tau_minus, c.gamma_minus);
  c.analytic = c.gamma_plus > 0.0 && c.gamma_minus > 0.0;
  c.entire = t.tau_plus.empty() && t.tau_minus.empty();
  return c;
}

Strip analyticity_strip(const ThorinTriplet& t) {
  const auto c = critical_exponent(t);
  return {-c.gamma_plus, c.gamma_minus, c.mgf_plus, c.mgf_minus, c.entire};
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "true";
    case Verdict::no:
      return "false";
    case Verdict::unknown:
      break;
  }
  return "unknown";
}

ConvolutionEquivalence convolution_equivalent(const ThorinTriplet& t) {
  ConvolutionEquivalence ce;
  ce.plus = ce_side(t, t.tau_plus, 1.0);
  ce.minus = ce_side(t, t.tau_minus, -1.0);
  const double g = std::min(ce.plus.gamma, ce.minus.gamma);
  if (std::isinf(g)) {
    ce.overall = Verdict::no;
    return ce;
  }
  ce.overall = Verdict::yes;
  for (const auto* s : {&ce.plus, &ce.minus}) {
    if (s->gamma != g) continue;
    if (s->verdict == Verdict::no) {
      ce.overall = Verdict::no;
      break;
    }
    if (s->verdict == Verdict::unknown) ce.overall = Verdict::unknown;
  }
  return ce;
}

Regularity density_regularity(const ThorinTriplet& t, double t_len) {
  if (!(t_len > 0.0)) throw ParameterError("time must be positive");
  Regularity r;
  const auto zeta = activity_zeta(t);
  if (zeta) r.b_star = exponent::convert_truncation(t, Truncation::none).drift * t_len;
  if (t.gaussian_var > 0.0 || !zeta) {
    r.smooth = true;
    r.label = "C^inf";
    return r;
  }
  const double z = *zeta * t_len;
  if (z > 1.0) {
    // f in C^(n-1) \ C^n for n < zeta <= n + 1
    const int n = static_cast<int>(std::ceil(z)) - 1;
    r.order = n - 1;
    r.label = "C^" + std::to_string(n - 1) + " not C^" + std::to_string(n);
    return r;
  }
  r.continuous_except_b_star = true;
  r.label = "continuous except possibly at b*";
  return r;
}

DensityGrid pdf(const ThorinTriplet& t, double t_len, const FftOptions& opt) {
  if (!(t_len > 0.0)) throw ParameterError("time must be positive");
  if (opt.n < 16 || (opt.n & (opt.n - 1)) != 0) throw ParameterError("FFT size must be a power of two >= 16");
  exponent::validate(t);
  const ThorinTriplet T = scaled(t, t_len);
  const auto crit = critical_exponent(T);
  const double u = opt.tilt;
  if (u != 0.0 && !(u < crit.gamma_plus && -u < crit.gamma_minus))
    throw PreconditionError("analyticity_strip", "tilt must lie strictly inside (-gamma-, gamma+)");

  std::optional<Singular> sing;
  if (u == 0.0 && opt.subtract_singularity) sing = singular_part(T);
  if (T.gaussian_var == 0.0 && !sing) {
    const auto zeta = activity_zeta(T);
    if (crit.entire || (zeta && *zeta <= 1.0)) {
      std::ostringstream msg;
      msg << "|phi| is not integrable: finite activity " << (zeta ? *zeta : 0.0) << " <= 1 without a Gaussian part";
      throw PreconditionError("integrable_characteristic_function", msg.str());
    }
  }

  const double log_m_u = u == 0.0 ? 0.0 : exponent::mgf_log(T, u);
  std::optional<double> k1, sd;
  if (u == 0.0 && moment_exists(T, 2)) {
    k1 = cumulant(T, 1).value;
    sd = std::sqrt(cumulant(T, 2).value);
  }

  // window
  double hi = chernoff_end(T, u, log_m_u, 1.0, crit.gamma_plus - u, sd);
  double lo = chernoff_end(T, u, log_m_u, -1.0, crit.gamma_minus + u, sd);
  if (k1) {
    hi = std::isnan(hi) ? *k1 + 12.0 * *sd : std::max(hi, *k1 + 12.0 * *sd);
    lo = std::isnan(lo) ? *k1 - 12.0 * *sd : std::min(lo, *k1 - 12.0 * *sd);
  }
  // heavy tails without moments: pad by a power-tail heuristic
  const double heavy = 200.0 * std::pow(t_len, 1.0 / std::max(bg_index(T).value, 0.5));
  if (std::isnan(hi)) hi = heavy;
  if (std::isnan(lo)) lo = -heavy;
  // support bounded on one side: [b*, inf) or (-inf, b*]
  if (T.gaussian_var == 0.0 && (T.tau_plus.empty() != T.tau_minus.empty())) {
    const auto& m = T.tau_plus.empty() ? T.tau_minus : T.tau_plus;
    if (measure::moment_integral(m, 1.0, Region::outer).finite) {
      const double b = exponent::convert_truncation(T, Truncation::none).drift;
      if (T.tau_minus.empty()) lo = b - 0.02 * (hi - b);
      else hi = b + 0.02 * (b - lo);
    }
  }
  if (opt.lo) lo = *opt.lo;
  if (opt.hi) hi = *opt.hi;
  if (!(hi > lo)) throw ParameterError("empty density window");

  const std::size_t n = opt.n;
  DensityGrid g;
  g.dx = (hi - lo) / static_cast<double>(n);
  g.lo = lo;
  if (sing) g.lo = sing->b_star - (std::floor((sing->b_star - lo) / g.dx) + 0.5) * g.dx;
  g.tilt = u;
  g.log_mgf_tilt = log_m_u;
  const double dz = two_pi / (static_cast<double>(n) * g.dx);

  const auto cf = [&](double z) -> cplx {
    cplx v = u == 0.0 ? std::exp(exponent::char_exponent(T, z))
                      : std::exp(exponent::char_exponent_complex(T, cplx(z, -u)) - log_m_u);
    if (sing) v -= singular_cf(*sing, z);
    return v * std::exp(cplx(0.0, -z * g.lo));
  };

  std::vector<cplx> in(n);
  const std::size_t half = n / 2;
  {
    // z_j = (j - n/2) dz; evaluate j >= n/2 and mirror by conjugation
    const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = half + w; j < n; j += workers) in[j] = cf((static_cast<double>(j) - half) * dz);
          if (w == 0) in[0] = cf(-static_cast<double>(half) * dz);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t j = half + 1; j < n; ++j) in[n - j] = std::conj(in[j]);
  }
  g.truncation_estimate = std::abs(in[n - 1]) * (half * dz) / std::numbers::pi;

  std::vector<cplx> out(n);
  {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                              reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  g.x.resize(n);
  g.pdf.resize(n);
  g.residual.resize(n);
  double mass = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = g.lo + static_cast<double>(k) * g.dx;
    const double r = dz / two_pi * (k % 2 ? -1.0 : 1.0) * out[k].real();
    g.x[k] = x;
    g.residual[k] = r;
    double f = u == 0.0 ? r : std::exp(log_m_u - u * x) * r;
    if (sing) f += singular_density(*sing, x);
    g.pdf[k] = f;
    mass += r * g.dx;
  }
  if (sing) {
    g.kernels = sing->kernels;
    g.kernel_rate = sing->rate;
    g.b_star = sing->b_star;
    g.side = sing->side;
    for (const auto& k : g.kernels) mass += k.weight;
  }
  g.mass = mass;
  g.min_value = *std::min_element(g.pdf.begin(), g.pdf.end());
  if (u == 0.0 && (g.min_value < -1e-9 || std::abs(g.mass - 1.0) > 1e-6)) {
    std::ostringstream msg;
    msg << "FFT density failed its checks: min " << g.min_value << ", mass " << g.mass;
    throw NumericalError(msg.str(), std::max(-g.min_value, std::abs(g.mass - 1.0)));
  }
  return g;
}

double density_at(const DensityGrid& g, double x) {
  if (g.x.empty()) throw ParameterError("empty density grid");
  const double pos = (x - g.lo) / g.dx;
  if (pos < 0.0 || pos > static_cast<double>(g.x.size() - 1)) throw ParameterError("x outside the density window");
  const auto k = std::min(static_cast<std::size_t>(pos), g.x.size() - 2);
  const double w = pos - static_cast<double>(k);
  double f = (1.0 - w) * g.residual[k] + w * g.residual[k + 1];
  if (g.tilt != 0.0) f *= std::exp(g.log_mgf_tilt - g.tilt * x);
  for (const auto& kn : g.kernels) f += kn.weight * gamma_density(kn.shape, g.kernel_rate, g.side * (x - g.b_star));
  return f;
}

std::vector<double> cdf(const DensityGrid& g) {
  if (g.tilt != 0.0) throw ParameterError("distribution function needs an untilted density grid");
  std::vector<double> out(g.x.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    if (k > 0) acc += 0.5 * g.dx * (g.residual[k - 1] + g.residual[k]);
    double v = acc;
    for (const auto& kn : g.kernels) {
      const double y = g.side * (g.x[k] - g.b_star);
      const double p = y > 0.0 ? boost::math::gamma_p(kn.shape, g.kernel_rate * y) : 0.0;
      v += kn.weight * (g.side > 0 ? p : 1.0 - p);
    }
    out[k] = v;
  }
  return out;
}

double quantile(const DensityGrid& g, const std::vector<double>& cdf_values, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("probability must lie in (0, 1)");
  if (cdf_values.size() != g.x.size() || g.x.size() < 2) throw ParameterError("cdf does not match the grid");
  // running maximum keeps the interpolant monotone
  double prev_c = cdf_values[0];
  if (p <= prev_c) return g.x[0];
  for (std::size_t k = 1; k < g.x.size(); ++k) {
    const double c = std::max(prev_c, cdf_values[k]);
    if (p <= c) {
      const double w = c > prev_c ? (p - prev_c) / (c - prev_c) : 0.0;
      return g.x[k - 1] + w * g.dx;
    }
    prev_c = c;
  }
  return g.x.back();
}

TailRatio tail_equivalence_check(const ThorinTriplet& t, const std::vector<double>& x_grid, double band,
                                 const FftOptions& options) {
  if (x_grid.empty()) throw ParameterError("empty grid");
  const double side = x_grid.front() > 0.0 ? 1.0 : -1.0;
  for (double x : x_grid) {
    if (!(side * x > 0.0)) throw ParameterError("grid entries must be nonzero and share one sign");
  }
  const auto ce = convolution_equivalent(t);
  const CeSide& s = side > 0 ? ce.plus : ce.minus;
  if (s.verdict != Verdict::yes)
    throw PreconditionError("convolution_equivalence", std::string("side is not convolution equivalent: ") + s.reason);
  const double gamma = s.gamma;
  const double log_mu = exponent::mgf_log(t, side * gamma);

  FftOptions opt = options;
  double far = 0.0;
  for (double x : x_grid) far = std::max(far, std::abs(x));
  if (gamma > 0.0 && opt.tilt == 0.0) opt.tilt = side * gamma / 2.0;
  if (side > 0 && !opt.hi) opt.hi = 1.5 * far;
  if (side < 0 && !opt.lo) opt.lo = -1.5 * far;
  const auto g = pdf(t, 1.0, opt);

  TailRatio out;
  std::vector<std::pair<double, double>> pts;
  const RadialMeasure& m = side > 0 ? t.tau_plus : t.tau_minus;
  for (double x : x_grid) {
    const double k = measure::laplace(m, std::abs(x)).value;
    pts.emplace_back(std::abs(x), density_at(g, x) * std::abs(x) / (k * std::exp(log_mu)));
  }
  std::sort(pts.begin(), pts.end());
  out.monotone = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.x.push_back(side * pts[i].first);
    out.ratio.push_back(pts[i].second);
    if (i > 0 && std::abs(pts[i].second - 1.0) > std::abs(pts[i - 1].second - 1.0) + 1e-12) out.monotone = false;
  }
  out.final_deviation = std::abs(out.ratio.back() - 1.0);
  out.passed = out.monotone && out.final_deviation <= band;
  return out;
}

PropertyReport report(const ThorinTriplet& t) {
  PropertyReport r;
  r.bg = bg_index(t);
  r.zeta = activity_zeta(t);
  for (int n = 1; n <= 4; ++n) r.cumulants.push_back(cumulant(t, n));
  r.critical = critical_exponent(t);
  r.strip = analyticity_strip(t);
  r.ce = convolution_equivalent(t);
  r.regularity = density_regularity(t);
  return r;
}

}  // namespace thorin::analysis
