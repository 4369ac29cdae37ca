#include "thorin/measure.hpp"

#include "thorin/errors.hpp"
#include "thorin/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace thorin::measure {
namespace {

using std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool relative_kernel(const Kernel& k) {
  return std::holds_alternative<PowerExp>(k) || std::holds_alternative<LinnikRational>(k) ||
         std::holds_alternative<LampertiCdf>(k) || std::holds_alternative<BetaKernel>(k);
}

double linnik_value(const LinnikRational& k, double t) {
  if (t <= 0) return t == 0 && k.rho < 1 ? infinity : 0.0;
  const double tr = std::pow(t, k.rho);
  const double denom = tr * tr / k.beta + 2 * tr * std::cos(k.rho * pi) + k.beta;
  return std::pow(t, k.rho - 1) * std::sin(k.rho * pi) / pi / denom;
}

// F(x) = (arccot(c) - arccot(c + u)) / (rho pi) with c = cot(rho pi), u = x^rho / sin(rho pi),
// folded into one atan2 so that small x keeps its relative precision.
double lamperti_value(const LampertiCdf& k, double t) {
  if (t <= 0) return 0.0;
  const double sn = std::sin(k.rho * pi), c = std::cos(k.rho * pi) / sn;
  const double u = std::pow(t, k.rho) / (k.beta * sn);
  if (std::isinf(u)) return 1.0;
  return std::atan2(u, 1 + c * (c + u)) / (k.rho * pi);
}

// log s for s = lo + from_lo = hi - to_hi, accurate when s is near 1.
double log_abs_s(const DensityPiece& p, const Point& pt) {
  if (p.lo == 1.0) return std::log1p(pt.from_lo);
  if (p.hi == 1.0) return std::log1p(-pt.to_hi);
  return std::log(pt.s);
}

// Lowest density order of a measure at the point x (atoms and train heads count as -1).
double source_order_at(const RadialMeasure& m, double x) {
  double o = infinity;
  for (const auto& a : m.atoms())
    if (a.location == x) o = std::min(o, -1.0);
  for (const auto& p : m.pieces())
    if (p.lo == x) o = std::min(o, p.order_at_lo());
  for (const auto& t : m.trains())
    if (t.location(0) == x) o = std::min(o, -1.0);
  return o;
}

double source_tail(const RadialMeasure& m) {
  double e = -infinity;
  for (const auto& p : m.pieces())
    if (std::isinf(p.hi)) e = std::max(e, p.tail_exponent());
  for (const auto& t : m.trains()) e = std::max(e, t.counting_exponent());
  return e;
}

// ---- integration over one segment of a closed-form piece ------------------------------

// Builds the quadrature point at distance t from the start (from_start) or from the end.
struct Segment {
  const DensityPiece& piece;
  double start;
  double end;

  Point from_start(double t) const {
    Point p;
    p.s = start + t;
    p.from_lo = (start - piece.lo) + t;
    p.to_hi = std::isinf(piece.hi) ? infinity : (piece.hi - start) - t;
    p.from_start = t;
    p.to_end = std::isinf(end) ? infinity : (end - start) - t;
    return p;
  }
  Point from_end(double t) const {
    Point p;
    p.s = end - t;
    p.from_lo = (end - piece.lo) - t;
    p.to_hi = std::isinf(piece.hi) ? infinity : (piece.hi - end) + t;
    p.from_start = (end - start) - t;
    p.to_end = t;
    return p;
  }
};

quad::Estimate integrate_piece(const DensityPiece& piece, const PointFunction& f, double a,
                               double b, double tol);

// A vanishing factor wins over an overflowing density at the very end of a segment.
double product(double fv, double v) { return fv == 0.0 || v == 0.0 ? 0.0 : fv * v; }

quad::Estimate integrate_segment(const DensityPiece& piece, const PointFunction& f, double a,
                                 double b, double tol) {
  const Segment seg{piece, a, b};
  const auto low = [&](double t) {
    const Point p = seg.from_start(t);
    const double v = piece.value(p);
    return product(f(p), v);
  };
  const auto high = [&](double t) {
    const Point p = seg.from_end(t);
    const double v = piece.value(p);
    return product(f(p), v);
  };
  if (std::isinf(b)) {
    return quad::finite(low, 0.0, 1.0, tol) + quad::half_line(low, 1.0, tol);
  }
  const double len = b - a;
  if (len <= 2.0) {
    const double half = 0.5 * len;
    return quad::finite(low, 0.0, half, tol) + quad::finite(high, 0.0, len - half, tol);
  }
  // Long segments: unit ends anchored at their endpoints, geometric pieces in between
  // so that mass concentrated near the start is resolved.
  quad::Estimate out = quad::finite(low, 0.0, 1.0, tol) + quad::finite(high, 0.0, 1.0, tol);
  double t0 = 1.0;
  while (t0 < len - 1.0) {
    const double t1 = std::min(4.0 * t0, len - 1.0);
    out = out + quad::finite(low, t0, t1, tol);
    t0 = t1;
  }
  return out;
}

quad::Estimate integrate_base(const DensityPiece& piece, const PointFunction& f, double a,
                              double b, double tol) {
  // Source atoms put integrable singularities inside a fractional-integral piece.
  std::vector<double> cuts{a};
  if (const auto* k = std::get_if<RiemannLiouville>(&piece.kernel)) {
    for (const auto& at : k->source->atoms())
      if (at.location > a && at.location < b) cuts.push_back(at.location);
    std::sort(cuts.begin(), cuts.end());
  }
  cuts.push_back(b);
  quad::Estimate out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    out = out + integrate_segment(piece, f, cuts[i], cuts[i + 1], tol);
  return out;
}

quad::Estimate integrate_composed(const DensityPiece& piece, const Composed& c,
                                  const PointFunction& f, double a, double b, double tol) {
  const DensityPiece& base = *c.base;
  const MonotoneMap& phi = c.map;
  const bool inc = phi.increasing();
  // base segment [xa, xb] and image segment [ya, yb]
  const double ya = a, yb = b;
  double xa, xb;
  if (inc) {
    xa = a <= piece.lo ? base.lo : std::max(base.lo, phi.inverse(a));
    xb = b >= piece.hi ? base.hi : std::min(base.hi, phi.inverse(b));
  } else {
    xa = b >= piece.hi ? base.lo : std::max(base.lo, phi.inverse(b));
    xb = a <= piece.lo ? base.hi : std::min(base.hi, phi.inverse(a));
  }
  if (!(xb > xa)) return {};
  const PointFunction pulled = [&](const Point& bp) {
    Point ip;
    ip.s = phi(bp.s);
    if (inc) {
      ip.from_lo = phi.forward_offset(base.lo, bp.from_lo);
      ip.to_hi = std::isinf(piece.hi) ? infinity : -phi.forward_offset(base.hi, -bp.to_hi);
      ip.from_start = phi.forward_offset(xa, bp.from_start);
      ip.to_end = std::isinf(yb) ? infinity : -phi.forward_offset(xb, -bp.to_end);
    } else {
      ip.from_lo = std::isinf(base.hi) ? ip.s - piece.lo : phi.forward_offset(base.hi, -bp.to_hi);
      ip.to_hi = std::isinf(piece.hi) ? infinity : -phi.forward_offset(base.lo, bp.from_lo);
      ip.from_start = std::isinf(xb) ? ip.s - ya : phi.forward_offset(xb, -bp.to_end);
      ip.to_end = std::isinf(yb) ? infinity : -phi.forward_offset(xa, bp.from_start);
    }
    return f(ip);
  };
  quad::Estimate e = integrate_piece(base, pulled, xa, xb, tol);
  e.value *= piece.coef;
  e.error *= piece.coef;
  return e;
}

quad::Estimate integrate_piece(const DensityPiece& piece, const PointFunction& f, double a,
                               double b, double tol) {
  const double lo = std::max(a, piece.lo), hi = std::min(b, piece.hi);
  if (!(hi > lo)) return {};
  if (const auto* c = std::get_if<Composed>(&piece.kernel)) {
    return integrate_composed(piece, *c, f, lo, hi, tol);
  }
  return integrate_base(piece, f, lo, hi, tol);
}

// ---- trains -----------------------------------------------------------------------------

double location_at_infinity(const AtomTrain& t) {
  double x = t.step > 0 ? infinity : -infinity;
  for (const auto& m : t.maps) x = m(x);
  return x;
}

// Smallest integer k >= 0 with pred(k) true, given pred is monotone false -> true;
// returns +inf if none below 2^60.
double first_index(const std::function<bool(double)>& pred) {
  if (pred(0.0)) return 0.0;
  double hi = 1.0;
  while (!pred(hi)) {
    hi *= 2.0;
    if (hi > 1.2e18) return infinity;
  }
  double lo = hi / 2.0;  // pred(lo) false
  if (hi == 1.0) lo = 0.0;
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Index range [k0, k1] of train atoms located in [a, b]; k1 may be +inf.
std::pair<double, double> index_range(const AtomTrain& t, double a, double b) {
  if (t.increasing()) {
    const double k0 = first_index([&](double k) { return t.location(k) >= a; });
    if (std::isinf(b)) return {k0, infinity};
    const double k_past = first_index([&](double k) { return t.location(k) > b; });
    return {k0, k_past - 1.0};
  }
  const double k0 = first_index([&](double k) { return t.location(k) <= b; });
  const double k_past = first_index([&](double k) { return t.location(k) < a; });
  return {k0, k_past - 1.0};
}

void require_positive_rate(double r) {
  if (!(r > 0) || !std::isfinite(r)) throw ParameterError("laplace transform needs r > 0");
}

LaplaceResult laplace_piece(const DensityPiece& p, double r);

LaplaceResult laplace_measure(const RadialMeasure& m, double r) {
  LaplaceResult out;
  for (const auto& a : m.atoms()) out.value += a.weight * std::exp(-r * a.location);
  for (const auto& p : m.pieces()) {
    const auto lp = laplace_piece(p, r);
    if (lp.divergent) return {infinity, true, 0.0};
    out.value += lp.value;
    out.error += lp.error;
  }
  for (const auto& t : m.trains()) {
    if (!t.increasing() || !std::isinf(location_at_infinity(t))) return {infinity, true, 0.0};
    if (t.linear()) {
      // Truncate once the geometric tail bound e^(-r s_K)/(1 - e^(-r step)) is negligible.
      const double s0 = t.location(0), step = t.location(1) - s0;
      const double denom = -std::expm1(-r * step);
      double sum = 0.0;
      for (long k = 0;; ++k) {
        const double s = t.location(static_cast<double>(k));
        const double term = std::exp(-r * s);
        const double bound = term / denom;
        if (bound < 1e-13 * sum || bound == 0.0) break;
        sum += term;
      }
      out.value += t.weight * sum;
    } else {
      const auto e = sum_train(t, [r](double s) { return std::exp(-r * s); });
      out.value += e.value;
      out.error += e.error;
    }
  }
  return out;
}

LaplaceResult laplace_piece(const DensityPiece& p, double r) {
  const double shift = std::exp(-r * p.lo);
  if (std::isinf(p.hi)) {
    if (const auto* k = std::get_if<PowerExp>(&p.kernel)) {
      if (k->power <= -1 || r + k->rate <= 0) return {infinity, true, 0.0};
      const double q = r + k->rate;
      const double log_v = -r * p.lo + std::lgamma(k->power + 1) - (k->power + 1) * std::log(q);
      return {p.coef * std::exp(log_v), false, 0.0};
    }
    if (const auto* k = std::get_if<LinnikRational>(&p.kernel)) {
      const auto e = specfun::mittag_leffler(k->rho, -k->beta * std::pow(r, k->rho));
      return {p.coef * shift * e.value, false, p.coef * shift * e.est_error};
    }
    if (const auto* k = std::get_if<LampertiCdf>(&p.kernel)) {
      const auto e = specfun::mittag_leffler(k->rho, -k->beta * std::pow(r, k->rho));
      return {p.coef * shift * e.value / r, false, p.coef * shift * e.est_error / r};
    }
    if (const auto* k = std::get_if<RiemannLiouville>(&p.kernel)) {
      auto src = laplace_measure(*k->source, r);
      if (src.divergent) return src;
      const double f = p.coef * std::pow(r, -k->alpha);
      return {f * src.value, false, f * src.error};
    }
  }
  if (p.order_at_lo() <= -1 || (std::isfinite(p.hi) && p.order_at_hi() <= -1)) {
    return {infinity, true, 0.0};
  }
  const auto e = integrate_piece(
      p, [r](const Point& pt) { return std::exp(-r * pt.s); }, p.lo, p.hi, 1e-13);
  if (!e.converged || !std::isfinite(e.value)) {
    if (std::isinf(p.hi) && !(p.tail_exponent() < infinity)) return {infinity, true, 0.0};
    throw NumericalError("laplace quadrature did not converge on " + p.tag(), e.error);
  }
  return {e.value, false, e.error};
}

// ---- pushforward ------------------------------------------------------------------------

Atom push_atom(const Atom& a, const MonotoneMap& phi) {
  if (a.origin && phi.is_inverse_of(a.origin->via)) return a.origin->prev;
  const Interval dom = phi.domain();
  const double x = std::clamp(a.location, dom.lo, dom.hi);
  const double y = phi(x);
  if (!std::isfinite(y)) {
    throw PreconditionError("support_in_domain", "atom at " + std::to_string(a.location) +
                                                     " has no finite image under " + phi.name());
  }
  return Atom{y, a.weight, std::make_shared<AtomOrigin>(AtomOrigin{a, phi})};
}

bool is_translation(const MonotoneMap& phi) {
  return phi.kind() == MapKind::affine && phi.params()[1] == 1.0;
}

DensityPiece push_piece(const DensityPiece& p, const MonotoneMap& phi) {
  if (p.origin && phi.is_inverse_of(p.origin->via)) return p.origin->prev;
  auto origin = std::make_shared<PieceOrigin>(PieceOrigin{p, phi});
  if (is_translation(phi)) {
    if (relative_kernel(p.kernel)) {
      return DensityPiece{phi(p.lo), phi(p.hi), p.coef, p.kernel, origin};
    }
    if (const auto* k = std::get_if<RiemannLiouville>(&p.kernel)) {
      auto src = std::make_shared<RadialMeasure>(pushforward(*k->source, phi));
      return DensityPiece{phi(p.lo), phi(p.hi), p.coef, RiemannLiouville{src, k->alpha}, origin};
    }
  }
  const Interval dom = phi.domain();
  const Interval img =
      phi.image(Interval{std::max(p.lo, dom.lo), std::min(p.hi, dom.hi)});
  return DensityPiece{img.lo, img.hi, 1.0, Composed{std::make_shared<DensityPiece>(p), phi}, origin};
}

AtomTrain push_train(const AtomTrain& t, const MonotoneMap& phi) {
  AtomTrain out = t;
  if (!out.maps.empty() && phi.is_inverse_of(out.maps.back())) {
    out.maps.pop_back();
  } else {
    out.maps.push_back(phi);
  }
  return out;
}

Atom scaled_atom(const Atom& a, double c) {
  if (a.origin) return push_atom(scaled_atom(a.origin->prev, c), a.origin->via);
  return Atom{a.location, a.weight * c, nullptr};
}

DensityPiece scaled_piece(const DensityPiece& p, double c) {
  if (p.origin) return push_piece(scaled_piece(p.origin->prev, c), p.origin->via);
  DensityPiece out = p;
  out.coef *= c;
  return out;
}

bool same_kernel(const Kernel& x, const Kernel& y);

bool same_piece(const DensityPiece& x, const DensityPiece& y) {
  return x.lo == y.lo && x.hi == y.hi && x.coef == y.coef && same_kernel(x.kernel, y.kernel);
}

bool same_kernel(const Kernel& x, const Kernel& y) {
  if (x.index() != y.index()) return false;
  return std::visit(
      overloaded{
          [&](const PowerExp& k) {
            const auto& o = std::get<PowerExp>(y);
            return k.power == o.power && k.rate == o.rate;
          },
          [&](const LinnikRational& k) {
            const auto& o = std::get<LinnikRational>(y);
            return k.rho == o.rho && k.beta == o.beta;
          },
          [&](const LampertiCdf& k) {
            const auto& o = std::get<LampertiCdf>(y);
            return k.rho == o.rho && k.beta == o.beta;
          },
          [&](const BetaKernel& k) {
            const auto& o = std::get<BetaKernel>(y);
            return k.a == o.a && k.b == o.b;
          },
          [&](const LogPower& k) {
            const auto& o = std::get<LogPower>(y);
            return k.power == o.power && k.log_power == o.log_power;
          },
          [&](const Composed& k) {
            const auto& o = std::get<Composed>(y);
            return k.map == o.map && same_piece(*k.base, *o.base);
          },
          [&](const RiemannLiouville& k) {
            const auto& o = std::get<RiemannLiouville>(y);
            return k.alpha == o.alpha && identical(*k.source, *o.source);
          },
      },
      x);
}

// Decides divergence of a nonnegative series of shell contributions delta_k, k = 1..6, from
// cutoffs spaced by a factor 100. Power-law behaviour makes delta_k geometric in k; a
// logarithmic boundary case makes it ~ k^-q, divergent for q <= 1.
bool shells_diverge(const std::vector<double>& delta, std::string& detail) {
  for (double d : delta) {
    if (!std::isfinite(d)) {
      detail = "non-finite shell integral";
      return true;
    }
  }
  const double d4 = delta[3], d6 = delta[5];
  if (d6 == 0.0) {
    detail = "no mass in the outer shells";
    return false;
  }
  if (d4 == 0.0) {
    detail = "shell mass increasing";
    return true;
  }
  const double q = -std::log(d6 / d4) / std::log(6.0 / 4.0);
  std::ostringstream out;
  out << "shell decay exponent " << q;
  detail = out.str();
  return q < 1.5;
}

}  // namespace

// ---- DensityPiece -------------------------------------------------------------------------

double DensityPiece::value(double s) const {
  if (!(s > lo) || s > hi) return s == lo ? value(Point{s, 0.0, hi - s, 0.0, infinity}) : 0.0;
  return value(Point{s, s - lo, std::isinf(hi) ? infinity : hi - s, 0.0, infinity});
}

double DensityPiece::value(const Point& p) const {
  if (p.from_lo < 0 || p.to_hi < 0) return 0.0;
  const double t = p.from_lo;
  const double v = std::visit(
      overloaded{
          [&](const PowerExp& k) {
            if (k.rate == 0.0) return std::pow(t, k.power);
            return std::pow(t, k.power) * std::exp(-k.rate * t);
          },
          [&](const LinnikRational& k) { return linnik_value(k, t); },
          [&](const LampertiCdf& k) { return lamperti_value(k, t); },
          [&](const BetaKernel& k) { return std::pow(t, k.a - 1) * std::pow(p.to_hi, k.b - 1); },
          [&](const LogPower& k) {
            const double l = std::abs(log_abs_s(*this, p));
            return std::pow(p.s, k.power) * (k.log_power == 0.0 ? 1.0 : std::pow(l, k.log_power));
          },
          [&](const Composed& k) {
            const DensityPiece& base = *k.base;
            const MonotoneMap& phi = k.map;
            Point bp;
            bp.s = phi.inverse(p.s);
            if (phi.increasing()) {
              bp.from_lo = phi.inverse_offset(lo, p.from_lo);
              bp.to_hi = std::isinf(base.hi) ? infinity : -phi.inverse_offset(hi, -p.to_hi);
            } else {
              bp.from_lo = std::isinf(hi) ? bp.s - base.lo : phi.inverse_offset(hi, -p.to_hi);
              bp.to_hi = std::isinf(base.hi) ? infinity : -phi.inverse_offset(lo, p.from_lo);
            }
            return base.value(bp) * phi.inverse_jacobian(p.s);
          },
          [&](const RiemannLiouville& k) {
            const RadialMeasure& src = *k.source;
            const double x = p.s, am1 = k.alpha - 1;
            double sum = 0.0;
            for (const auto& a : src.atoms()) {
              const double d = a.location == lo ? t : x - a.location;
              if (d > 0) sum += a.weight * std::pow(d, am1);
            }
            for (const auto& tr : src.trains()) {
              sum += sum_train(
                         tr,
                         [&](double u) {
                           const double d = u == lo ? t : x - u;
                           return d > 0 ? std::pow(d, am1) : 0.0;
                         },
                         0.0, x)
                         .value;
            }
            for (const auto& piece : src.pieces()) {
              // to_end is measured from min(x, piece.hi); exact when x is the nearer end
              const bool ends_at_x = x <= piece.hi;
              const PointFunction kernel = [am1, x, ends_at_x](const Point& q) {
                const double d = ends_at_x ? q.to_end : x - q.s;
                return d > 0 ? std::pow(d, am1) : 0.0;
              };
              sum += integrate_piece(piece, kernel, piece.lo, x, 1e-12).value;
            }
            return sum / std::tgamma(k.alpha);
          },
      },
      kernel);
  return coef * v;
}

double DensityPiece::order_at_lo() const {
  return std::visit(
      overloaded{
          [](const PowerExp& k) { return k.power; },
          [](const LinnikRational& k) { return k.rho - 1; },
          [](const LampertiCdf& k) { return k.rho; },
          [](const BetaKernel& k) { return k.a - 1; },
          [&](const LogPower& k) { return lo == 0.0 ? k.power : lo == 1.0 ? k.log_power : 0.0; },
          [](const Composed& k) {
            const DensityPiece& b = *k.base;
            const MonotoneMap& phi = k.map;
            if (phi.increasing()) return (b.order_at_lo() + 1) / phi.local_order(b.lo) - 1;
            if (std::isinf(b.hi)) return -b.tail_exponent() - 2;
            return (b.order_at_hi() + 1) / phi.local_order(b.hi) - 1;
          },
          [&](const RiemannLiouville& k) { return source_order_at(*k.source, lo) + k.alpha; },
      },
      kernel);
}

double DensityPiece::order_at_hi() const {
  if (std::isinf(hi)) return nan;
  return std::visit(
      overloaded{
          [](const BetaKernel& k) { return k.b - 1; },
          [&](const LogPower& k) { return hi == 1.0 ? k.log_power : 0.0; },
          [](const Composed& k) {
            const DensityPiece& b = *k.base;
            const MonotoneMap& phi = k.map;
            if (phi.increasing()) return (b.order_at_hi() + 1) / phi.local_order(b.hi) - 1;
            return (b.order_at_lo() + 1) / phi.local_order(b.lo) - 1;
          },
          [](const auto&) { return 0.0; },
      },
      kernel);
}

double DensityPiece::tail_exponent() const {
  if (std::isfinite(hi)) return -infinity;
  return std::visit(
      overloaded{
          [](const PowerExp& k) {
            return k.rate > 0 ? -infinity : k.rate == 0 ? k.power : infinity;
          },
          [](const LinnikRational& k) { return -k.rho - 1; },
          [](const LampertiCdf&) { return 0.0; },
          [](const BetaKernel&) { return -infinity; },
          [](const LogPower& k) { return k.power; },
          [](const Composed& k) {
            const DensityPiece& b = *k.base;
            const MonotoneMap& phi = k.map;
            if (phi.increasing()) return (b.tail_exponent() + 1) / phi.growth_order() - 1;
            return -b.order_at_lo() - 2;
          },
          [](const RiemannLiouville& k) {
            return std::max(source_tail(*k.source) + k.alpha, k.alpha - 1);
          },
      },
      kernel);
}

bool DensityPiece::log_corrected() const {
  return std::visit(overloaded{
                        [](const LogPower& k) { return k.log_power != 0.0; },
                        [](const Composed& k) { return k.base->log_corrected(); },
                        [](const RiemannLiouville& k) {
                          for (const auto& p : k.source->pieces())
                            if (p.log_corrected()) return true;
                          return false;
                        },
                        [](const auto&) { return false; },
                    },
                    kernel);
}

std::string DensityPiece::tag() const {
  return std::visit(overloaded{
                        [](const PowerExp&) { return std::string("power_exp"); },
                        [](const LinnikRational&) { return std::string("linnik_rational"); },
                        [](const LampertiCdf&) { return std::string("lamperti_cdf"); },
                        [](const BetaKernel&) { return std::string("beta"); },
                        [](const LogPower&) { return std::string("log_power"); },
                        [](const Composed&) { return std::string("composed"); },
                        [](const RiemannLiouville&) { return std::string("riemann_liouville"); },
                    },
                    kernel);
}

// ---- AtomTrain ----------------------------------------------------------------------------

double AtomTrain::location(double k) const {
  double x = std::isinf(k) ? (step > 0 ? infinity : -infinity) : first + k * step;
  for (const auto& m : maps) x = m(x);
  return x;
}

bool AtomTrain::linear() const {
  return std::all_of(maps.begin(), maps.end(),
                     [](const MonotoneMap& m) { return m.kind() == MapKind::affine; });
}

double AtomTrain::counting_exponent() const {
  double e = 0.0;
  for (const auto& m : maps) {
    if (!m.increasing()) return nan;
    e = (e + 1) / m.growth_order() - 1;
  }
  return e;
}

bool AtomTrain::increasing() const {
  bool inc = step > 0;
  for (const auto& m : maps)
    if (!m.increasing()) inc = !inc;
  return inc;
}

// ---- RadialMeasure ------------------------------------------------------------------------

RadialMeasure::RadialMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                             std::vector<AtomTrain> trains)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)), trains_(std::move(trains)) {
  for (const auto& a : atoms_) {
    if (!(a.weight > 0) || !std::isfinite(a.weight) || !std::isfinite(a.location))
      throw ParameterError("atoms need a finite location and a positive finite weight");
  }
  for (const auto& p : pieces_) {
    if (!(p.hi > p.lo) || !std::isfinite(p.lo) || !(p.coef > 0) || !std::isfinite(p.coef))
      throw ParameterError("density pieces need lo < hi and a positive coefficient");
  }
  for (const auto& t : trains_) {
    if (!(t.weight > 0) || !(t.step != 0) || !std::isfinite(t.first) || !std::isfinite(t.step))
      throw ParameterError("atom trains need a positive weight and a nonzero finite step");
  }
  std::vector<std::pair<double, double>> spans;
  for (const auto& p : pieces_) spans.emplace_back(p.lo, p.hi);
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second)
      throw ParameterError("density pieces must have disjoint interiors");
  }
}

RadialMeasure RadialMeasure::atom(double location, double weight) {
  return RadialMeasure({Atom{location, weight, nullptr}}, {});
}

RadialMeasure RadialMeasure::piece(DensityPiece p) { return RadialMeasure({}, {std::move(p)}); }

RadialMeasure RadialMeasure::train(AtomTrain t) { return RadialMeasure({}, {}, {std::move(t)}); }

RadialMeasure RadialMeasure::operator+(const RadialMeasure& other) const {
  auto atoms = atoms_;
  auto pieces = pieces_;
  auto trains = trains_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  pieces.insert(pieces.end(), other.pieces_.begin(), other.pieces_.end());
  trains.insert(trains.end(), other.trains_.begin(), other.trains_.end());
  return RadialMeasure(std::move(atoms), std::move(pieces), std::move(trains));
}

bool identical(const RadialMeasure& a, const RadialMeasure& b) {
  if (a.atoms().size() != b.atoms().size() || a.pieces().size() != b.pieces().size() ||
      a.trains().size() != b.trains().size())
    return false;
  for (std::size_t i = 0; i < a.atoms().size(); ++i) {
    if (a.atoms()[i].location != b.atoms()[i].location || a.atoms()[i].weight != b.atoms()[i].weight)
      return false;
  }
  for (std::size_t i = 0; i < a.pieces().size(); ++i) {
    if (!same_piece(a.pieces()[i], b.pieces()[i])) return false;
  }
  for (std::size_t i = 0; i < a.trains().size(); ++i) {
    const auto &x = a.trains()[i], &y = b.trains()[i];
    if (x.first != y.first || x.step != y.step || x.weight != y.weight || x.maps != y.maps)
      return false;
  }
  return true;
}

RadialMeasure scale(const RadialMeasure& m, double factor) {
  if (!(factor > 0) || !std::isfinite(factor)) throw ParameterError("scale factor must be positive");
  std::vector<Atom> atoms;
  std::vector<DensityPiece> pieces;
  std::vector<AtomTrain> trains;
  for (const auto& a : m.atoms()) atoms.push_back(scaled_atom(a, factor));
  for (const auto& p : m.pieces()) pieces.push_back(scaled_piece(p, factor));
  for (auto t : m.trains()) {
    t.weight *= factor;
    trains.push_back(std::move(t));
  }
  return RadialMeasure(std::move(atoms), std::move(pieces), std::move(trains));
}

LaplaceResult laplace(const RadialMeasure& m, double r) {
  require_positive_rate(r);
  return laplace_measure(m, r);
}

RadialMeasure pushforward(const RadialMeasure& m, const MonotoneMap& phi) {
  if (m.empty()) return m;
  const Interval dom = phi.domain();
  const double tol_lo = default_atom_tolerance(dom.lo), tol_hi = default_atom_tolerance(dom.hi);
  const auto inf = support_inf(m), sup = support_sup(m);
  if (inf.value < dom.lo - tol_lo || sup.value > dom.hi + tol_hi) {
    std::ostringstream out;
    out.precision(17);
    out << "support [" << inf.value << ", " << sup.value << "] not inside the domain [" << dom.lo
        << ", " << dom.hi << "] of " << phi.name();
    throw PreconditionError("support_in_domain", out.str());
  }
  std::vector<Atom> atoms;
  std::vector<DensityPiece> pieces;
  std::vector<AtomTrain> trains;
  for (const auto& a : m.atoms()) atoms.push_back(push_atom(a, phi));
  for (const auto& p : m.pieces()) pieces.push_back(push_piece(p, phi));
  for (const auto& t : m.trains()) trains.push_back(push_train(t, phi));
  return RadialMeasure(std::move(atoms), std::move(pieces), std::move(trains));
}

RadialMeasure shift(const RadialMeasure& m, double theta, bool radial) {
  if (!std::isfinite(theta)) throw ParameterError("shift needs a finite theta");
  if (theta == 0.0) return m;
  RadialMeasure out = pushforward(m, MonotoneMap::shift(theta));
  if (radial && !out.empty()) {
    const double inf = support_inf(out).value;
    if (inf < -default_atom_tolerance(theta)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "shift by " << theta << " moves the support to start at " << inf;
      throw PreconditionError("radial_support", msg.str());
    }
  }
  return out;
}

SupportBound support_inf(const RadialMeasure& m) {
  if (m.empty()) return {infinity, true};
  double v = infinity;
  for (const auto& a : m.atoms()) v = std::min(v, a.location);
  for (const auto& p : m.pieces()) v = std::min(v, p.lo);
  for (const auto& t : m.trains()) v = std::min({v, t.location(0), location_at_infinity(t)});
  return {v, false};
}

SupportBound support_sup(const RadialMeasure& m) {
  if (m.empty()) return {0.0, true};
  double v = -infinity;
  for (const auto& a : m.atoms()) v = std::max(v, a.location);
  for (const auto& p : m.pieces()) v = std::max(v, p.hi);
  for (const auto& t : m.trains()) v = std::max({v, t.location(0), location_at_infinity(t)});
  return {v, false};
}

bool has_atom_at(const RadialMeasure& m, double x) { return has_atom_at(m, x, default_atom_tolerance(x)); }

bool has_atom_at(const RadialMeasure& m, double x, double tol) {
  for (const auto& a : m.atoms())
    if (std::abs(a.location - x) <= tol) return true;
  for (const auto& t : m.trains()) {
    const auto [k0, k1] = index_range(t, x - tol, x + tol);
    if (k0 <= k1 && std::isfinite(k0)) return true;
  }
  return false;
}

ValidityReport validate_thorin(const RadialMeasure& plus, const RadialMeasure& minus) {
  ValidityReport rep;
  const auto side_checks = [&](const RadialMeasure& m, const std::string& side) {
    // int_(0,1] |log s| dm < inf
    ValidityCheck near{side, "log_moment_at_zero", true, "analytic", "finite"};
    bool undecided = false;
    for (const auto& a : m.atoms()) {
      if (a.location <= 0.0) {
        near.passed = false;
        near.detail = "atom at zero";
      }
    }
    for (const auto& p : m.pieces()) {
      if (p.lo > 0.0) continue;
      const double o = p.order_at_lo();
      if (o < -1 || (o == -1 && !p.log_corrected())) {
        near.passed = false;
        near.detail = p.tag() + " has order " + std::to_string(o) + " at zero";
      } else if (o == -1) {
        undecided = true;
      }
    }
    for (const auto& t : m.trains())
      if (!t.increasing() || t.location(0) <= 0.0) undecided = true;
    if (near.passed && undecided) {
      std::vector<double> delta;
      double upper = 1.0;
      for (int k = 1; k <= 6; ++k) {
        const double lower = std::pow(10.0, -2.0 * k);
        delta.push_back(integrate(
                            m, [](const Point& p) { return std::abs(std::log(p.s)); }, lower,
                            std::nextafter(upper, 0.0))
                            .value);
        upper = lower;
      }
      near.method = "numeric";
      near.passed = !shells_diverge(delta, near.detail);
    }
    // int_[1,inf) s^-2 dm < inf
    ValidityCheck far{side, "inverse_square_tail", true, "analytic", "finite"};
    undecided = false;
    for (const auto& p : m.pieces()) {
      if (std::isfinite(p.hi)) continue;
      const double e = p.tail_exponent();
      if (e > 1 || (e == 1 && !p.log_corrected())) {
        far.passed = false;
        far.detail = p.tag() + " has tail exponent " + std::to_string(e);
      } else if (e == 1) {
        undecided = true;
      }
    }
    for (const auto& t : m.trains()) {
      const double e = t.counting_exponent();
      if (std::isnan(e)) {
        undecided = undecided || std::isinf(location_at_infinity(t));
      } else if (e >= 1) {
        far.passed = false;
        far.detail = "atom train with counting exponent " + std::to_string(e);
      }
    }
    if (far.passed && undecided) {
      std::vector<double> delta;
      double lower = 1.0;
      for (int k = 1; k <= 6; ++k) {
        const double upper = std::pow(10.0, 2.0 * k);
        delta.push_back(integrate(
                            m, [](const Point& p) { return 1.0 / (p.s * p.s); }, lower,
                            std::nextafter(upper, 0.0))
                            .value);
        lower = upper;
      }
      far.method = "numeric";
      far.passed = !shells_diverge(delta, far.detail);
    }
    rep.valid = rep.valid && near.passed && far.passed;
    rep.checks.push_back(near);
    rep.checks.push_back(far);
  };
  side_checks(plus, "plus");
  side_checks(minus, "minus");
  return rep;
}

RadialMeasure fractional_integral(const RadialMeasure& m, double alpha) {
  if (!(alpha > 0 && alpha < 2)) throw ParameterError("fractional order must lie in (0, 2)");
  if (m.empty()) return m;
  if (m.pieces().empty() && m.trains().empty() && m.atoms().size() == 1) {
    const Atom& a = m.atoms()[0];
    return RadialMeasure::piece(DensityPiece{a.location, infinity, a.weight / std::tgamma(alpha),
                                             PowerExp{alpha - 1, 0.0}, nullptr});
  }
  if (alpha == 1.0 && m.atoms().empty() && m.trains().empty() && m.pieces().size() == 1) {
    const DensityPiece& p = m.pieces()[0];
    if (const auto* k = std::get_if<LinnikRational>(&p.kernel); k && std::isinf(p.hi)) {
      return RadialMeasure::piece(
          DensityPiece{p.lo, infinity, p.coef, LampertiCdf{k->rho, k->beta}, nullptr});
    }
  }
  auto src = std::make_shared<RadialMeasure>(m);
  return RadialMeasure::piece(
      DensityPiece{support_inf(m).value, infinity, 1.0, RiemannLiouville{src, alpha}, nullptr});
}

MomentResult moment_integral(const RadialMeasure& m, double p, Region region) {
  MomentResult out;
  const bool inner = region == Region::inner;
  const double a = inner ? 0.0 : 1.0;
  const double b = inner ? std::nextafter(1.0, 0.0) : infinity;
  for (const auto& at : m.atoms()) {
    if (at.location < a || at.location > b) continue;
    if (at.location == 0.0 && p > 0) return {infinity, false, 0.0};
    out.value += at.weight * std::pow(at.location, -p);
  }
  const auto power = [p](const Point& pt) { return std::pow(pt.s, -p); };
  for (const auto& pc : m.pieces()) {
    if (inner && pc.lo == 0.0) {
      const double o = pc.order_at_lo() - p;
      if (o < -1 || (o == -1 && !pc.log_corrected())) return {infinity, false, 0.0};
    }
    if (!inner && std::isinf(pc.hi)) {
      const double e = pc.tail_exponent() - p;
      if (e > -1 || (e == -1 && !pc.log_corrected())) return {infinity, false, 0.0};
    }
    const auto e = integrate_piece(pc, power, a, b, 1e-12);
    if (!std::isfinite(e.value)) return {infinity, false, 0.0};
    out.value += e.value;
    out.error += e.error;
  }
  for (const auto& t : m.trains()) {
    if (!inner && t.increasing() && t.counting_exponent() - p >= -1) return {infinity, false, 0.0};
    const auto e = sum_train(t, [p](double s) { return std::pow(s, -p); }, a, b);
    if (!std::isfinite(e.value)) return {infinity, false, 0.0};
    out.value += e.value;
    out.error += e.error;
  }
  return out;
}

MomentResult total_mass(const RadialMeasure& m) {
  MomentResult out;
  for (const auto& a : m.atoms()) out.value += a.weight;
  if (!m.trains().empty()) return {infinity, false, 0.0};
  for (const auto& p : m.pieces()) {
    if (p.order_at_lo() <= -1 || (std::isfinite(p.hi) && p.order_at_hi() <= -1) ||
        (std::isinf(p.hi) && p.tail_exponent() >= -1))
      return {infinity, false, 0.0};
    const auto e = integrate_piece(p, [](const Point&) { return 1.0; }, p.lo, p.hi, 1e-12);
    out.value += e.value;
    out.error += e.error;
  }
  return out;
}

quad::Estimate integrate(const RadialMeasure& m, const PointFunction& f, double a, double b,
                         double tol) {
  quad::Estimate out;
  for (const auto& at : m.atoms()) {
    if (at.location < a || at.location > b) continue;
    const double s = at.location;
    out.value += at.weight * f(Point{s, 0.0, 0.0, s - a, b - s});
  }
  for (const auto& p : m.pieces()) out = out + integrate_piece(p, f, a, b, tol);
  for (const auto& t : m.trains()) {
    out = out + sum_train(
                    t, [&](double s) { return f(Point{s, 0.0, 0.0, s - a, b - s}); }, a, b);
  }
  return out;
}

quad::Estimate sum_train(const AtomTrain& t, const std::function<double(double)>& g, double a,
                         double b) {
  const auto [k0, k1] = index_range(t, a, b);
  quad::Estimate out;
  if (!(k0 <= k1) || std::isinf(k0)) return out;
  constexpr double direct_terms = 256;
  const double last_direct = std::min(k1, k0 + direct_terms - 1);
  double sum = 0.0;
  for (double k = k0; k <= last_direct; k += 1.0) sum += g(t.location(k));
  out.value = t.weight * sum;
  if (last_direct == k1) return out;
  if (std::isfinite(k1)) {
    for (double k = last_direct + 1; k <= k1; k += 1.0) sum += g(t.location(k));
    out.value = t.weight * sum;
    return out;
  }
  // Euler-Maclaurin tail from K: int_K^inf G + G(K)/2 - G'(K)/12 + G'''(K)/720
  const double K = last_direct + 1;
  const auto G = [&](double k) { return g(t.location(k)); };
  const auto integral = quad::half_line(G, K, 1e-13);
  const double h = 1.0;
  const double gp2 = G(K + 2 * h), gp1 = G(K + h), g0 = G(K), gm1 = G(K - h), gm2 = G(K - 2 * h);
  const double d1 = (-gp2 + 8 * gp1 - 8 * gm1 + gm2) / (12 * h);
  const double d3 = (gp2 - 2 * gp1 + 2 * gm1 - gm2) / (2 * h * h * h);
  const double tail = integral.value + 0.5 * g0 - d1 / 12 + d3 / 720;
  out.value = t.weight * (sum + tail);
  out.error = t.weight * (integral.error + std::abs(d3) / 720);
  out.converged = integral.converged;
  return out;
}

bool tail_exponent_consistent(const DensityPiece& p) {
  if (std::isfinite(p.hi)) return true;
  const double e = p.tail_exponent();
  const double x = 1e8 * (1.0 + std::abs(p.lo));
  const double v1 = p.value(x), v2 = p.value(2 * x);
  if (e == -infinity) return v1 == 0.0 || v2 / v1 < std::pow(2.0, -20);
  if (e == infinity) return v1 > 0 && v2 / v1 > std::pow(2.0, 20);
  if (!(v1 > 0)) return false;
  return std::abs(v2 / v1 / std::pow(2.0, e) - 1.0) <= 0.05;
}

}  // namespace thorin::measure
