#include "thorin/catalog.hpp"

#include "thorin/errors.hpp"
#include "thorin/quadrature.hpp"
#include "thorin/specfun.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace thorin::catalog {

using exponent::cplx;
using exponent::ThorinTriplet;
using exponent::Truncation;
using measure::AtomTrain;
using measure::DensityPiece;
using measure::infinity;
using measure::RadialMeasure;

namespace {

constexpr double euler_gamma = std::numbers::egamma;
const cplx I(0.0, 1.0);

const std::vector<Family> registry{
    {"gamma", {"lambda", "theta"}, "gamma law Gamma(lambda, theta), tau+ = lambda delta_theta"},
    {"bilgamma",
     {"lambda_plus", "theta_plus", "lambda_minus", "theta_minus"},
     "bilateral gamma, tau+- = lambda+- delta_theta+-"},
    {"stable", {"alpha", "lambda_plus", "lambda_minus"}, "stable with k(x) = lambda+- |x|^-alpha"},
    {"cts",
     {"alpha", "lambda_plus", "lambda_minus", "theta_plus", "theta_minus"},
     "classical tempered stable, k(x) = lambda+- |x|^-alpha e^(-theta+- |x|)"},
    {"grgts",
     {"alpha", "rho", "kappa", "theta", "lambda"},
     "generalized radially geometric tempered stable, k(r) = lambda r^-alpha e^(-theta r) E_rho(-kappa r^rho)"},
    {"rgts_linnik", {"rho", "kappa", "theta", "lambda"}, "tempered positive Linnik, k(r) = lambda e^(-theta r) E_rho(-kappa r^rho)"},
    {"gzd", {"c_plus", "c_minus", "sigma", "lambda"}, "generalized z-distribution"},
    {"meixner", {"c", "sigma", "lambda"}, "Meixner, the generalized z law with c+- = 1/2 +- c"},
    {"gumbel", {"sigma"}, "centered Gumbel"},
    {"vg", {"lambda", "beta", "theta", "sigma"}, "Brownian motion run on a Gamma(lambda, beta) subordinator"},
    {"nts",
     {"lambda", "alpha", "beta", "theta", "sigma"},
     "Brownian motion run on a tempered stable subordinator with Levy density lambda s^(-alpha-1) e^(-beta s)"},
    {"nl",
     {"lambda", "rho", "kappa", "beta", "theta", "sigma"},
     "Brownian motion run on a tempered positive Linnik subordinator"},
};

void require(bool ok, const std::string& family, const std::string& what) {
  if (!ok) throw ParameterError(family + ": " + what);
}

Params checked(const Family& f, const Params& given) {
  std::vector<std::string> issues;
  for (const auto& name : f.params) {
    const auto it = given.find(name);
    if (it == given.end()) {
      issues.push_back("missing parameter '" + name + "'");
    } else if (!std::isfinite(it->second)) {
      issues.push_back("parameter '" + name + "' must be finite");
    }
  }
  const std::set<std::string> known(f.params.begin(), f.params.end());
  for (const auto& [name, value] : given) {
    if (!known.count(name)) issues.push_back("unexpected parameter '" + name + "'");
  }
  if (!issues.empty()) {
    std::ostringstream msg;
    msg << f.name << ":";
    for (const auto& s : issues) msg << " " << s << ";";
    throw ParameterError(msg.str());
  }
  return given;
}

RadialMeasure atom_if(double location, double weight) {
  return weight > 0.0 ? RadialMeasure::atom(location, weight) : RadialMeasure{};
}

// lambda s^(alpha-1)/Gamma(alpha) on (start, inf)
RadialMeasure power_tail(double lambda, double start, double alpha) {
  if (lambda == 0.0) return {};
  return RadialMeasure::piece(
      DensityPiece{start, infinity, lambda / std::tgamma(alpha), measure::PowerExp{alpha - 1.0, 0.0}, nullptr});
}

// lambda times the Linnik-rational law shifted to theta; rho = 1 is the point mass at theta + kappa
RadialMeasure linnik(double lambda, double rho, double kappa, double theta) {
  if (rho == 1.0) return RadialMeasure::atom(theta + kappa, lambda);
  return RadialMeasure::piece(DensityPiece{theta, infinity, lambda, measure::LinnikRational{rho, kappa}, nullptr});
}

RadialMeasure z_train(double c, double sigma, double weight) {
  return RadialMeasure::train(AtomTrain{c / sigma, 1.0 / sigma, weight, {}});
}

// lambda Gamma(-alpha) ((theta - iz)^alpha - theta^alpha + iz alpha theta^(alpha-1)), centered
cplx cts_side(double lambda, double alpha, double theta, double z) {
  if (lambda == 0.0) return 0.0;
  if (alpha == 1.0) return lambda * ((theta - I * z) * std::log(1.0 - I * z / theta) + I * z);
  return lambda * std::tgamma(-alpha) *
         (std::pow(cplx(theta, -z), alpha) - std::pow(theta, alpha) + I * z * alpha * std::pow(theta, alpha - 1.0));
}

double nts_k(double x, double lambda, double alpha, double beta, double sigma, double theta) {
  const double s2 = sigma * sigma, kappa2 = theta * theta + 2.0 * beta * s2, ax = std::abs(x);
  return 2.0 * lambda / (std::sqrt(2.0 * std::numbers::pi) * sigma) * std::pow(kappa2, alpha / 2.0 + 0.25) *
         std::exp(x * theta / s2) * std::pow(ax, 0.5 - alpha) *
         specfun::bessel_k(alpha + 0.5, ax * std::sqrt(kappa2) / s2).value;
}

Model brownian(const std::string& name, const Params& p, subordinate::GgcSubordinator t, double sigma,
               double theta) {
  require(sigma > 0.0, name, "sigma must be positive");
  Model m{name, p, {}, {}, {}, {}, SubordinationInfo{std::move(t), {sigma, theta}}};
  m.triplet = subordinate::brownian_forward(m.subordination->subordinator, m.subordination->parent);
  return m;
}

}  // namespace

const std::vector<Family>& families() { return registry; }

const Family& family(const std::string& name) {
  for (const auto& f : registry) {
    if (f.name == name) return f;
  }
  std::string known;
  for (const auto& f : registry) known += (known.empty() ? "" : ", ") + f.name;
  throw ParameterError("unknown family '" + name + "' (known: " + known + ")");
}

Model make(const std::string& name, const Params& given) {
  const Params p = checked(family(name), given);
  const auto at = [&](const char* key) { return p.at(key); };

  if (name == "gamma") {
    const double lambda = at("lambda"), theta = at("theta");
    require(lambda > 0.0 && theta > 0.0, name, "lambda and theta must be positive");
    Model m{name, p, {0.0, 0.0, RadialMeasure::atom(theta, lambda), {}, Truncation::none}, {}, {}, {}, {}};
    m.psi_ref = [=](double z) { return -lambda * std::log(1.0 - I * z / theta); };
    m.k_ref = [=](double x) { return x > 0.0 ? lambda * std::exp(-theta * x) : 0.0; };
    m.pdf_ref = [=](double x) {
      if (x <= 0.0) return 0.0;
      return std::exp(lambda * std::log(theta) + (lambda - 1.0) * std::log(x) - theta * x - std::lgamma(lambda));
    };
    return m;
  }

  if (name == "bilgamma") {
    const double lp = at("lambda_plus"), tp = at("theta_plus"), lm = at("lambda_minus"), tm = at("theta_minus");
    require(lp >= 0.0 && lm >= 0.0 && lp + lm > 0.0, name, "lambdas must be non-negative and not both zero");
    require(tp > 0.0 && tm > 0.0, name, "thetas must be positive");
    Model m{name, p, {0.0, 0.0, atom_if(tp, lp), atom_if(tm, lm), Truncation::none}, {}, {}, {}, {}};
    m.psi_ref = [=](double z) { return -lp * std::log(1.0 - I * z / tp) - lm * std::log(1.0 + I * z / tm); };
    m.k_ref = [=](double x) { return x > 0.0 ? lp * std::exp(-tp * x) : lm * std::exp(tm * x); };
    return m;
  }

  if (name == "stable") {
    const double alpha = at("alpha"), lp = at("lambda_plus"), lm = at("lambda_minus");
    require(alpha > 0.0 && alpha < 2.0, name, "alpha must lie in (0, 2)");
    require(lp >= 0.0 && lm >= 0.0 && lp + lm > 0.0, name, "lambdas must be non-negative and not both zero");
    const Truncation h = alpha < 1.0 ? Truncation::none : alpha > 1.0 ? Truncation::centered : Truncation::indicator;
    Model m{name, p, {0.0, 0.0, power_tail(lp, 0.0, alpha), power_tail(lm, 0.0, alpha), h}, {}, {}, {}, {}};
    if (alpha != 1.0) {
      m.psi_ref = [=](double z) {
        const double g = std::tgamma(-alpha);
        return lp * g * std::pow(cplx(0.0, -z), alpha) + lm * g * std::pow(cplx(0.0, z), alpha);
      };
    }
    m.k_ref = [=](double x) { return (x > 0.0 ? lp : lm) * std::pow(std::abs(x), -alpha); };
    return m;
  }

  if (name == "cts") {
    const double alpha = at("alpha"), lp = at("lambda_plus"), lm = at("lambda_minus");
    const double tp = at("theta_plus"), tm = at("theta_minus");
    require(alpha > 0.0 && alpha < 2.0, name, "alpha must lie in (0, 2)");
    require(lp >= 0.0 && lm >= 0.0 && lp + lm > 0.0, name, "lambdas must be non-negative and not both zero");
    require(tp > 0.0 && tm > 0.0, name, "thetas must be positive");
    Model m{name, p, {0.0, 0.0, power_tail(lp, tp, alpha), power_tail(lm, tm, alpha), Truncation::centered},
            {}, {}, {}, {}};
    m.psi_ref = [=](double z) { return cts_side(lp, alpha, tp, z) + cts_side(lm, alpha, tm, -z); };
    m.k_ref = [=](double x) {
      const double ax = std::abs(x);
      return (x > 0.0 ? lp * std::exp(-tp * ax) : lm * std::exp(-tm * ax)) * std::pow(ax, -alpha);
    };
    return m;
  }

  if (name == "grgts") {
    const double alpha = at("alpha"), rho = at("rho"), kappa = at("kappa"), theta = at("theta"), lambda = at("lambda");
    require(alpha > 0.0 && alpha < 2.0, name, "alpha must lie in (0, 2)");
    require(rho > 0.0 && rho <= 1.0, name, "rho must lie in (0, 1]");
    require(kappa > 0.0 && lambda > 0.0 && theta >= 0.0, name, "kappa, lambda must be positive and theta non-negative");
    const auto tau = measure::fractional_integral(linnik(lambda, rho, kappa, theta), alpha);
    Model m{name, p, {0.0, 0.0, tau, {}, Truncation::indicator}, {}, {}, {}, {}};
    m.k_ref = [=](double x) {
      if (x <= 0.0) return 0.0;
      return lambda * std::pow(x, -alpha) * std::exp(-theta * x) *
             specfun::mittag_leffler(rho, -kappa * std::pow(x, rho)).value;
    };
    return m;
  }

  if (name == "rgts_linnik") {
    const double rho = at("rho"), kappa = at("kappa"), theta = at("theta"), lambda = at("lambda");
    require(rho > 0.0 && rho <= 1.0, name, "rho must lie in (0, 1]");
    require(kappa > 0.0 && lambda > 0.0 && theta >= 0.0, name, "kappa, lambda must be positive and theta non-negative");
    Model m{name, p, {0.0, 0.0, linnik(lambda, rho, kappa, theta), {}, Truncation::none}, {}, {}, {}, {}};
    m.k_ref = [=](double x) {
      if (x <= 0.0) return 0.0;
      return lambda * std::exp(-theta * x) * specfun::mittag_leffler(rho, -kappa * std::pow(x, rho)).value;
    };
    return m;
  }

  if (name == "gzd" || name == "meixner") {
    double cp, cm;
    if (name == "meixner") {
      const double c = at("c");
      require(std::abs(c) < 0.5, name, "|c| must be below 1/2");
      cp = 0.5 + c;
      cm = 0.5 - c;
    } else {
      cp = at("c_plus");
      cm = at("c_minus");
      require(cp > 0.0 && cm > 0.0, name, "c_plus and c_minus must be positive");
    }
    const double sigma = at("sigma"), lambda = at("lambda");
    require(sigma > 0.0 && lambda > 0.0, name, "sigma and lambda must be positive");
    Model m{name, p, {0.0, 0.0, z_train(cp, sigma, lambda), z_train(cm, sigma, lambda), Truncation::centered},
            {}, {}, {}, {}};
    m.psi_ref = [=](double z) {
      // lambda log(B(c- + iz sigma, c+ - iz sigma)/B(c-, c+)) plus the centering term
      const cplx lb = specfun::log_gamma(cplx(cm, z * sigma)).value + specfun::log_gamma(cplx(cp, -z * sigma)).value -
                      std::lgamma(cm + cp) - std::log(specfun::beta(cm, cp).value);
      return lambda * lb + I * z * lambda * sigma * (specfun::digamma(cp).value - specfun::digamma(cm).value);
    };
    m.k_ref = [=](double x) {
      const double ax = std::abs(x), c = x > 0.0 ? cp : cm;
      return lambda * std::exp(-c * ax / sigma) / -std::expm1(-ax / sigma);
    };
    return m;
  }

  if (name == "gumbel") {
    const double sigma = at("sigma");
    require(sigma > 0.0, name, "sigma must be positive");
    Model m{name, p, {0.0, 0.0, z_train(1.0, sigma, 1.0), {}, Truncation::centered}, {}, {}, {}, {}};
    m.psi_ref = [=](double z) {
      return specfun::log_gamma(cplx(1.0, -z * sigma)).value - I * z * euler_gamma * sigma;
    };
    m.k_ref = [=](double x) { return x > 0.0 ? std::exp(-x / sigma) / -std::expm1(-x / sigma) : 0.0; };
    m.pdf_ref = [=](double x) {
      const double u = (x + euler_gamma * sigma) / sigma;
      return std::exp(-u - std::exp(-u)) / sigma;
    };
    return m;
  }

  if (name == "vg") {
    const double lambda = at("lambda"), beta = at("beta"), theta = at("theta"), sigma = at("sigma");
    require(lambda > 0.0 && beta > 0.0, name, "lambda and beta must be positive");
    Model m = brownian(name, p, {0.0, RadialMeasure::atom(beta, lambda)}, sigma, theta);
    const double s2 = sigma * sigma;
    m.psi_ref = [=](double z) { return -lambda * std::log(1.0 + cplx(s2 * z * z / 2.0, -theta * z) / beta); };
    m.k_ref = [=](double x) {
      return lambda * std::exp(x * theta / s2 - std::abs(x) * std::sqrt(2.0 * s2 * beta + theta * theta) / s2);
    };
    return m;
  }

  if (name == "nts") {
    const double lambda = at("lambda"), alpha = at("alpha"), beta = at("beta"), theta = at("theta"),
                 sigma = at("sigma");
    require(alpha > 0.0 && alpha < 1.0, name, "alpha must lie in (0, 1)");
    require(lambda > 0.0 && beta > 0.0, name, "lambda and beta must be positive");
    Model m = brownian(name, p, {0.0, power_tail(lambda, beta, alpha)}, sigma, theta);
    const double s2 = sigma * sigma;
    m.psi_ref = [=](double z) {
      const cplx w(s2 * z * z / 2.0, -theta * z);
      return lambda * std::tgamma(-alpha) * (std::pow(beta + w, alpha) - std::pow(beta, alpha));
    };
    m.k_ref = [=](double x) { return nts_k(x, lambda, alpha, beta, sigma, theta); };
    return m;
  }

  // nl
  const double lambda = at("lambda"), rho = at("rho"), kappa = at("kappa"), beta = at("beta"), theta = at("theta"),
               sigma = at("sigma");
  require(rho > 0.0 && rho < 1.0, name, "rho must lie in (0, 1)");
  require(lambda > 0.0 && kappa > 0.0 && beta >= 0.0, name, "lambda, kappa must be positive and beta non-negative");
  return brownian(name, p, {0.0, linnik(lambda, rho, kappa, beta)}, sigma, theta);
}

cplx reference_psi(const Model& m, double z) {
  if (!m.psi_ref) throw UnsupportedError("no closed-form exponent for family '" + m.name + "'");
  return m.psi_ref(z);
}

double reference_k(const Model& m, double x) {
  if (!m.k_ref) throw UnsupportedError("no closed-form canonical function for family '" + m.name + "'");
  if (x == 0.0) throw ParameterError("canonical function needs x != 0");
  return m.k_ref(x);
}

double reference_pdf(const Model& m, double x) {
  if (!m.pdf_ref) throw UnsupportedError("no closed-form density for family '" + m.name + "'");
  return m.pdf_ref(x);
}

DickmanEvidence dickman_counterexample(double theta) {
  if (!(theta > 0.0)) throw ParameterError("Dickman theta must be positive");
  DickmanEvidence out;
  out.theta = theta;
  const auto k = [theta](double x) { return x > 0.0 && x < 1.0 ? theta : 0.0; };
  out.dickman = levy::complete_monotonicity(k, levy::default_cm_starts());
  out.gamma_control = levy::complete_monotonicity([](double x) { return std::exp(-x); }, levy::default_cm_starts());
  out.entire_cf = true;
  for (double u : {1.0, 10.0, 100.0, 1000.0}) {
    // k vanishes beyond 1, so the integral over [1, inf) is the one over [1, 2]
    const auto e = quad::finite([&](double x) { return k(x) == 0.0 ? 0.0 : std::exp(u * x) * k(x) / x; }, 1.0, 2.0);
    out.exponential_moments.emplace_back(u, e.value);
    out.entire_cf = out.entire_cf && e.converged && std::isfinite(e.value);
  }
  return out;
}

}  // namespace thorin::catalog
