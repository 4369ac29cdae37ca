#include "thorin/simulate.hpp"

#include "thorin/analysis.hpp"
#include "thorin/errors.hpp"
#include "thorin/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

namespace thorin::simulate {

namespace {

using Engine = std::mt19937_64;
constexpr std::size_t block_size = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Block b always draws from the same stream, so the output does not depend on scheduling.
Engine block_engine(std::uint64_t seed, std::size_t block) {
  std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(block + 1))};
  return Engine(seq);
}

using Draw = std::function<double(Engine&)>;

// A fresh draw functor per block keeps distribution caches out of the shared state.
std::vector<double> run_blocks(std::size_t n, std::uint64_t seed, const std::function<Draw()>& make_draw) {
  if (n == 0) throw ParameterError("n_paths must be at least 1");
  std::vector<double> out(n);
  const std::size_t blocks = (n + block_size - 1) / block_size;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(blocks, std::max(1u, std::min(8u, std::thread::hardware_concurrency()))));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t b = w; b < blocks; b += workers) {
          Engine eng = block_engine(seed, b);
          Draw draw = make_draw();
          const std::size_t end = std::min(n, (b + 1) * block_size);
          for (std::size_t i = b * block_size; i < end; ++i) out[i] = draw(eng);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double gamma_draw(Engine& eng, double shape, double rate) {
  if (shape <= 0.0) return 0.0;
  return std::gamma_distribution<double>(shape, 1.0 / rate)(eng);
}

// Inverse Gaussian IG(mean mu, shape l) by the two-root transformation method.
double inverse_gaussian(Engine& eng, double mu, double l) {
  const double nu = std::normal_distribution<double>()(eng);
  const double y = nu * nu;
  const double x = mu + mu * mu * y / (2.0 * l) - mu / (2.0 * l) * std::sqrt(4.0 * mu * l * y + mu * mu * y * y);
  const double u = std::uniform_real_distribution<double>()(eng);
  return u <= mu / (mu + x) ? x : mu * mu / x;
}

// Positive stable with E e^(-uS) = e^(-c u^alpha), Kanter's representation.
double positive_stable(Engine& eng, double alpha, double c) {
  const double u = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(eng);
  const double e = std::exponential_distribution<double>()(eng);
  const double a = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) * std::sin((1.0 - alpha) * u) /
                   std::pow(std::sin(u), 1.0 / (1.0 - alpha));
  return std::pow(c, 1.0 / alpha) * std::pow(a / e, (1.0 - alpha) / alpha);
}

// Tempered stable subordinator with Levy density lambda x^(-1-alpha) e^(-beta x) at time t.
// Stable proposals accepted with probability e^(-beta S) give the exact law; the time is split
// into m pieces so each acceptance rate is at least 1/2.
double tempered_stable(Engine& eng, double lambda, double alpha, double beta, double t) {
  if (alpha == 0.5) {
    const double l = 2.0 * std::numbers::pi * lambda * lambda * t * t;
    return inverse_gaussian(eng, std::sqrt(l / (2.0 * beta)), l);
  }
  const double c_total = lambda * -std::tgamma(-alpha) * t;
  const double cost = c_total * std::pow(beta, alpha);
  const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(cost / std::numbers::ln2)));
  const double c = c_total / static_cast<double>(m);
  std::uniform_real_distribution<double> unif;
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (;;) {
      const double s = positive_stable(eng, alpha, c);
      if (unif(eng) <= std::exp(-beta * s)) {
        sum += s;
        break;
      }
    }
  }
  return sum;
}

Sample inverse_cdf(const SimSpec& s) {
  analysis::DensityGrid g;
  try {
    g = analysis::pdf(s.model.triplet, s.t_len);
  } catch (const PreconditionError& e) {
    throw PreconditionError("pdf_available", "no exact sampler for '" + s.model.name +
                                                 "' and the FFT density is unavailable: " + e.what());
  }
  const auto c = analysis::cdf(g);
  // 2^14 knots, running maximum for monotonicity
  const std::size_t stride = std::max<std::size_t>(1, g.x.size() / (std::size_t{1} << 14));
  std::vector<double> kx, kc;
  double run = 0.0;
  for (std::size_t k = 0; k < g.x.size(); k += stride) {
    run = std::max(run, c[k]);
    kx.push_back(g.x[k]);
    kc.push_back(run);
  }
  Sample out;
  out.route = "inverse_cdf";
  out.knot_spacing = g.dx * static_cast<double>(stride);
  out.tail_mass = std::max(0.0, kc.front()) + std::max(0.0, 1.0 - kc.back());
  out.values = run_blocks(s.n_paths, s.seed, [&]() -> Draw {
    return [&kx, &kc](Engine& eng) {
      const double u = std::uniform_real_distribution<double>()(eng);
      const auto it = std::upper_bound(kc.begin(), kc.end(), u);
      if (it == kc.begin()) return kx.front();
      if (it == kc.end()) return kx.back();
      const std::size_t k = static_cast<std::size_t>(it - kc.begin());
      const double w = (u - kc[k - 1]) / (kc[k] - kc[k - 1]);
      return kx[k - 1] + w * (kx[k] - kx[k - 1]);
    };
  });
  return out;
}

void check_atomic(const subordinate::LgnbcQuadruplet& q) {
  const auto report = subordinate::lgnbc_validate(q);
  if (!report.valid) throw PreconditionError("lgnbc_quadruplet", report.issues.front());
  if (!q.pi.pieces().empty() || !q.pi.trains().empty())
    throw UnsupportedError("LGNBC sampling needs an atomic pi");
}

// c t + alpha (P_t + sum_i NB(q_i, w_i t)), NB drawn as Poisson over gamma
double lgnbc_draw(Engine& eng, const subordinate::LgnbcQuadruplet& q, double t) {
  double count = 0.0;
  if (q.a_poisson > 0.0) count += static_cast<double>(std::poisson_distribution<long long>(q.a_poisson * t)(eng));
  for (const auto& a : q.pi.atoms()) {
    if (a.location <= 0.0) continue;
    const double g = gamma_draw(eng, a.weight * t, (1.0 - a.location) / a.location);
    if (g > 0.0) count += static_cast<double>(std::poisson_distribution<long long>(g)(eng));
  }
  return q.c * t + q.alpha_scale * count;
}

}  // namespace

Sample sample_increments(const SimSpec& s) {
  if (!(s.t_len > 0.0)) throw ParameterError("t_len must be positive");
  if (s.n_paths == 0) throw ParameterError("n_paths must be at least 1");
  const auto& p = s.model.params;
  const auto at = [&](const char* k) { return p.at(k); };
  const double t = s.t_len;
  const std::string& name = s.model.name;
  Sample out;
  out.route = "exact";
  if (name == "gamma") {
    const double lambda = at("lambda"), theta = at("theta");
    out.values = run_blocks(s.n_paths, s.seed, [=]() -> Draw {
      return [=](Engine& eng) { return gamma_draw(eng, lambda * t, theta); };
    });
  } else if (name == "bilgamma") {
    const double lp = at("lambda_plus"), tp = at("theta_plus"), lm = at("lambda_minus"), tm = at("theta_minus");
    out.values = run_blocks(s.n_paths, s.seed, [=]() -> Draw {
      return [=](Engine& eng) { return gamma_draw(eng, lp * t, tp) - gamma_draw(eng, lm * t, tm); };
    });
  } else if (name == "vg" || name == "nts") {
    const double lambda = at("lambda"), beta = at("beta"), theta = at("theta"), sigma = at("sigma");
    const bool vg = name == "vg";
    const double alpha = vg ? 0.0 : at("alpha");
    out.values = run_blocks(s.n_paths, s.seed, [=]() -> Draw {
      return [=](Engine& eng) {
        const double tau = vg ? gamma_draw(eng, lambda * t, beta) : tempered_stable(eng, lambda, alpha, beta, t);
        return theta * tau + sigma * std::sqrt(tau) * std::normal_distribution<double>()(eng);
      };
    });
  } else {
    return inverse_cdf(s);
  }
  return out;
}

std::vector<double> sample_lgnbc(const subordinate::LgnbcQuadruplet& q, double t_len, std::size_t n,
                                 std::uint64_t seed) {
  if (!(t_len > 0.0)) throw ParameterError("t_len must be positive");
  check_atomic(q);
  return run_blocks(n, seed, [&]() -> Draw { return [&](Engine& eng) { return lgnbc_draw(eng, q, t_len); }; });
}

std::vector<double> sample_lgnbc_gamma(const subordinate::LgnbcQuadruplet& q, double alpha, double beta,
                                       double t_len, std::size_t n, std::uint64_t seed) {
  if (!(t_len > 0.0)) throw ParameterError("t_len must be positive");
  if (!(alpha > 0.0 && beta > 0.0)) throw ParameterError("gamma parameters must be positive");
  check_atomic(q);
  return run_blocks(n, seed, [&]() -> Draw {
    return [&](Engine& eng) { return gamma_draw(eng, alpha * lgnbc_draw(eng, q, t_len), beta); };
  });
}

namespace {

struct PowerSums {
  double n = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
};

std::vector<double> kstats(const PowerSums& p, int up_to) {
  const double n = p.n, s1 = p.s1, s2 = p.s2, s3 = p.s3, s4 = p.s4;
  std::vector<double> k;
  k.push_back(s1 / n);
  if (up_to >= 2) k.push_back((n * s2 - s1 * s1) / (n * (n - 1)));
  if (up_to >= 3) k.push_back((2 * s1 * s1 * s1 - 3 * n * s1 * s2 + n * n * s3) / (n * (n - 1) * (n - 2)));
  if (up_to >= 4)
    k.push_back((-6 * std::pow(s1, 4) + 12 * n * s1 * s1 * s2 - 3 * n * (n - 1) * s2 * s2 - 4 * n * (n + 1) * s1 * s3 +
                 n * n * (n + 1) * s4) /
                (n * (n - 1) * (n - 2) * (n - 3)));
  return k;
}

}  // namespace

std::vector<CumulantEstimate> k_statistics(const std::vector<double>& x, int up_to) {
  if (up_to < 1 || up_to > 4) throw ParameterError("k-statistics are available for orders 1..4");
  if (x.size() < static_cast<std::size_t>(up_to) + 2) throw ParameterError("too few samples for the requested order");
  // centering keeps the power sums well conditioned; only k_1 moves
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  PowerSums all;
  all.n = static_cast<double>(x.size());
  for (double v : x) {
    const double d = v - mean, d2 = d * d;
    all.s1 += d;
    all.s2 += d2;
    all.s3 += d2 * d;
    all.s4 += d2 * d2;
  }
  const auto full = kstats(all, up_to);
  std::vector<double> acc(up_to, 0.0), acc2(up_to, 0.0);
  for (double v : x) {
    const double d = v - mean, d2 = d * d;
    const PowerSums loo{all.n - 1, all.s1 - d, all.s2 - d2, all.s3 - d2 * d, all.s4 - d2 * d2};
    const auto k = kstats(loo, up_to);
    for (int r = 0; r < up_to; ++r) {
      const double dev = k[r] - full[r];
      acc[r] += dev;
      acc2[r] += dev * dev;
    }
  }
  const double n = all.n;
  std::vector<CumulantEstimate> out;
  for (int r = 0; r < up_to; ++r) {
    const double var = (n - 1) / n * (acc2[r] - acc[r] * acc[r] / n);
    out.push_back({r + 1, full[r] + (r == 0 ? mean : 0.0), std::sqrt(std::max(0.0, var))});
  }
  return out;
}

std::vector<CumulantEstimate> mc_cumulants(const SimSpec& s, int up_to) {
  if (up_to < 1 || up_to > 4) throw ParameterError("k-statistics are available for orders 1..4");
  if (!analysis::moment_exists(s.model.triplet, up_to))
    throw PreconditionError("moment_exists", "cumulant of order " + std::to_string(up_to) + " does not exist for '" +
                                                 s.model.name + "'");
  return k_statistics(sample_increments(s).values, up_to);
}

std::uint64_t model_hash(const catalog::Model& m) {
  const std::string key = model_io::to_json(m).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : key) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string model_hash_hex(const catalog::Model& m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(model_hash(m)));
  return buf;
}

void write_csv(std::ostream& out, const catalog::Model& m, const std::vector<double>& values) {
  out << model_hash_hex(m) << '\n';
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

}  // namespace thorin::simulate
