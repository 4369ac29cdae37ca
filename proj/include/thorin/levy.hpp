#pragma once

#include "thorin/exponent.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace thorin::levy {

// Jump-side view of a Thorin triplet: k(x) = int e^(-|x| s) tau_sign(x)(ds), nu(x) = k(x)/|x|.
class LevyView {
 public:
  explicit LevyView(exponent::ThorinTriplet source) : source_(std::move(source)) {}
  const exponent::ThorinTriplet& source() const { return source_; }

 private:
  exponent::ThorinTriplet source_;
};

double canonical_function(const LevyView& v, double x);
double levy_density(const LevyView& v, double x);
// nu((x, inf)) for x > 0 and nu((-inf, x)) for x < 0, as int E1(|x| s) tau(ds).
double levy_tail(const LevyView& v, double x);

// Density of the q-potential of the jump measure of a standard Brownian motion.
double bm_potential_levy_density(double q, double x);

// int_0^inf e^(-sqrt(2 s)|x|)/|x| rho(ds): jumps of standard Brownian motion run on a
// GGC subordinator with Thorin measure rho and drift b_T (the drift adds no jumps).
double subordinated_levy_density_potential(const measure::RadialMeasure& rho, double b_T, double x);

// int_0^inf N(x; theta s, sigma^2 s) nu_T(s) ds for a Brownian parent with drift theta and
// volatility sigma; nu_T is the Levy density of the subordinator.
double bochner_levy_density(const std::function<double(double)>& subordinator_levy, double theta,
                            double sigma, double x);

// Complete-monotonicity screen on sampled values: on each grid x0 + j h, j <= max_order,
// (-1)^n times the n-th forward difference must not be negative (up to rounding).
struct CmWitness {
  std::vector<double> grid;
  std::vector<double> values;
  int order = 0;
  double difference = 0.0;
};

struct CmReport {
  bool passed = true;
  int grids_checked = 0;
  std::optional<CmWitness> witness;
};

CmReport complete_monotonicity(const std::function<double(double)>& k, const std::vector<double>& starts,
                               int max_order = 6);
// Default grids on (0, 6]: starts 0.05 * 1.35^i with step max(0.1, x0/4).
std::vector<double> default_cm_starts();
// Both sides of a view; the negative side is read as x -> k(-x).
CmReport complete_monotonicity(const LevyView& v, int max_order = 6);

}  // namespace thorin::levy
