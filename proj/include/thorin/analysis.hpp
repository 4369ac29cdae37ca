#pragma once

#include "thorin/exponent.hpp"

#include <optional>
#include <string>
#include <vector>

namespace thorin::analysis {

using exponent::ThorinTriplet;

// inf{p > 0 : int_{s >= 1} s^-p tau(ds) < inf}, which is the index of the jumps; `gaussian`
// flags a Gaussian part (the path variation index is then 2).
struct BgIndex {
  double value = 0.0;
  bool gaussian = false;
  std::string method;  // "analytic" or "numeric"
};

BgIndex bg_index(const ThorinTriplet& t);

// tau+(R+) + tau-(R+) when the index is 0 and the mass is finite.
std::optional<double> activity_zeta(const ThorinTriplet& t);

struct Cumulant {
  double value = 0.0;
  bool exists = true;
};

bool moment_exists(const ThorinTriplet& t, int n);
Cumulant cumulant(const ThorinTriplet& t, int n);

struct CriticalExponent {
  double gamma_plus = 0.0;   // inf supp tau+, +inf when tau+ = 0
  double gamma_minus = 0.0;
  bool mgf_plus = false;     // E e^(gamma+ X) < inf
  bool mgf_minus = false;
  // The moment generating function exists near 0 on both sides.
  bool analytic = false;
  // Entire characteristic function: no jumps at all.
  bool entire = false;
};

CriticalExponent critical_exponent(const ThorinTriplet& t);

// {z : -gamma+ < Im z < gamma-}; a closed end means the exponent extends to that boundary.
struct Strip {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_closed = false;
  bool upper_closed = false;
  bool entire = false;
};

Strip analyticity_strip(const ThorinTriplet& t);

enum class Verdict { yes, no, unknown };
const char* to_string(Verdict v);

struct CeSide {
  Verdict verdict = Verdict::unknown;
  double gamma = 0.0;
  std::string reason;
};

struct ConvolutionEquivalence {
  CeSide plus;
  CeSide minus;
  // verdict of the side(s) carrying the critical exponent min(gamma+, gamma-)
  Verdict overall = Verdict::unknown;
};

ConvolutionEquivalence convolution_equivalent(const ThorinTriplet& t);

struct Regularity {
  bool smooth = false;             // C^inf
  int order = -1;                  // C^order and not C^(order+1) when >= 0 and not smooth
  bool continuous_except_b_star = false;
  std::optional<double> b_star;    // drift without compensation, when finite
  bool unimodal = true;
  std::string label;
};

// Unit time unless `t_len` is given: zeta scales with time.
Regularity density_regularity(const ThorinTriplet& t, double t_len = 1.0);

struct FftOptions {
  std::size_t n = std::size_t{1} << 16;
  std::optional<double> lo;
  std::optional<double> hi;
  // Density of the exponentially tilted law e^(u x) f(x)/E e^(uX) is transformed and the
  // tilt undone on output; gives relative accuracy far in the tail of that side.
  double tilt = 0.0;
  // Subtract gamma kernels matching the singular behaviour at b* for one-sided laws with
  // finite activity.
  bool subtract_singularity = true;
};

struct DensityGrid {
  double lo = 0.0;
  double dx = 0.0;
  std::vector<double> x;
  std::vector<double> pdf;
  double tilt = 0.0;
  double log_mgf_tilt = 0.0;
  // Subtracted part: sum_j weight_j Gamma(shape_j, rate) density at side (x - b_star).
  struct Kernel {
    double weight = 0.0;
    double shape = 0.0;
  };
  std::vector<Kernel> kernels;
  double kernel_rate = 0.0;
  double b_star = 0.0;
  double side = 1.0;
  std::vector<double> residual;  // FFT part, tilted scale
  double mass = 0.0;
  double min_value = 0.0;
  double truncation_estimate = 0.0;
};

DensityGrid pdf(const ThorinTriplet& t, double t_len, const FftOptions& options = {});

// Density at any x inside the window: exact kernels plus linear interpolation of the residual.
double density_at(const DensityGrid& g, double x);
// Distribution function on the grid nodes (untilted densities only).
std::vector<double> cdf(const DensityGrid& g);
double quantile(const DensityGrid& g, const std::vector<double>& cdf_values, double p);

struct TailRatio {
  std::vector<double> x;
  std::vector<double> ratio;  // f(x)|x| / (k(x) E e^(gamma X))
  bool monotone = false;
  double final_deviation = 0.0;
  bool passed = false;
};

// Side is the sign of the grid entries. Refuses (PreconditionError "convolution_equivalence")
// unless the side's verdict is yes.
TailRatio tail_equivalence_check(const ThorinTriplet& t, const std::vector<double>& x_grid, double band = 0.1,
                                 const FftOptions& options = {});

struct PropertyReport {
  BgIndex bg;
  std::optional<double> zeta;
  std::vector<Cumulant> cumulants;  // orders 1..4
  CriticalExponent critical;
  Strip strip;
  ConvolutionEquivalence ce;
  Regularity regularity;
};

PropertyReport report(const ThorinTriplet& t);

}  // namespace thorin::analysis
