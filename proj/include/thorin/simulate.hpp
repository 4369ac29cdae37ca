#pragma once

#include "thorin/catalog.hpp"
#include "thorin/subordinate.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace thorin::simulate {

struct SimSpec {
  catalog::Model model;
  double t_len = 1.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
};

struct Sample {
  std::vector<double> values;
  std::string route;  // "exact" or "inverse_cdf"
  // inverse_cdf only: spacing of the CDF knots (bound on the interpolation error in x) and the
  // probability mass the window leaves out.
  double knot_spacing = 0.0;
  double tail_mass = 0.0;
};

// Draws of X_t. Exact for gamma, bilgamma, vg and nts; every other family goes through the
// FFT distribution function and refuses (PreconditionError) when that density is unavailable.
// Output is identical whatever the number of worker threads.
Sample sample_increments(const SimSpec& s);

// Z_t = c t + alpha (P_t + Q_(T_t)) for an atomic pi; UnsupportedError otherwise.
std::vector<double> sample_lgnbc(const subordinate::LgnbcQuadruplet& q, double t_len, std::size_t n,
                                 std::uint64_t seed);
// Gamma(alpha, beta) process run on the LGNBC subordinator above.
std::vector<double> sample_lgnbc_gamma(const subordinate::LgnbcQuadruplet& q, double alpha, double beta,
                                       double t_len, std::size_t n, std::uint64_t seed);

struct CumulantEstimate {
  int order = 0;
  double value = 0.0;
  double se = 0.0;  // jackknife
};

// Unbiased k-statistics k_1..k_up_to (up_to <= 4).
std::vector<CumulantEstimate> k_statistics(const std::vector<double>& x, int up_to);

// Refuses (PreconditionError "moment_exists") when the cumulant of order up_to does not exist.
std::vector<CumulantEstimate> mc_cumulants(const SimSpec& s, int up_to);

// FNV-1a over the compact JSON model document (decimal numbers round-trip exactly).
std::uint64_t model_hash(const catalog::Model& m);
std::string model_hash_hex(const catalog::Model& m);

// One column, the header is the model hash.
void write_csv(std::ostream& out, const catalog::Model& m, const std::vector<double>& values);

}  // namespace thorin::simulate
