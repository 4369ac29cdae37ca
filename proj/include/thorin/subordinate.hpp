#pragma once

#include "thorin/exponent.hpp"

#include <string>
#include <vector>

namespace thorin::subordinate {

// X_t = sigma W_t + theta t
struct BrownianParent {
  double sigma = 1.0;
  double theta = 0.0;
};

// GGC subordinator with Thorin triplet (a, 0, rho).
struct GgcSubordinator {
  double a = 0.0;
  measure::RadialMeasure rho;
};

void validate(const BrownianParent& x);
void validate(const GgcSubordinator& t);

// Triplet of the subordinator itself, in the indicator convention.
exponent::ThorinTriplet as_triplet(const GgcSubordinator& t);

// Thorin triplet of X run on T: tau+ = (f# rho)^(theta/sigma^2), tau- = (f# rho)^(-theta/sigma^2)
// with f the hyperbolic map, Gaussian part a sigma^2, indicator truncation.
exponent::ThorinTriplet brownian_forward(const GgcSubordinator& t, const BrownianParent& x);

// The drift of brownian_forward on its own.
double forward_drift(const GgcSubordinator& t, const BrownianParent& x);

// Converse for a standard Brownian parent with drift theta: rho = g# tau+^(-theta), g(y) = (y^2 - theta^2)/2.
// The Gaussian part of `t` must vanish; its drift is not used (it follows from rho and theta).
GgcSubordinator brownian_inverse(const exponent::ThorinTriplet& t, double theta);

// Whether tau+^(-theta) = tau-^(theta): atoms within the default atom tolerance, everything
// else structurally or by Laplace transforms on 20 points in [0.1, 10] to 1e-9.
bool shift_symmetric(const measure::RadialMeasure& tau_plus, const measure::RadialMeasure& tau_minus,
                     double theta);

// nu(x) of X run on T, through the inverse Gaussian mixture E[k_rho(Z_x)], Z_x ~ IG(|x/theta|, (x/sigma)^2),
// times exp(2 x theta/sigma^2) when sgn x != sgn theta, divided by |x|. theta = 0 falls back to the
// direct Laplace form of the canonical function.
double subordinated_levy_density_ig(const GgcSubordinator& t, const BrownianParent& x, double z);

// k_rho(x) = int exp(-x (s^2/2 + s theta)) tau+(ds), x > 0.
double subordinator_canonical_from_symmetric(const measure::RadialMeasure& tau_plus, double theta, double x);

// p.g.f. z^c phi0(z^alpha_scale) with phi0 the GNBC p.g.f. of (a_poisson, pi).
struct LgnbcQuadruplet {
  double c = 0.0;
  double alpha_scale = 1.0;
  double a_poisson = 0.0;
  measure::RadialMeasure pi;
};

struct LgnbcReport {
  bool valid = true;
  std::vector<std::string> issues;
};

LgnbcReport lgnbc_validate(const LgnbcQuadruplet& q);
double lgnbc_pgf(const LgnbcQuadruplet& q, double z);
// pi = h# tau with h(x) = 1/(1 + x).
LgnbcQuadruplet lgnbc_from_ggc(const measure::RadialMeasure& tau, double c, double alpha_scale, double a_poisson);

// Result of subordinating a (bilateral) gamma process to an LGNBC subordinator. The residual
// gamma atom (c alpha - pi[0,1]) delta_beta is reported apart from the pushed-forward part.
struct LgnbcImage {
  exponent::ThorinTriplet triplet;
  measure::RadialMeasure pushed_plus;
  measure::RadialMeasure pushed_minus;
  double residual_weight = 0.0;
};

// Gamma(alpha, beta) parent: tau = f# pi + (c alpha - theta) delta_beta, f(x) = beta (1 - x).
LgnbcImage lgnbc_sub_gamma(const LgnbcQuadruplet& q, double alpha, double beta);

// Bilateral gamma (alpha, beta+, alpha, beta-) parent: tau+ = (f# pi)^(beta0) + residual delta_beta+,
// tau- = (f# pi)^(-beta0) + residual delta_beta-, beta0 = (beta- - beta+)/2.
LgnbcImage lgnbc_sub_bilateral(const LgnbcQuadruplet& q, double alpha, double beta_plus, double beta_minus);

}  // namespace thorin::subordinate
