#pragma once

#include "thorin/exponent.hpp"
#include "thorin/levy.hpp"
#include "thorin/subordinate.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace thorin::catalog {

using Params = std::map<std::string, double>;

// Brownian motion run on a GGC subordinator, kept for samplers and reports.
struct SubordinationInfo {
  subordinate::GgcSubordinator subordinator;
  subordinate::BrownianParent parent;
};

struct Model {
  std::string name;
  Params params;
  exponent::ThorinTriplet triplet;
  // Closed forms from the literature, evaluated independently of the triplet. Empty when unknown.
  std::function<exponent::cplx(double)> psi_ref;
  std::function<double(double)> k_ref;
  std::function<double(double)> pdf_ref;  // unit-time density
  std::optional<SubordinationInfo> subordination;
};

struct Family {
  std::string name;
  std::vector<std::string> params;
  std::string description;
};

const std::vector<Family>& families();
const Family& family(const std::string& name);

// Throws ParameterError for an unknown family, missing or unexpected parameters, or values
// outside the family's range.
Model make(const std::string& name, const Params& params);

// Throw UnsupportedError when the family has no closed form.
exponent::cplx reference_psi(const Model& m, double z);
double reference_k(const Model& m, double x);
double reference_pdf(const Model& m, double x);

// k(x) = theta 1{0 < x < 1} is self-decomposable but not completely monotone.
struct DickmanEvidence {
  double theta = 1.0;
  levy::CmReport dickman;
  levy::CmReport gamma_control;
  // Levy measure with compact support: every exponential moment is finite, so the
  // characteristic function is entire.
  bool entire_cf = false;
  std::vector<std::pair<double, double>> exponential_moments;  // (u, int_1^inf e^(u x) k(x)/x dx)
};

DickmanEvidence dickman_counterexample(double theta = 1.0);

}  // namespace thorin::catalog
