#pragma once

#include "thorin/measure.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace thorin::exponent {

using cplx = std::complex<double>;

// Compensator of the jump integral: iz/s times h(s) with
//   indicator  h = 1{s >= 1}
//   centered   h = 1          (needs a finite first moment)
//   none       h = 0          (needs int min(1, 1/s) dtau < inf on the used side)
enum class Truncation { indicator, centered, none };

const char* to_string(Truncation h);
Truncation truncation_from_string(const std::string& name);

struct ThorinTriplet {
  double drift = 0.0;
  double gaussian_var = 0.0;
  measure::RadialMeasure tau_plus;
  measure::RadialMeasure tau_minus;
  Truncation truncation = Truncation::indicator;
};

struct LevyTriplet {
  double a = 0.0;  // drift for the truncation x 1{|x| <= 1}
  double gaussian_var = 0.0;
};

// Throws PreconditionError naming the violated condition.
void validate(const ThorinTriplet& t);

// psi(z) = izb - z^2 var/2 + int (-log(1 - iz/s) - (iz/s) h(s)) tau+(ds)
//                          + int (-log(1 + iz/s) + (iz/s) h(s)) tau-(ds)
cplx char_exponent(const ThorinTriplet& t, double z);

// The same formula for complex z inside the strip -gamma+ < Im z < gamma-.
cplx char_exponent_complex(const ThorinTriplet& t, cplx z);

// log E exp(-s X) for a GGC triplet (tau- = 0, no Gaussian part), on the real path
//   -s b - int (log(1 + s/x) - (s/x) h(x)) tau(dx).
double laplace_exponent(const ThorinTriplet& t, double s);

// log E exp(u X) for real u in [-gamma-, gamma+]; +inf when that moment is infinite.
double mgf_log(const ThorinTriplet& t, double u);

// Same exponent, drift re-expressed for another compensator.
ThorinTriplet convert_truncation(const ThorinTriplet& t, Truncation target);

LevyTriplet drift_convert(const ThorinTriplet& t);
ThorinTriplet from_levy(const LevyTriplet& l, const measure::RadialMeasure& tau_plus,
                        const measure::RadialMeasure& tau_minus);

// tau* = image of tau under s -> 1/s on each side; the exponent is then
//   izb - z^2 var/2 - int (log(1 - izy) + izy h*(y)) tau*+(dy) - int (log(1 + izy) - izy h*(y)) tau*-(dy)
// with h*(y) = h(1/y).
struct DualRepresentation {
  double drift = 0.0;
  double gaussian_var = 0.0;
  measure::RadialMeasure dual_plus;
  measure::RadialMeasure dual_minus;
  Truncation truncation = Truncation::indicator;
};

DualRepresentation dual_measure(const ThorinTriplet& t);
ThorinTriplet from_dual(const DualRepresentation& d);
cplx char_exponent_dual(const DualRepresentation& d, double z);

// Finitely atomic spherical part: rays u_i with weights lambda_i and radial Thorin measures.
struct Direction {
  Eigen::VectorXd u;
  double lambda = 1.0;
  measure::RadialMeasure radial;
};

struct PolarThorin {
  std::vector<Direction> directions;
  Eigen::VectorXd b;
  Eigen::MatrixXd sigma;
  Truncation truncation = Truncation::indicator;
};

void validate(const PolarThorin& p);

// i<z,b> - <Sigma z, z>/2 + sum_i lambda_i int (-log(1 - i<z,u_i>/s) - i<z,u_i>/s h(s)) tau_i(ds)
cplx char_exponent_multi(const PolarThorin& p, const Eigen::VectorXd& z);

// One side of the jump integral, int (-log(1 - iw/s) - (iw/s) h(s)) tau(ds).
cplx side_integral(const measure::RadialMeasure& tau, cplx w, Truncation h);

}  // namespace thorin::exponent
