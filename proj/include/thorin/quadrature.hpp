#pragma once

#include <functional>

namespace thorin::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

inline constexpr double default_tolerance = 1e-12;
// Integrals whose magnitude falls below this are treated as zero, never as divergent.
inline constexpr double absolute_floor = 1e-300;

using Function = std::function<double(double)>;

// Double-exponential (tanh-sinh) rule on a finite interval; tolerates endpoint singularities.
Estimate finite(const Function& f, double a, double b, double tol = default_tolerance);

// Exp-sinh rule on [a, inf).
Estimate half_line(const Function& f, double a, double tol = default_tolerance);

// Chooses finite or half_line from the bounds.
Estimate integrate(const Function& f, double a, double b, double tol = default_tolerance);

Estimate operator+(const Estimate& x, const Estimate& y);

}  // namespace thorin::quad
