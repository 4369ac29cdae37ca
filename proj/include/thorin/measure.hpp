#pragma once

#include "thorin/monotone_map.hpp"
#include "thorin/quadrature.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace thorin::measure {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct Atom;
struct DensityPiece;
class RadialMeasure;

// Where an atom or piece came from; pushing forward by the inverse map restores `prev`
// bit for bit instead of recomputing it.
struct AtomOrigin;
struct PieceOrigin;

struct Atom {
  double location = 0.0;
  double weight = 0.0;
  std::shared_ptr<const AtomOrigin> origin;
};

struct AtomOrigin {
  Atom prev;
  MonotoneMap via;
};

// Kernels are written in t = s - lo (and u = hi - s) so that values near the lower end
// never go through a cancelling subtraction.

// t^power exp(-rate t)
struct PowerExp {
  double power = 0.0;
  double rate = 0.0;
};

// t^(rho-1) sin(rho pi)/pi / (t^(2 rho)/beta + 2 t^rho cos(rho pi) + beta), a probability density.
struct LinnikRational {
  double rho = 0.5;
  double beta = 1.0;
};

// Distribution function of the Linnik-rational kernel: F(t beta^(-1/rho)).
struct LampertiCdf {
  double rho = 0.5;
  double beta = 1.0;
};

// t^(a-1) u^(b-1) on a finite piece
struct BetaKernel {
  double a = 1.0;
  double b = 1.0;
};

// s^power |log s|^log_power in the absolute variable.
struct LogPower {
  double power = 0.0;
  double log_power = 0.0;
};

// base(map^-1(s)) |d map^-1 / ds|
struct Composed {
  std::shared_ptr<const DensityPiece> base;
  MonotoneMap map;
};

// (1/Gamma(alpha)) int_[lo, s) (s - u)^(alpha-1) source(du)
struct RiemannLiouville {
  std::shared_ptr<const RadialMeasure> source;
  double alpha = 1.0;
};

using Kernel =
    std::variant<PowerExp, LinnikRational, LampertiCdf, BetaKernel, LogPower, Composed, RiemannLiouville>;

// A quadrature node together with its distances to the ends of the piece and of the
// integration segment; each distance is exact when the node is close to that end.
struct Point {
  double s = 0.0;
  double from_lo = 0.0;
  double to_hi = infinity;
  double from_start = 0.0;
  double to_end = infinity;
};

using PointFunction = std::function<double(const Point&)>;

struct DensityPiece {
  double lo = 0.0;
  double hi = infinity;
  double coef = 1.0;
  Kernel kernel;
  std::shared_ptr<const PieceOrigin> origin;

  double value(double s) const;
  double value(const Point& p) const;

  // Density ~ (s - lo)^order_at_lo near lo, ~ (hi - s)^order_at_hi near a finite hi,
  // ~ s^tail_exponent as s -> inf (-inf: faster than any power).
  double order_at_lo() const;
  double order_at_hi() const;
  double tail_exponent() const;
  // Some order above carries a logarithmic correction, so a boundary exponent does not
  // settle convergence on its own.
  bool log_corrected() const;

  std::string tag() const;
};

struct PieceOrigin {
  DensityPiece prev;
  MonotoneMap via;
};

// Atoms at map_n(... map_1(first + k step)) with weight w, k = 0, 1, 2, ...
struct AtomTrain {
  double first = 0.0;
  double step = 1.0;
  double weight = 1.0;
  std::vector<MonotoneMap> maps;

  double location(double k) const;
  bool linear() const;
  // Atoms per unit length grow like s^counting_exponent at infinity.
  double counting_exponent() const;
  bool increasing() const;
};

struct LaplaceResult {
  double value = 0.0;
  bool divergent = false;
  double error = 0.0;
};

struct MomentResult {
  double value = 0.0;
  bool finite = true;
  double error = 0.0;
};

struct SupportBound {
  double value = infinity;
  bool empty = false;
};

enum class Region { inner, outer };

struct ValidityCheck {
  std::string side;
  std::string condition;  // "log_moment_at_zero" or "inverse_square_tail"
  bool passed = true;
  std::string method;     // "analytic" or "numeric"
  std::string detail;
};

struct ValidityReport {
  bool valid = true;
  std::vector<ValidityCheck> checks;
};

class RadialMeasure {
 public:
  RadialMeasure() = default;
  RadialMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                std::vector<AtomTrain> trains = {});

  static RadialMeasure atom(double location, double weight);
  static RadialMeasure piece(DensityPiece p);
  static RadialMeasure train(AtomTrain t);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  const std::vector<AtomTrain>& trains() const { return trains_; }
  bool empty() const { return atoms_.empty() && pieces_.empty() && trains_.empty(); }

  RadialMeasure operator+(const RadialMeasure& other) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
  std::vector<AtomTrain> trains_;
};

// Structural equality: same atoms, pieces and trains with identical parameters.
bool identical(const RadialMeasure& a, const RadialMeasure& b);

RadialMeasure scale(const RadialMeasure& m, double factor);

// int e^(-r s) m(ds)
LaplaceResult laplace(const RadialMeasure& m, double r);

RadialMeasure pushforward(const RadialMeasure& m, const MonotoneMap& phi);

// m^theta(B) = m(B + theta). With `radial` the result must stay on [0, inf).
RadialMeasure shift(const RadialMeasure& m, double theta, bool radial = true);

SupportBound support_inf(const RadialMeasure& m);
SupportBound support_sup(const RadialMeasure& m);

inline double default_atom_tolerance(double x) { return 1e-12 * std::max(1.0, std::abs(x)); }
bool has_atom_at(const RadialMeasure& m, double x);
bool has_atom_at(const RadialMeasure& m, double x, double tol);

ValidityReport validate_thorin(const RadialMeasure& plus, const RadialMeasure& minus);

// I^alpha m, the density measure (m * s^(alpha-1)/Gamma(alpha)).
RadialMeasure fractional_integral(const RadialMeasure& m, double alpha);

// int_region s^(-p) m(ds); region inner = (0,1), outer = [1, inf).
MomentResult moment_integral(const RadialMeasure& m, double p, Region region);

MomentResult total_mass(const RadialMeasure& m);

// int f dm over [a, b]; atoms exactly at a or b are included.
quad::Estimate integrate(const RadialMeasure& m, const PointFunction& f, double a = 0.0,
                         double b = infinity, double tol = quad::default_tolerance);

// Sum over train atoms in [a, b] of weight * g(location).
quad::Estimate sum_train(const AtomTrain& t, const std::function<double(double)>& g,
                         double a = 0.0, double b = infinity);

// Sampled check that the stated tail exponent matches the kernel: the density ratio at
// two large abscissae agrees with 2^tail_exponent within 5%.
bool tail_exponent_consistent(const DensityPiece& p);

}  // namespace thorin::measure
