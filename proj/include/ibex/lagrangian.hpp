#pragma once

// The convex IB Lagrangian family  I(T;Y) - beta_u * u(I(X;T))  and the
// closed-form relations between its multiplier and the compression level
// it attains on a known IB curve.
//
// u takes compression in bits and uses natural-base exp/log internally.

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace ibex {

// Arguments of exp() above this are treated as overflow.
inline constexpr double kExpOverflow = 700.0;

struct Checked {
  double value = 0.0;
  bool overflow = false;
};

class UFamily {
 public:
  enum class Kind { Identity, Power, Exponential, ShiftedExponential };

  static UFamily identity() { return UFamily(Kind::Identity, 0.0, 0.0); }
  // u(r) = r^(1+alpha); alpha = 1 is the squared IB Lagrangian.
  static UFamily power(double alpha);
  // u(r) = exp(eta r)
  static UFamily exponential(double eta);
  // u(r) = exp(eta (r - r_star))
  static UFamily shifted_exponential(double eta, double r_star);

  // Grammar: identity | pow:ALPHA | exp:ETA | shexp:ETA:RSTAR
  static UFamily parse(std::string_view spec);

  Kind kind() const noexcept { return kind_; }
  bool is_identity() const noexcept { return kind_ == Kind::Identity; }
  double alpha() const noexcept { return p1_; }
  double eta() const noexcept { return p1_; }
  double r_star() const noexcept { return p2_; }

  // Short name used in CSV output: identity, pow, exp, shexp.
  std::string name() const;
  double param1() const noexcept { return p1_; }
  double param2() const noexcept { return p2_; }
  // Round-trips through parse().
  std::string spec() const;

 private:
  UFamily(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p1_;
  double p2_;
};

Checked u_value(const UFamily& f, double r);
Checked u_prime(const UFamily& f, double r);
double u_second(const UFamily& f, double r);
// Inverse of u' on r >= 0. Throws OutOfRange when s is not attained there,
// IdentityFamily for the identity family.
double u_prime_inverse(const UFamily& f, double s);

// i_ty - beta_u * u(i_xt); -inf with the overflow flag when u overflows.
Checked objective(double i_xt, double i_ty, const UFamily& f, double beta_u);

// What is known about the IB curve f_IB of the instance being solved.
class CurveSpec {
 public:
  enum class Kind { Deterministic, KnownSlope, UnknownBounded };

  // Y = f(X): f_IB(r) = min(r, i_xy).
  static CurveSpec deterministic(double i_xy);
  // Concave non-decreasing curve on [0, r_max] given by its slope. The value
  // function is integrated from the slope when not supplied.
  static CurveSpec known_slope(std::function<double(double)> slope, double r_max,
                               std::function<double(double)> value = {});
  // Shape unknown; the slope is assumed constant (0 < f' <= 1).
  static CurveSpec unknown_bounded(double assumed_slope = 1.0);

  Kind kind() const noexcept { return kind_; }
  bool known_shape() const noexcept { return kind_ != Kind::UnknownBounded; }
  std::optional<double> r_max() const;

  double slope(double r) const;
  // Left limit of the slope at r_max.
  double slope_at_r_max() const;
  // f_IB(r); throws UnknownShape for unknown curves.
  double value(double r) const;
  // f_IB^{-1}(i) on the strictly increasing region.
  double inverse_value(double i) const;

 private:
  Kind kind_ = Kind::UnknownBounded;
  double i_xy_ = 0.0;
  double r_max_ = 0.0;
  double assumed_slope_ = 1.0;
  std::function<double(double)> slope_;
  std::function<double(double)> value_;
};

struct MultiplierRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double beta) const noexcept { return beta >= lo && beta <= hi; }
};

struct Compression {
  double r = 0.0;
  // beta_u lay outside the explorable range; r was clamped to it.
  bool out_of_range = false;
};

// beta_u = f'(r) / u'(r). Throws FlatRegion where f'(r) = 0.
double beta_for_compression(const UFamily& f, const CurveSpec& c, double r);

// Solves r = (u')^{-1}(f'(r) / beta_u); bisection when the slope varies.
Compression compression_for_beta(const UFamily& f, const CurveSpec& c, double beta_u);

// [lim_{r->r_max^-} f'/u', lim_{r->0^+} f'/u'] for a known curve shape.
MultiplierRange multiplier_range(const UFamily& f, const CurveSpec& c);

// [0, (inf beta0)^-1 / lim_{r->0^+} u'(r)]; the numerator defaults to 1.
MultiplierRange multiplier_range_bound(const UFamily& f,
                                       std::optional<double> inf_beta0 = std::nullopt);

// Classic multiplier equivalent to beta_u at compression r, and back.
Checked effective_beta(const UFamily& f, double beta_u, double r);
double convex_beta(const UFamily& f, double beta, double r);

// Strictly concave increasing v of the concave IB Lagrangian
// I(X;T) - beta_v v(I(T;Y)). Only the multiplier relation is provided.
class VFamily {
 public:
  enum class Kind { Sqrt, Log1p, PowerConcave };

  static VFamily sqrt() { return VFamily(Kind::Sqrt, 0.5); }
  static VFamily log1p() { return VFamily(Kind::Log1p, 0.0); }
  static VFamily power_concave(double gamma);

  Kind kind() const noexcept { return kind_; }
  double gamma() const noexcept { return gamma_; }

  double value(double i) const;
  double prime(double i) const;
  double second(double i) const;
  double prime_inverse(double s) const;

 private:
  VFamily(Kind kind, double gamma) : kind_(kind), gamma_(gamma) {}
  Kind kind_;
  double gamma_;
};

// beta_v giving the same curve point as beta_u at compression r:
//   1/beta_v = f'(r) v'(f((u')^{-1}(f'(r)/beta_u)))
double concave_beta_from_convex(const UFamily& u, const VFamily& v, const CurveSpec& c,
                                double r, double beta_u);
//   1/beta_u = u'(f^{-1}((v')^{-1}(1/(beta_v f'(r))))) / f'(r)
double convex_beta_from_concave(const UFamily& u, const VFamily& v, const CurveSpec& c,
                                double r, double beta_v);

}  // namespace ibex
