#include "ibex/lagrangian.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "ibex/error.hpp"
#include "ibex/format.hpp"

namespace ibex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Checked checked_exp(double arg) {
  if (arg > kExpOverflow) return {kInf, true};
  return {std::exp(arg), false};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorCode::OutOfRange, std::string(what) + " must be positive and finite");
}

void require_convex(const UFamily& f) {
  if (f.is_identity())
    throw Error(ErrorCode::IdentityFamily, "mapping requires a strictly convex u");
}

double parse_number(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorCode::Parse, "bad number '" + std::string(text) + "' in family spec");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

UFamily UFamily::power(double alpha) {
  require_positive(alpha, "alpha");
  return UFamily(Kind::Power, alpha, 0.0);
}

UFamily UFamily::exponential(double eta) {
  require_positive(eta, "eta");
  return UFamily(Kind::Exponential, eta, 0.0);
}

UFamily UFamily::shifted_exponential(double eta, double r_star) {
  require_positive(eta, "eta");
  if (!(r_star >= 0.0) || !std::isfinite(r_star))
    throw Error(ErrorCode::OutOfRange, "r_star must be >= 0");
  return UFamily(Kind::ShiftedExponential, eta, r_star);
}

UFamily UFamily::parse(std::string_view spec) {
  const auto parts = split(spec, ':');
  const auto head = parts.front();
  if (head == "identity" && parts.size() == 1) return identity();
  if (head == "pow" && parts.size() == 2) return power(parse_number(parts[1]));
  if (head == "exp" && parts.size() == 2) return exponential(parse_number(parts[1]));
  if (head == "shexp" && parts.size() == 3)
    return shifted_exponential(parse_number(parts[1]), parse_number(parts[2]));
  throw Error(ErrorCode::Parse, "unrecognised family '" + std::string(spec) +
                                    "' (expected identity | pow:A | exp:E | shexp:E:R)");
}

std::string UFamily::name() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Power: return "pow";
    case Kind::Exponential: return "exp";
    case Kind::ShiftedExponential: return "shexp";
  }
  return "?";
}

std::string UFamily::spec() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Power:
    case Kind::Exponential: return name() + ":" + format_double(p1_);
    case Kind::ShiftedExponential:
      return name() + ":" + format_double(p1_) + ":" + format_double(p2_);
  }
  return "?";
}

Checked u_value(const UFamily& f, double r) {
  switch (f.kind()) {
    case UFamily::Kind::Identity: return {r, false};
    case UFamily::Kind::Power: return {std::pow(r, 1.0 + f.alpha()), false};
    case UFamily::Kind::Exponential: return checked_exp(f.eta() * r);
    case UFamily::Kind::ShiftedExponential: return checked_exp(f.eta() * (r - f.r_star()));
  }
  return {};
}

Checked u_prime(const UFamily& f, double r) {
  switch (f.kind()) {
    case UFamily::Kind::Identity: return {1.0, false};
    case UFamily::Kind::Power: return {(1.0 + f.alpha()) * std::pow(r, f.alpha()), false};
    case UFamily::Kind::Exponential: {
      auto e = checked_exp(f.eta() * r);
      return {f.eta() * e.value, e.overflow};
    }
    case UFamily::Kind::ShiftedExponential: {
      auto e = checked_exp(f.eta() * (r - f.r_star()));
      return {f.eta() * e.value, e.overflow};
    }
  }
  return {};
}

double u_second(const UFamily& f, double r) {
  switch (f.kind()) {
    case UFamily::Kind::Identity: return 0.0;
    case UFamily::Kind::Power:
      return (1.0 + f.alpha()) * f.alpha() * std::pow(r, f.alpha() - 1.0);
    case UFamily::Kind::Exponential: return f.eta() * f.eta() * std::exp(f.eta() * r);
    case UFamily::Kind::ShiftedExponential:
      return f.eta() * f.eta() * std::exp(f.eta() * (r - f.r_star()));
  }
  return 0.0;
}

double u_prime_inverse(const UFamily& f, double s) {
  require_convex(f);
  if (std::isnan(s) || s < 0.0) throw Error(ErrorCode::OutOfRange, "u' is never negative");
  const double floor = u_prime(f, 0.0).value;
  if (s < floor || (s == 0.0 && floor > 0.0))
    throw Error(ErrorCode::OutOfRange,
                "u' value " + format_double(s) + " is below u'(0) = " + format_double(floor));
  switch (f.kind()) {
    case UFamily::Kind::Power: return std::pow(s / (1.0 + f.alpha()), 1.0 / f.alpha());
    case UFamily::Kind::Exponential: return std::log(s / f.eta()) / f.eta();
    case UFamily::Kind::ShiftedExponential:
      return std::max(0.0, f.r_star() + std::log(s / f.eta()) / f.eta());
    case UFamily::Kind::Identity: break;
  }
  return 0.0;
}

Checked objective(double i_xt, double i_ty, const UFamily& f, double beta_u) {
  if (beta_u == 0.0) return {i_ty, false};
  const auto u = u_value(f, i_xt);
  if (u.overflow) return {-kInf, true};
  return {i_ty - beta_u * u.value, false};
}

// ---------------------------------------------------------------------------

CurveSpec CurveSpec::deterministic(double i_xy) {
  if (!(i_xy > 0.0) || !std::isfinite(i_xy))
    throw Error(ErrorCode::OutOfRange, "deterministic curve needs I(X;Y) > 0");
  CurveSpec c;
  c.kind_ = Kind::Deterministic;
  c.i_xy_ = i_xy;
  c.r_max_ = i_xy;
  return c;
}

CurveSpec CurveSpec::known_slope(std::function<double(double)> slope, double r_max,
                                 std::function<double(double)> value) {
  if (!slope) throw Error(ErrorCode::UnknownShape, "slope function required");
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw Error(ErrorCode::OutOfRange, "r_max must be positive and finite");
  CurveSpec c;
  c.kind_ = Kind::KnownSlope;
  c.r_max_ = r_max;
  c.slope_ = std::move(slope);
  if (value) {
    c.value_ = std::move(value);
  } else {
    // Composite Simpson on a fixed grid; the slope is smooth between kinks
    // for every curve we construct.
    c.value_ = [s = c.slope_, r_max](double r) {
      r = std::clamp(r, 0.0, r_max);
      constexpr int kPanels = 2048;
      const double h = r / kPanels;
      if (h == 0.0) return 0.0;
      double acc = s(0.0) + s(r);
      for (int k = 1; k < kPanels; ++k) acc += (k % 2 ? 4.0 : 2.0) * s(k * h);
      return acc * h / 3.0;
    };
  }
  return c;
}

CurveSpec CurveSpec::unknown_bounded(double assumed_slope) {
  if (!(assumed_slope > 0.0) || assumed_slope > 1.0)
    throw Error(ErrorCode::OutOfRange, "assumed slope must lie in (0, 1]");
  CurveSpec c;
  c.kind_ = Kind::UnknownBounded;
  c.assumed_slope_ = assumed_slope;
  return c;
}

std::optional<double> CurveSpec::r_max() const {
  if (kind_ == Kind::UnknownBounded) return std::nullopt;
  return r_max_;
}

double CurveSpec::slope(double r) const {
  switch (kind_) {
    case Kind::Deterministic: return r < i_xy_ ? 1.0 : 0.0;
    case Kind::KnownSlope: return r < r_max_ ? slope_(r) : 0.0;
    case Kind::UnknownBounded: return assumed_slope_;
  }
  return 0.0;
}

double CurveSpec::slope_at_r_max() const {
  switch (kind_) {
    case Kind::Deterministic: return 1.0;
    case Kind::KnownSlope: return slope_(std::nextafter(r_max_, 0.0));
    case Kind::UnknownBounded: return assumed_slope_;
  }
  return 0.0;
}

double CurveSpec::value(double r) const {
  switch (kind_) {
    case Kind::Deterministic: return std::min(r, i_xy_);
    case Kind::KnownSlope: return value_(std::min(r, r_max_));
    case Kind::UnknownBounded: break;
  }
  throw Error(ErrorCode::UnknownShape, "curve value unavailable for an unknown curve");
}

double CurveSpec::inverse_value(double i) const {
  if (kind_ == Kind::UnknownBounded)
    throw Error(ErrorCode::UnknownShape, "curve inverse unavailable for an unknown curve");
  if (i < 0.0 || i > value(r_max_) * (1.0 + 1e-12) + 1e-15)
    throw Error(ErrorCode::OutOfRange, "value outside the curve's range");
  if (kind_ == Kind::Deterministic) return i;
  double lo = 0.0, hi = r_max_;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < i ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

double beta_for_compression(const UFamily& f, const CurveSpec& c, double r) {
  require_convex(f);
  if (!(r > 0.0)) throw Error(ErrorCode::OutOfRange, "compression must be positive");
  const double slope = c.slope(r);
  if (slope <= 0.0)
    throw Error(ErrorCode::FlatRegion, "curve is flat at r = " + format_double(r));
  const auto up = u_prime(f, r);
  if (up.overflow) return 0.0;
  return slope / up.value;
}

Compression compression_for_beta(const UFamily& f, const CurveSpec& c, double beta_u) {
  require_convex(f);
  require_positive(beta_u, "beta_u");
  const double floor = u_prime(f, 0.0).value;
  const auto r_max = c.r_max();

  if (c.kind() != CurveSpec::Kind::KnownSlope) {
    // Constant slope below r_max: closed form.
    const double s = c.slope(0.0) / beta_u;
    if (s <= floor) return {0.0, s < floor};
    const double r = u_prime_inverse(f, s);
    if (r_max && r > *r_max) return {*r_max, true};
    return {r, false};
  }

  // g(r) = beta_u u'(r) - f'(r) is strictly increasing; find its root.
  const auto g = [&](double r) {
    const auto up = u_prime(f, r);
    return up.overflow ? kInf : beta_u * up.value - c.slope(r);
  };
  if (g(0.0) >= 0.0) return {0.0, g(0.0) > 0.0};
  const double hi_r = *r_max;
  if (beta_u * u_prime(f, hi_r).value < c.slope_at_r_max()) return {hi_r, true};
  double lo = 0.0, hi = hi_r;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), false};
}

MultiplierRange multiplier_range(const UFamily& f, const CurveSpec& c) {
  if (!c.known_shape())
    throw Error(ErrorCode::UnknownShape, "multiplier range needs a known curve shape");
  const double r_max = *c.r_max();
  const auto up_max = u_prime(f, r_max);
  const double lo = up_max.overflow ? 0.0 : c.slope_at_r_max() / up_max.value;
  const double up0 = u_prime(f, 0.0).value;
  const double hi = up0 > 0.0 ? c.slope(0.0) / up0 : kInf;
  return {lo, hi};
}

MultiplierRange multiplier_range_bound(const UFamily& f, std::optional<double> inf_beta0) {
  require_convex(f);
  double numerator = 1.0;
  if (inf_beta0) {
    if (!(*inf_beta0 >= 1.0)) throw Error(ErrorCode::OutOfRange, "inf beta0 must be >= 1");
    numerator = 1.0 / *inf_beta0;
  }
  const double up0 = u_prime(f, 0.0).value;
  return {0.0, up0 > 0.0 ? numerator / up0 : kInf};
}

Checked effective_beta(const UFamily& f, double beta_u, double r) {
  const auto up = u_prime(f, r);
  if (up.overflow) return {beta_u > 0.0 ? kInf : 0.0, beta_u > 0.0};
  return {beta_u * up.value, false};
}

double convex_beta(const UFamily& f, double beta, double r) {
  const auto up = u_prime(f, r);
  if (up.overflow) return 0.0;
  if (up.value == 0.0) return beta > 0.0 ? kInf : 0.0;
  return beta / up.value;
}

// ---------------------------------------------------------------------------

VFamily VFamily::power_concave(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error(ErrorCode::OutOfRange, "gamma must lie in (0, 1)");
  return VFamily(Kind::PowerConcave, gamma);
}

double VFamily::value(double i) const {
  switch (kind_) {
    case Kind::Sqrt: return std::sqrt(i);
    case Kind::Log1p: return std::log1p(i);
    case Kind::PowerConcave: return std::pow(i, gamma_);
  }
  return 0.0;
}

double VFamily::prime(double i) const {
  switch (kind_) {
    case Kind::Sqrt: return 0.5 / std::sqrt(i);
    case Kind::Log1p: return 1.0 / (1.0 + i);
    case Kind::PowerConcave: return gamma_ * std::pow(i, gamma_ - 1.0);
  }
  return 0.0;
}

double VFamily::second(double i) const {
  switch (kind_) {
    case Kind::Sqrt: return -0.25 * std::pow(i, -1.5);
    case Kind::Log1p: return -1.0 / ((1.0 + i) * (1.0 + i));
    case Kind::PowerConcave: return gamma_ * (gamma_ - 1.0) * std::pow(i, gamma_ - 2.0);
  }
  return 0.0;
}

double VFamily::prime_inverse(double s) const {
  require_positive(s, "v' value");
  switch (kind_) {
    case Kind::Sqrt: return 0.25 / (s * s);
    case Kind::Log1p:
      if (s > 1.0) throw Error(ErrorCode::OutOfRange, "log1p' never exceeds 1 on i >= 0");
      return 1.0 / s - 1.0;
    case Kind::PowerConcave: return std::pow(s / gamma_, 1.0 / (gamma_ - 1.0));
  }
  return 0.0;
}

double concave_beta_from_convex(const UFamily& u, const VFamily& v, const CurveSpec& c,
                                double r, double beta_u) {
  require_convex(u);
  require_positive(beta_u, "beta_u");
  const double slope = c.slope(r);
  if (slope <= 0.0) throw Error(ErrorCode::FlatRegion, "curve is flat at r");
  const double compression = u_prime_inverse(u, slope / beta_u);
  return 1.0 / (slope * v.prime(c.value(compression)));
}

double convex_beta_from_concave(const UFamily& u, const VFamily& v, const CurveSpec& c,
                                double r, double beta_v) {
  require_convex(u);
  require_positive(beta_v, "beta_v");
  const double slope = c.slope(r);
  if (slope <= 0.0) throw Error(ErrorCode::FlatRegion, "curve is flat at r");
  const double performance = v.prime_inverse(1.0 / (beta_v * slope));
  const auto up = u_prime(u, c.inverse_value(performance));
  return slope / up.value;
}

}  // namespace ibex
