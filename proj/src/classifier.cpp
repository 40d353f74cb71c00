#include "geoobs/classifier.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoobs/errors.hpp"

namespace geoobs {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kDeltaMargin = 1e-6;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double eval_form(const std::vector<double>& a, double x, double y) {
  const int k = static_cast<int>(a.size()) - 1;
  double r = 0.0;
  for (int j = 0; j <= k; ++j) r += a[j] * std::pow(x, k - j) * std::pow(y, j);
  return r;
}

}  // namespace

HessianClass hessian_classify(const BivariateSeries& g) {
  // quadratic part A x^2 + B xy + C y^2, i.e. half the Hessian is [[A, B/2], [B/2, C]]
  const double A = g.coeff(2, 0), B = g.coeff(1, 1), C = g.coeff(0, 2);
  const double mean = 0.5 * (A + C);
  const double rad = std::hypot(0.5 * (A - C), 0.5 * B);
  const double hi = mean + rad, lo = mean - rad;
  HessianClass h;
  h.rotation = Rotation2::from_angle(0.5 * std::atan2(B, A - C));
  auto zero = [](double v) { return std::abs(v) <= kZeroThreshold; };
  if (zero(hi) && zero(lo)) {
    h.shape = Shape::DegenerateHigherOrder;
    h.a = h.b = 0.0;
  } else if (hi > 0 && lo < 0 && !zero(lo) && !zero(hi)) {
    h.shape = Shape::Saddle;
    h.a = hi;
    h.b = -lo;
  } else if (hi > 0 && (lo > 0 || zero(lo))) {
    h.shape = Shape::ConvexUp;
    h.a = hi;
    h.b = zero(lo) ? 0.0 : lo;
  } else {
    h.shape = Shape::ConcaveDown;
    h.a = zero(hi) ? 0.0 : hi;
    h.b = lo;
  }
  return h;
}

double theta0(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw Error(ErrorCode::NonPositiveInput, "theta0 needs a > 0 and b > 0");
  return std::atan(std::sqrt(a / b));
}

double delta_limit(double th0) {
  return std::min(2 * th0, std::numbers::pi - 2 * th0) - kDeltaMargin;
}

WedgeDecomposition wedge_decompose(const BivariateSeries& g) {
  WedgeDecomposition w;
  std::vector<double> a;
  for (int d = 0; d <= g.order(); ++d) {
    auto h = g.homogeneous(d);
    double m = 0.0;
    for (double c : h) m = std::max(m, std::abs(c));
    if (m > kZeroThreshold) {
      if (d < 2) throw Error(ErrorCode::InvalidInput, "wedge_decompose needs a form of degree >= 2");
      w.degree = d;
      a = h;
      break;
    }
  }
  if (w.degree == 0) throw Error(ErrorCode::ZeroForm, "no nonvanishing homogeneous part");
  const int k = w.degree;
  double scale = 0.0;
  for (double c : a) scale = std::max(scale, std::abs(c));

  // slopes m = y/x are roots of sum_j a_j m^j
  int deg = k;
  while (deg > 0 && std::abs(a[deg]) <= kZeroThreshold * scale) --deg;
  w.vertical = deg < k;
  std::vector<double> roots;
  if (deg >= 1) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -a[i] / a[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) {
      auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-9) roots.push_back(z.real());
    }
  }
  std::sort(roots.begin(), roots.end());
  for (double r : roots)
    if (w.boundary_slopes.empty() || std::abs(r - w.boundary_slopes.back()) > 1e-8)
      w.boundary_slopes.push_back(r);

  for (double m : w.boundary_slopes) {
    double t = std::atan(m);
    w.boundary_angles.push_back(wrap_angle(t));
    w.boundary_angles.push_back(wrap_angle(t + std::numbers::pi));
  }
  if (w.vertical) {
    w.boundary_angles.push_back(std::numbers::pi / 2);
    w.boundary_angles.push_back(3 * std::numbers::pi / 2);
  }
  std::sort(w.boundary_angles.begin(), w.boundary_angles.end());

  auto sign_at = [&](double t) {
    double v = eval_form(a, std::cos(t), std::sin(t));
    if (v > 1e-12 * scale) return FormSign::Positive;
    if (v < -1e-12 * scale) return FormSign::Negative;
    return FormSign::Mixed;
  };
  const auto& b = w.boundary_angles;
  if (b.empty()) {
    w.sectors.push_back({0.0, kTwoPi, sign_at(0.0)});
  } else {
    for (std::size_t i = 0; i < b.size(); ++i) {
      double lo = b[i], hi = i + 1 < b.size() ? b[i + 1] : b[0] + kTwoPi;
      w.sectors.push_back({lo, hi, sign_at(0.5 * (lo + hi))});
    }
  }
  return w;
}

SaddleClassification saddle_case(const BivariateSeries& g, double delta, int asymptote) {
  const auto h = hessian_classify(g);
  if (h.shape != Shape::Saddle) throw Error(ErrorCode::NotASaddle, "surface is not a saddle at the origin");
  if (asymptote < 0 || asymptote > 3) throw Error(ErrorCode::InvalidInput, "asymptote index must be 0..3");
  SaddleClassification c;
  c.a = h.a;
  c.b = h.b;
  c.theta0 = theta0(h.a, h.b);
  c.delta = delta;
  if (!(std::abs(delta) < delta_limit(c.theta0)))
    throw Error(ErrorCode::DeltaOutOfRange, "delta must satisfy |delta| < min(2 theta0, pi - 2 theta0)");

  const double pi = std::numbers::pi;
  const double ray[4] = {c.theta0, pi - c.theta0, pi + c.theta0, -c.theta0};
  const BivariateSeries diag = transform(g, h.rotation);
  c.asymptote_rotation = Rotation2::from_angle(ray[asymptote]).then(h.rotation);

  const BivariateSeries at0 = transform(diag, Rotation2::from_angle(ray[asymptote]));
  for (int i = 3; i <= at0.order(); ++i)
    if (std::abs(at0.coeff(i, 0)) > kZeroThreshold) {
      c.leading_exponent = i;
      c.leading = at0.coeff(i, 0);
      break;
    }
  if (c.leading_exponent == 0)
    throw Error(ErrorCode::AsymptoteDegenerate, "g vanishes along the asymptote through the working order");

  c.a2 = transform(at0, Rotation2::from_angle(delta)).coeff(2, 0);
  // zero normal curvature counts with the convex side: ties stay attached
  const bool convex = c.a2 >= -1e-12;
  const bool up = c.leading > 0;
  if (convex && up) c.saddle_case = SaddleCase::Case1;
  if (!convex && !up) c.saddle_case = SaddleCase::Case2;
  if (!convex && up) c.saddle_case = SaddleCase::Case3;
  if (convex && !up) c.saddle_case = SaddleCase::Case4;
  switch (c.saddle_case) {
    case SaddleCase::Case1:
      c.predicted_max_switch_points = 1;
      c.predicted_max_intervals = 1;
      break;
    case SaddleCase::Case2:
      c.predicted_max_switch_points = 0;
      c.predicted_max_intervals = 1;
      break;
    case SaddleCase::Case3:
      c.predicted_max_switch_points = 2;
      c.predicted_max_intervals = 2;
      break;
    case SaddleCase::Case4:
      c.predicted_max_switch_points = 2;
      c.predicted_max_intervals = 1;
      break;
  }
  return c;
}

TwoSurfaceClassification classify_two_surfaces(const Surface& s1, const Surface& s2, const Vec3& p,
                                               int order) {
  auto frame = two_surface_frame(s1, s2, p, order);
  auto curve = intersection_curve(frame.s1, frame.s2);
  auto nf1 = extract_normal_form(frame.s1);
  auto nf2 = extract_normal_form(frame.s2);
  TwoSurfaceClassification c{frame, curve, nf1, nf2, CaseLabel::MainAlternating, {}};

  const bool flat1 = !nf1.N, flat2 = !nf2.N;
  if (flat1 && flat2) {
    c.label = CaseLabel::TrivialBothFlat;
    c.prediction = "geodesic does not touch S1 or S2 near the origin; it starts as a line segment";
  } else if (flat1 || flat2) {
    c.label = CaseLabel::TrivialOneFlat;
    c.prediction = std::string("geodesic does not touch ") + (flat1 ? "S1" : "S2") +
                   " near the origin; reduces to one obstacle";
  } else if (!curve.M) {
    c.label = CaseLabel::TrivialPhiZero;
    c.prediction = "no bouncing between S1 and S2 near the origin; reduces to one obstacle";
  } else if (*curve.M < std::min(*nf1.N, *nf2.N)) {
    c.label = CaseLabel::MltN_Reduces;
    c.prediction = "M < N: geodesic eventually stops bouncing; reduces to one obstacle";
  } else if (*nf1.N != *nf2.N) {
    c.label = CaseLabel::NneqNtilde_Reduces;
    c.prediction = "N != Ntilde: geodesic eventually stops going between the surfaces; reduces to one obstacle";
  } else if (nf1.a00 < 0 || nf2.a00 < 0) {
    c.label = CaseLabel::NegativeLeading_Reduces;
    c.prediction = "negative leading coefficient: reduces to one obstacle";
  } else {
    c.label = CaseLabel::MainAlternating;
    c.prediction =
        "finitely many switch points, no accumulation; eventually a single-obstacle or line regime; "
        "boundary segments alternate between S1 and S2";
  }
  return c;
}

BoundPrediction predict_bound(const HessianClass& c) {
  switch (c.shape) {
    case Shape::ConvexUp:
      return {1, "switch_points", "at most one switch point near p"};
    case Shape::ConcaveDown:
      return {0, "switch_points", "no switch point near p"};
    case Shape::Saddle:
      return {2, "intervals", "at most two complete or partial line segments"};
    case Shape::DegenerateHigherOrder:
      break;
  }
  return {std::nullopt, "switch_points", "degenerate quadratic part; no bound from the Hessian"};
}

BoundPrediction predict_bound(const SaddleClassification&) {
  return {2, "intervals", "at most two complete or partial line segments"};
}

BoundPrediction predict_bound(const TwoSurfaceClassification& c) {
  if (c.label == CaseLabel::TrivialBothFlat) return {0, "switch_points", c.prediction};
  return {std::nullopt, "switch_points", "finite, no accumulation: " + c.prediction};
}

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::ConvexUp: return "ConvexUp";
    case Shape::ConcaveDown: return "ConcaveDown";
    case Shape::Saddle: return "Saddle";
    case Shape::DegenerateHigherOrder: return "DegenerateHigherOrder";
  }
  return "";
}

std::string_view to_string(FormSign s) {
  switch (s) {
    case FormSign::Positive: return "+";
    case FormSign::Negative: return "-";
    case FormSign::Mixed: return "mixed";
  }
  return "";
}

std::string_view to_string(SaddleCase c) {
  switch (c) {
    case SaddleCase::Case1: return "Case1";
    case SaddleCase::Case2: return "Case2";
    case SaddleCase::Case3: return "Case3";
    case SaddleCase::Case4: return "Case4";
  }
  return "";
}

std::string_view to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::MltN_Reduces: return "MltN_Reduces";
    case CaseLabel::NneqNtilde_Reduces: return "NneqNtilde_Reduces";
    case CaseLabel::NegativeLeading_Reduces: return "NegativeLeading_Reduces";
    case CaseLabel::MainAlternating: return "MainAlternating";
    case CaseLabel::TrivialPhiZero: return "TrivialPhiZero";
    case CaseLabel::TrivialOneFlat: return "TrivialOneFlat";
    case CaseLabel::TrivialBothFlat: return "TrivialBothFlat";
  }
  return "";
}

}  // namespace geoobs
