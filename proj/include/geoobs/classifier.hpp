#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geoobs/geometry.hpp"
#include "geoobs/series.hpp"

namespace geoobs {

enum class Shape { ConvexUp, ConcaveDown, Saddle, DegenerateHigherOrder };

struct HessianClass {
  // Half-eigenvalues. Saddles are stored as a > 0, b > 0 with g ~ a x^2 - b y^2 in the rotated
  // frame; otherwise g ~ a x^2 + b y^2 with a >= b.
  double a = 0.0;
  double b = 0.0;
  Rotation2 rotation;  // transform(g, rotation) has a diagonal quadratic part
  Shape shape = Shape::DegenerateHigherOrder;
};

HessianClass hessian_classify(const BivariateSeries& g);
double theta0(double a, double b);

enum class FormSign { Positive, Negative, Mixed };

struct Sector {
  double begin = 0.0;  // radians, begin < end, end - begin <= 2 pi
  double end = 0.0;
  FormSign sign = FormSign::Mixed;
};

struct WedgeDecomposition {
  int degree = 0;
  std::vector<double> boundary_slopes;  // sorted, finite slopes y/x
  bool vertical = false;                // x = 0 is also a boundary
  std::vector<double> boundary_angles;  // all boundary rays in [0, 2 pi), sorted
  std::vector<Sector> sectors;
};

WedgeDecomposition wedge_decompose(const BivariateSeries& g);

enum class SaddleCase { Case1, Case2, Case3, Case4 };

struct SaddleClassification {
  double a = 0.0;
  double b = 0.0;
  double theta0 = 0.0;
  double delta = 0.0;
  double a2 = 0.0;       // pure u^2 coefficient after rotating by theta0 + delta
  double leading = 0.0;  // leading pure-u coefficient in the asymptote frame
  int leading_exponent = 0;
  SaddleCase saddle_case = SaddleCase::Case1;
  int predicted_max_switch_points = 0;
  int predicted_max_intervals = 0;
  Rotation2 asymptote_rotation;  // original chart -> asymptote frame (delta = 0)
};

// asymptote picks one of the four asymptotic rays: theta0, pi - theta0, pi + theta0, -theta0
SaddleClassification saddle_case(const BivariateSeries& g, double delta, int asymptote = 0);
// admissible |delta| bound for a saddle, margin already removed
double delta_limit(double theta0);

enum class CaseLabel {
  MltN_Reduces,
  NneqNtilde_Reduces,
  NegativeLeading_Reduces,
  MainAlternating,
  TrivialPhiZero,
  TrivialOneFlat,
  TrivialBothFlat,
};

struct TwoSurfaceClassification {
  TwoSurfaceFrame normalized;
  IntersectionCurve curve;
  NormalForm nf1;
  NormalForm nf2;
  CaseLabel label = CaseLabel::MainAlternating;
  std::string prediction;
};

TwoSurfaceClassification classify_two_surfaces(const Surface& s1, const Surface& s2, const Vec3& p,
                                               int order = kDefaultOrder);

struct BoundPrediction {
  std::optional<int> bound;  // empty = finite but not quantified
  std::string quantity;      // "switch_points" or "intervals"
  std::string note;
};

BoundPrediction predict_bound(const HessianClass& c);
BoundPrediction predict_bound(const SaddleClassification& c);
BoundPrediction predict_bound(const TwoSurfaceClassification& c);

std::string_view to_string(Shape s);
std::string_view to_string(FormSign s);
std::string_view to_string(SaddleCase c);
std::string_view to_string(CaseLabel c);

}  // namespace geoobs
