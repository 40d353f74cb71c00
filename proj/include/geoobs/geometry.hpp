#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "geoobs/series.hpp"

namespace geoobs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Placement of a chart in world coordinates: world = origin + rotation * local.
struct Frame {
  Mat3 rotation = Mat3::Identity();
  Vec3 origin = Vec3::Zero();

  // throws InvalidInput unless rotation is orthogonal (1e-12) with det +1
  static Frame make(const Mat3& rotation, const Vec3& origin);

  Vec3 to_local(const Vec3& world) const { return rotation.transpose() * (world - origin); }
  Vec3 to_world(const Vec3& local) const { return origin + rotation * local; }
  Vec3 dir_to_local(const Vec3& d) const { return rotation.transpose() * d; }
  Vec3 dir_to_world(const Vec3& d) const { return rotation * d; }
};

// Obstacle boundary z = g(x, y) in chart coordinates; the feasible side is z <= g.
class Surface {
 public:
  struct Jet {
    double g, gx, gy, gxx, gxy, gyy;
  };

  explicit Surface(BivariateSeries g, Frame frame = {}, double chart_radius = 0.5);

  const BivariateSeries& g() const { return g_; }
  const Frame& frame() const { return frame_; }
  double chart_radius() const { return chart_radius_; }

  Jet jet(double x, double y) const;
  double height(double x, double y) const;
  // g(x, y) - z of the point in local coordinates; >= 0 means feasible
  double clearance(const Vec3& world) const;
  bool in_chart(const Vec3& world) const;
  // unit normal pointing into the obstacle, evaluated above/below the point
  Vec3 unit_normal(const Vec3& world) const;

 private:
  BivariateSeries g_;
  std::vector<Term> terms_;  // nonzero terms, cached for the hot evaluation paths
  Frame frame_;
  double chart_radius_;
};

// (-g_x, -g_y, 1) in chart coordinates
Vec3 normal_at(const Surface& s, double x, double y);

enum class AngleClass { Acute, Obtuse };

struct TwoSurfaceFrame {
  Frame frame;
  Surface s1;
  Surface s2;
  double k1 = 0.0;  // normal of s1 is (0, -k1, 1)
  double k2 = 0.0;  // normal of s2 is (0, k2, 1); k1 == k2 in the acute case
  AngleClass angle = AngleClass::Acute;
  double tilt = 0.0;  // extra rotation about x, radians
};

TwoSurfaceFrame two_surface_frame(const Surface& s1, const Surface& s2, const Vec3& p,
                                  int order = kDefaultOrder);

// Surface s as a graph w = W(u, v) over the chart `target`; the target origin must lie on s.
BivariateSeries reexpand(const Surface& s, const Frame& target, int order = kDefaultOrder);

struct NormalForm {
  double k = 0.0;                // |g_y(0,0)|
  int y_sign = 1;                // sign of g_y(0,0)
  std::optional<int> N;          // leading pure-x exponent, empty when g(x,0) == 0
  double a00 = 0.0;
  UnivariateSeries a;            // g(x,0) = x^N a(x)
  BivariateSeries b;             // mixed terms = x y b(x,y)
  UnivariateSeries c;            // pure y^2.. terms = y^2 c(y)

  BivariateSeries reassemble() const;
};

NormalForm extract_normal_form(const Surface& s);

struct IntersectionCurve {
  UnivariateSeries phi;
  std::optional<int> M;  // empty when phi == 0 through the working order
  double aM = 0.0;
};

IntersectionCurve intersection_curve(const Surface& s1, const Surface& s2);

struct ChartReexpansion {
  Frame frame;
  BivariateSeries k;
};

ChartReexpansion reexpand_chart(const Surface& s, const Vec3& contact, const Vec3& tangent,
                                int order = kDefaultOrder);

}  // namespace geoobs
