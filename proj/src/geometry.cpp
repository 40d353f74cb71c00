#include "geoobs/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "geoobs/errors.hpp"

namespace geoobs {

namespace {

constexpr double kOnSurfaceTol = 1e-9;

Vec3 unit_normal_local(const Surface::Jet& j) { return Vec3(-j.gx, -j.gy, 1.0).normalized(); }

}  // namespace

Frame Frame::make(const Mat3& rotation, const Vec3& origin) {
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
      rotation.determinant() < 0)
    throw Error(ErrorCode::InvalidInput, "frame rotation must be orthogonal with determinant +1");
  return Frame{rotation, origin};
}

Surface::Surface(BivariateSeries g, Frame frame, double chart_radius)
    : g_(std::move(g)), terms_(g_.terms()), frame_(std::move(frame)), chart_radius_(chart_radius) {
  if (!(chart_radius > 0))
    throw Error(ErrorCode::InvalidInput, "chart_radius must be positive");
}

namespace {

// x^k for k <= order, on the stack for the usual orders
template <class F>
auto with_powers(int order, double x, double y, F&& f) {
  constexpr int kStack = 40;
  if (order < kStack) {
    double px[kStack], py[kStack];
    px[0] = py[0] = 1.0;
    for (int k = 1; k <= order; ++k) {
      px[k] = px[k - 1] * x;
      py[k] = py[k - 1] * y;
    }
    return f(px, py);
  }
  std::vector<double> px(order + 1, 1.0), py(order + 1, 1.0);
  for (int k = 1; k <= order; ++k) {
    px[k] = px[k - 1] * x;
    py[k] = py[k - 1] * y;
  }
  return f(px.data(), py.data());
}

}  // namespace

double Surface::height(double x, double y) const {
  return with_powers(g_.order(), x, y, [&](const double* px, const double* py) {
    double r = 0.0;
    for (const auto& t : terms_) r += t.c * px[t.i] * py[t.j];
    return r;
  });
}

Surface::Jet Surface::jet(double x, double y) const {
  return with_powers(g_.order(), x, y, [&](const double* px, const double* py) {
    Jet r{0, 0, 0, 0, 0, 0};
    for (const auto& t : terms_) {
      const int i = t.i, j = t.j;
      const double c = t.c;
      r.g += c * px[i] * py[j];
      if (i > 0) r.gx += c * i * px[i - 1] * py[j];
      if (j > 0) r.gy += c * j * px[i] * py[j - 1];
      if (i > 1) r.gxx += c * i * (i - 1) * px[i - 2] * py[j];
      if (i > 0 && j > 0) r.gxy += c * i * j * px[i - 1] * py[j - 1];
      if (j > 1) r.gyy += c * j * (j - 1) * px[i] * py[j - 2];
    }
    return r;
  });
}

double Surface::clearance(const Vec3& world) const {
  Vec3 q = frame_.to_local(world);
  return height(q.x(), q.y()) - q.z();
}

bool Surface::in_chart(const Vec3& world) const {
  Vec3 q = frame_.to_local(world);
  return std::abs(q.x()) <= chart_radius_ && std::abs(q.y()) <= chart_radius_;
}

Vec3 Surface::unit_normal(const Vec3& world) const {
  Vec3 q = frame_.to_local(world);
  return frame_.dir_to_world(unit_normal_local(jet(q.x(), q.y())));
}

Vec3 normal_at(const Surface& s, double x, double y) {
  auto j = s.jet(x, y);
  return Vec3(-j.gx, -j.gy, 1.0);
}

BivariateSeries reexpand(const Surface& s, const Frame& target, int order) {
  const Mat3 L = s.frame().rotation.transpose() * target.rotation;
  const Vec3 q0 = s.frame().to_local(target.origin);
  const auto j0 = s.jet(q0.x(), q0.y());
  // dG/dw at the origin for G = q_z - g(q_x, q_y)
  const double gw = L(2, 2) - j0.gx * L(0, 2) - j0.gy * L(1, 2);
  if (std::abs(gw) < 1e-8)
    throw Error(ErrorCode::ImplicitSolveFailed, "surface is not a graph over the target chart");

  BivariateSeries W(order);
  for (int d = 1; d <= order; ++d) {
    BivariateSeries X(d), Y(d), Z(d);
    const BivariateSeries Wd = W.truncated(d);
    X = Wd * L(0, 2);
    Y = Wd * L(1, 2);
    Z = Wd * L(2, 2);
    X.add(0, 0, q0.x());
    X.add(1, 0, L(0, 0));
    X.add(0, 1, L(0, 1));
    Y.add(0, 0, q0.y());
    Y.add(1, 0, L(1, 0));
    Y.add(0, 1, L(1, 1));
    Z.add(0, 0, q0.z());
    Z.add(1, 0, L(2, 0));
    Z.add(0, 1, L(2, 1));
    BivariateSeries G = Z - compose(s.g(), X, Y, d);
    for (int j = 0; j <= d; ++j) W.add(d - j, j, -G.coeff(d - j, j) / gw);
  }
  return W;
}

TwoSurfaceFrame two_surface_frame(const Surface& s1, const Surface& s2, const Vec3& p, int order) {
  const double c1 = s1.clearance(p), c2 = s2.clearance(p);
  if (std::abs(c1) > kOnSurfaceTol || std::abs(c2) > kOnSurfaceTol)
    throw Error(ErrorCode::NotOnIntersection, "point does not lie on both surfaces");
  const Vec3 n1 = s1.unit_normal(p), n2 = s2.unit_normal(p);
  const Vec3 cross = n2.cross(n1);
  if (cross.norm() < 1e-9)
    throw Error(ErrorCode::ParallelNormals, "surface normals are parallel at the point");

  const Vec3 ex = cross.normalized();
  const double cosang = n1.dot(n2);
  TwoSurfaceFrame out{Frame{}, s1, s2};
  out.angle = cosang > 0 ? AngleClass::Acute : AngleClass::Obtuse;

  Vec3 ez = (n1 + n2).normalized();
  Vec3 ey = ez.cross(ex);
  if (out.angle == AngleClass::Obtuse) {
    // look for a tilt about x giving normals (0,-k1,1), (0,k2,1) with k1 < 1 < k2, k1 k2 < 1
    double best = std::numeric_limits<double>::infinity();
    std::optional<double> best_t;
    for (int step = 0;; ++step) {
      const double t = -std::numbers::pi / 4 + 1e-3 * (step + 1);
      if (t >= std::numbers::pi / 4) break;
      Vec3 zt = std::cos(t) * ez + std::sin(t) * ey;
      Vec3 yt = zt.cross(ex);
      double a1 = n1.dot(zt), a2 = n2.dot(zt);
      if (a1 <= 0 || a2 <= 0) continue;
      double k1 = -n1.dot(yt) / a1, k2 = n2.dot(yt) / a2;
      if (k1 < 1 && k2 > 1 && k1 * k2 < 1 && k1 * k2 < best) {
        best = k1 * k2;
        best_t = t;
      }
    }
    if (!best_t)
      throw Error(ErrorCode::NoValidTilt,
                  "no rotation about the intersection tangent gives k1*k2 < 1 (normals meet at >= 90 deg)");
    out.tilt = *best_t;
    ez = std::cos(out.tilt) * ez + std::sin(out.tilt) * ey;
    ey = ez.cross(ex);
  }

  Mat3 R;
  R.col(0) = ex;
  R.col(1) = ey;
  R.col(2) = ez;
  out.frame = Frame{R, p};
  const double r = std::min(s1.chart_radius(), s2.chart_radius());
  out.s1 = Surface(reexpand(s1, out.frame, order), out.frame, r);
  out.s2 = Surface(reexpand(s2, out.frame, order), out.frame, r);
  out.k1 = out.s1.g().coeff(0, 1);
  out.k2 = -out.s2.g().coeff(0, 1);
  return out;
}

BivariateSeries NormalForm::reassemble() const {
  const int n = b.order() + 2;
  BivariateSeries g(n);
  g.set(0, 1, y_sign * k);
  if (N)
    for (int i = 0; i <= a.order(); ++i) g.add(*N + i, 0, a[i]);
  for (const auto& t : b.terms()) g.add(t.i + 1, t.j + 1, t.c);
  for (int j = 0; j <= c.order(); ++j) g.add(0, j + 2, c[j]);
  return g;
}

NormalForm extract_normal_form(const Surface& s) {
  const auto& g = s.g();
  const int n = g.order();
  if (std::abs(g.coeff(0, 0)) > kOnSurfaceTol || std::abs(g.coeff(1, 0)) > kOnSurfaceTol)
    throw Error(ErrorCode::FrameNotNormalized, "normal form needs g(0,0) = 0 and g_x(0,0) = 0");
  NormalForm nf{0.0, 1, std::nullopt, 0.0, UnivariateSeries(0), BivariateSeries(std::max(0, n - 2)),
                UnivariateSeries(std::max(0, n - 2))};
  const double gy = g.coeff(0, 1);
  nf.k = std::abs(gy);
  nf.y_sign = gy < 0 ? -1 : 1;
  for (int i = 2; i <= n; ++i)
    if (std::abs(g.coeff(i, 0)) > kZeroThreshold) {
      nf.N = i;
      nf.a00 = g.coeff(i, 0);
      break;
    }
  if (nf.N) {
    nf.a = UnivariateSeries(n - *nf.N);
    for (int i = *nf.N; i <= n; ++i) nf.a.set(i - *nf.N, g.coeff(i, 0));
  }
  for (const auto& t : g.terms()) {
    if (t.i > 0 && t.j > 0) nf.b.set(t.i - 1, t.j - 1, t.c);
    if (t.i == 0 && t.j >= 2) nf.c.set(t.j - 2, t.c);
  }
  return nf;
}

IntersectionCurve intersection_curve(const Surface& s1, const Surface& s2) {
  if ((s1.frame().rotation - s2.frame().rotation).norm() > 1e-12 ||
      (s1.frame().origin - s2.frame().origin).norm() > 1e-12)
    throw Error(ErrorCode::InvalidInput, "intersection_curve needs both surfaces in one chart");
  const BivariateSeries F = s1.g() - s2.g();
  IntersectionCurve c{solve_implicit(F, F.order()), std::nullopt, 0.0};
  if (std::abs(c.phi[1]) > 1e-9)
    throw Error(ErrorCode::NonzeroSlope, "intersection curve has nonzero slope at the origin");
  c.M = c.phi.leading_exponent();
  if (c.M) c.aM = c.phi[*c.M];
  return c;
}

ChartReexpansion reexpand_chart(const Surface& s, const Vec3& contact, const Vec3& tangent, int order) {
  if (std::abs(s.clearance(contact)) > 1e-8)
    throw Error(ErrorCode::InvalidInput, "contact point is not on the surface");
  const Vec3 n = s.unit_normal(contact);
  if (std::abs(tangent.dot(n)) > 1e-6 * tangent.norm() || tangent.norm() == 0)
    throw Error(ErrorCode::InvalidInput, "tangent is not in the tangent plane");
  Vec3 e1 = (tangent - tangent.dot(n) * n).normalized();
  Mat3 R;
  R.col(0) = e1;
  R.col(1) = n.cross(e1);
  R.col(2) = n;
  Frame f{R, contact};
  return {f, reexpand(s, f, order)};
}

}  // namespace geoobs
