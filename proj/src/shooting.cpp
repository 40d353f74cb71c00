#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>

#include "geoobs/errors.hpp"
#include "geoobs/tracer.hpp"

namespace geoobs {

namespace {

constexpr double kFeasTol = 1e-9;

// smallest clearance over all surfaces along p + t u, t in [t0, t1]
double min_clearance(const std::vector<Surface>& surfaces, const Vec3& p, const Vec3& u, double t0, double t1) {
  const int n = 2000;
  const double h = (t1 - t0) / n;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : surfaces) {
    auto F = [&](double t) { return s.clearance(p + t * u); };
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) f[i] = F(t0 + i * h);
    for (int i = 0; i <= n; ++i) {
      best = std::min(best, f[i]);
      const bool local_min = (i == 0 || f[i] <= f[i - 1]) && (i == n || f[i] <= f[i + 1]);
      if (!local_min || f[i] > 1e-3) continue;
      // golden refinement inside the neighbouring cells
      double a = t0 + std::max(0, i - 1) * h, b = t0 + std::min(n, i + 1) * h;
      const double r = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - r * (b - a), d = a + r * (b - a), fc = F(c), fd = F(d);
      while (b - a > 1e-14 * std::max(1.0, t1)) {
        if (fc < fd) {
          b = d; d = c; fd = fc; c = b - r * (b - a); fc = F(c);
        } else {
          a = c; c = d; fc = fd; d = a + r * (b - a); fd = F(d);
        }
      }
      best = std::min(best, std::min(fc, fd));
    }
  }
  return best;
}

// a unit vector orthogonal to d, preferring the component of `hint`
Vec3 orthogonal_to(const Vec3& d, const Vec3& hint) {
  Vec3 e = hint - hint.dot(d) * d;
  if (e.norm() < 1e-9) {
    e = d.unitOrthogonal();
  }
  return e.normalized();
}

template <class F>
double golden_argmin(F&& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a), fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + r * (b - a); fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace

ShootResult shoot_between(const Vec3& a, const Vec3& b, const std::vector<Surface>& surfaces, double tol,
                          const TraceLimits& limits) {
  if (surfaces.empty()) throw Error(ErrorCode::InvalidInput, "at least one surface is required");
  if (!(tol > 0)) throw Error(ErrorCode::InvalidInput, "tol must be positive");
  if (!a.allFinite() || !b.allFinite()) throw Error(ErrorCode::InvalidInput, "endpoints must be finite");
  int on_surface = kInterior;
  for (int k = 0; k < static_cast<int>(surfaces.size()); ++k) {
    const auto& s = surfaces[k];
    if (!s.in_chart(a) || !s.in_chart(b)) throw Error(ErrorCode::InvalidInput, "endpoints must lie in the chart");
    if (s.clearance(a) < -kFeasTol || s.clearance(b) < -kFeasTol)
      throw Error(ErrorCode::InvalidInput, "endpoints must lie in the feasible region");
    if (on_surface == kInterior && std::abs(s.clearance(a)) <= kFeasTol) on_surface = k;
  }

  const double L = (b - a).norm();
  ShootResult out;
  if (L == 0 || min_clearance(surfaces, a, (b - a) / std::max(L, 1e-300), 0.0, L) >= -kFeasTol) {
    // the chord is feasible, so it is the shortest path
    TraceResult t;
    t.origin = a;
    t.limits = limits;
    t.eps = L;
    Segment seg{SegmentKind::Line, kInterior, 0.0, L, a, b, std::nullopt};
    t.segments.push_back(seg);
    t.samples = {{0.0, a, SegmentKind::Line}, {L, b, SegmentKind::Line}};
    t.termination = Termination::ReachedTarget;
    t.final_state.position = b;
    t.final_state.velocity = L > 0 ? Vec3((b - a) / L) : Vec3::UnitX();
    t.final_state.s = L;
    out.trace = std::move(t);
    out.length = L;
    return out;
  }

  const Vec3 d = (b - a) / L;
  const double eps = 4.0 * L;
  std::function<std::optional<GeodesicState>(double)> start;

  if (on_surface != kInterior) {
    const Vec3 n = surfaces[on_surface].unit_normal(a);
    const Vec3 e1 = orthogonal_to(n, d);
    const Vec3 e2 = n.cross(e1);
    start = [=](double psi) -> std::optional<GeodesicState> {
      GeodesicState st;
      st.position = a;
      st.velocity = std::cos(psi) * e1 + std::sin(psi) * e2;
      st.surface = on_surface;
      return st;
    };
  } else {
    // deepest chord penetration tells which way is around the obstacle
    int worst = 0;
    double worst_f = std::numeric_limits<double>::infinity();
    Vec3 worst_p = a;
    for (int k = 0; k < static_cast<int>(surfaces.size()); ++k)
      for (int i = 1; i < 400; ++i) {
        const Vec3 p = a + (L * i / 400.0) * d;
        const double f = surfaces[k].clearance(p);
        if (f < worst_f) {
          worst_f = f;
          worst = k;
          worst_p = p;
        }
      }
    const Vec3 e1 = orthogonal_to(d, -surfaces[worst].unit_normal(worst_p));
    const Vec3 e2 = d.cross(e1);
    const double reach = 2.0 * L;
    start = [=, &surfaces](double psi) -> std::optional<GeodesicState> {
      const Vec3 side = std::cos(psi) * e1 + std::sin(psi) * e2;
      auto dir = [&](double phi) { return Vec3(std::cos(phi) * d + std::sin(phi) * side); };
      auto blocked = [&](double phi) { return min_clearance(surfaces, a, dir(phi), 1e-9, reach) < 0; };
      double lo = 0.0, hi = std::numbers::pi / 2;
      if (blocked(hi)) return std::nullopt;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (blocked(mid) ? lo : hi) = mid;
      }
      GeodesicState st;
      st.position = a;
      st.velocity = dir(hi);
      return st;
    };
  }

  TraceResult best_trace;
  double best_miss = std::numeric_limits<double>::infinity();
  double best_psi = 0.0;
  auto miss = [&](double psi) {
    const auto st = start(psi);
    if (!st) return std::numeric_limits<double>::infinity();
    TraceResult t = trace_toward(*st, surfaces, b, eps, limits);
    const double m = (t.final_state.position - b).norm();
    if (m < best_miss) {
      best_miss = m;
      best_psi = psi;
      best_trace = std::move(t);
    }
    return m;
  };

  const int coarse = 72;
  const double step = 2.0 * std::numbers::pi / coarse;
  double psi0 = 0.0, m0 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < coarse; ++i) {
    const double psi = -std::numbers::pi + i * step;
    const double m = miss(psi);
    if (m < m0) {
      m0 = m;
      psi0 = psi;
    }
  }
  golden_argmin(miss, psi0 - step, psi0 + step, 1e-13);

  out.miss = best_miss;
  out.parameter = best_psi;
  out.length = best_trace.final_state.s;
  out.trace = std::move(best_trace);
  if (!(best_miss <= tol))
    throw Error(ErrorCode::NonConverged, "shooting did not reach the target (miss " + std::to_string(best_miss) + ")");
  return out;
}

}  // namespace geoobs
