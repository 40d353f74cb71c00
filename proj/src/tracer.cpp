#include "geoobs/tracer.hpp"

#include <algorithm>
#include <cmath>

#include "geoobs/errors.hpp"

namespace geoobs {

namespace {

constexpr double kOnSurfaceTol = 1e-9;
constexpr double kPenetrationTol = 1e-12;
constexpr double kAmbiguousCurvature = 1e-9;

double zpp_of(const Surface::Jet& j, double vx, double vy) {
  return (j.gxx * vx * vx + 2.0 * j.gxy * vx * vy + j.gyy * vy * vy) / (1.0 + j.gx * j.gx + j.gy * j.gy);
}

struct Deriv {
  Vec3 dq, dw;
};

Deriv rhs(const Surface& s, const Vec3& q, const Vec3& w) {
  const auto j = s.jet(q.x(), q.y());
  const double a = zpp_of(j, w.x(), w.y());
  return {w, a * Vec3(-j.gx, -j.gy, 1.0)};
}

struct Stepped {
  GeodesicState st;
  double drift;
};

// RK4 in the surface chart, then back onto the surface and its tangent plane
Stepped rk4_project(const Surface& surf, const GeodesicState& st, double h) {
  const Frame& f = surf.frame();
  const Vec3 q = f.to_local(st.position), w = f.dir_to_local(st.velocity);
  const Deriv k1 = rhs(surf, q, w);
  const Deriv k2 = rhs(surf, q + 0.5 * h * k1.dq, w + 0.5 * h * k1.dw);
  const Deriv k3 = rhs(surf, q + 0.5 * h * k2.dq, w + 0.5 * h * k2.dw);
  const Deriv k4 = rhs(surf, q + h * k3.dq, w + h * k3.dw);
  Vec3 q1 = q + h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  Vec3 w1 = w + h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
  const auto j = surf.jet(q1.x(), q1.y());
  q1.z() = j.g;
  const Vec3 n = Vec3(-j.gx, -j.gy, 1.0).normalized();
  w1 -= w1.dot(n) * n;
  const double drift = std::abs(w1.norm() - 1.0);
  w1.normalize();
  GeodesicState out = st;
  out.position = f.to_world(q1);
  out.velocity = f.dir_to_world(w1);
  out.s = st.s + h;
  return {out, drift};
}

bool inside_charts(const std::vector<Surface>& surfaces, const Vec3& p) {
  for (const auto& s : surfaces)
    if (!s.in_chart(p)) return false;
  return true;
}

// F_k and dF_k/dt along a unit direction v
std::pair<double, double> clearance_and_slope(const Surface& s, const Vec3& p, const Vec3& v) {
  const Vec3 q = s.frame().to_local(p), w = s.frame().dir_to_local(v);
  const auto j = s.jet(q.x(), q.y());
  return {j.g - q.z(), j.gx * w.x() + j.gy * w.y() - w.z()};
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// largest t with p + t v still in every chart box
double chart_exit_time(const std::vector<Surface>& surfaces, const Vec3& p, const Vec3& v) {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& s : surfaces) {
    const Vec3 q = s.frame().to_local(p), w = s.frame().dir_to_local(v);
    const double r = s.chart_radius();
    for (int a = 0; a < 2; ++a) {
      if (w[a] > 0) t = std::min(t, (r - q[a]) / w[a]);
      if (w[a] < 0) t = std::min(t, (-r - q[a]) / w[a]);
    }
  }
  return std::max(t, 0.0);
}

double ball_exit_time(const Vec3& center, double eps, const Vec3& p, const Vec3& v) {
  const Vec3 d = p - center;
  const double b = d.dot(v), c = d.squaredNorm() - eps * eps;
  const double disc = b * b - c;
  if (disc <= 0) return 0.0;
  return std::max(0.0, -b + std::sqrt(disc));
}

template <class F>
double golden_min(F&& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

void validate_state(const GeodesicState& st, const std::vector<Surface>& surfaces) {
  if (surfaces.empty()) throw Error(ErrorCode::InvalidInput, "at least one surface is required");
  if (!st.position.allFinite() || !st.velocity.allFinite())
    throw Error(ErrorCode::InconsistentInitialState, "initial state is not finite");
  if (std::abs(st.velocity.norm() - 1.0) > 1e-9)
    throw Error(ErrorCode::InconsistentInitialState, "initial velocity must be unit length");
  if (st.surface != kInterior && (st.surface < 0 || st.surface >= static_cast<int>(surfaces.size())))
    throw Error(ErrorCode::InconsistentInitialState, "surface index out of range");
  for (int k = 0; k < static_cast<int>(surfaces.size()); ++k) {
    const double c = surfaces[k].clearance(st.position);
    if (k == st.surface) {
      if (std::abs(c) > kOnSurfaceTol)
        throw Error(ErrorCode::InconsistentInitialState, "on-surface state is off its surface");
      if (std::abs(st.velocity.dot(surfaces[k].unit_normal(st.position))) > 1e-8)
        throw Error(ErrorCode::InconsistentInitialState, "on-surface velocity is not tangent");
    } else if (c < -kOnSurfaceTol) {
      throw Error(ErrorCode::InconsistentInitialState, "initial point lies inside an obstacle");
    }
  }
}

class Tracer {
 public:
  Tracer(const std::vector<Surface>& surfaces, double eps, const TraceLimits& limits, const Vec3* target)
      : surf_(surfaces), eps_(eps), lim_(limits), target_(target) {
    if (!(eps > 0)) throw Error(ErrorCode::InvalidInput, "eps must be positive");
    if (!(limits.ds > 0)) throw Error(ErrorCode::InvalidInput, "ds must be positive");
    if (limits.max_segments < 1) throw Error(ErrorCode::InvalidInput, "max_segments must be >= 1");
  }

  TraceResult run(GeodesicState st) {
    validate_state(st, surf_);
    res_.eps = eps_;
    res_.limits = lim_;
    res_.origin = st.position;
    res_.min_boundary_curvature = std::numeric_limits<double>::infinity();
    center_ = st.position;
    sample(st, st.surface == kInterior ? SegmentKind::Line : SegmentKind::Boundary);

    if (!inside_charts(surf_, st.position)) return finish(st, Termination::LeftChart);
    // a concave tangent start never sticks to the surface
    if (st.on_surface() && normal_factor(surf_[st.surface], st.position, st.velocity) < -lim_.liftoff_tol)
      st.surface = kInterior;

    for (;;) {
      std::optional<Termination> done =
          st.on_surface() ? boundary_phase(st) : line_phase(st);
      if (done) return finish(st, *done);
      if (static_cast<int>(res_.segments.size()) >= lim_.max_segments)
        return finish(st, Termination::MaxSegments);
    }
  }

 private:
  enum class Ev { None, Ball, Chart, Penetrate, Liftoff, Depart, Closest };

  Ev boundary_event(const GeodesicState& st, int* which) const {
    if ((st.position - center_).norm() > eps_) return Ev::Ball;
    if (!inside_charts(surf_, st.position)) return Ev::Chart;
    for (int k = 0; k < static_cast<int>(surf_.size()); ++k)
      if (k != st.surface && surf_[k].clearance(st.position) < -kPenetrationTol) {
        if (which) *which = k;
        return Ev::Penetrate;
      }
    if (normal_factor(surf_[st.surface], st.position, st.velocity) < -lim_.liftoff_tol) return Ev::Liftoff;
    if (target_) {
      const Vec3 d = *target_ - st.position;
      if (d.dot(surf_[st.surface].unit_normal(st.position)) < 0) return Ev::Depart;
      if (d.dot(st.velocity) < 0) return Ev::Closest;
    }
    return Ev::None;
  }

  std::optional<Termination> boundary_phase(GeodesicState& st) {
    const int i = st.surface;
    const Surface& s = surf_[i];
    Segment seg{SegmentKind::Boundary, i, st.s, st.s, st.position, st.position, std::nullopt};
    int since_sample = 0;

    Ev ev = boundary_event(st, nullptr);
    int which = -1;
    while (ev == Ev::None) {
      if (res_.steps >= lim_.max_steps) {
        close(seg, st);
        return Termination::StepLimit;
      }
      ++res_.steps;
      Stepped nx = rk4_project(s, st, lim_.ds);
      Ev e = boundary_event(nx.st, &which);
      if (e != Ev::None) {
        // shrink the step until the event is pinned to event_tol
        double lo = 0.0, hi = lim_.ds;
        while (hi - lo > lim_.event_tol) {
          const double mid = 0.5 * (lo + hi);
          if (boundary_event(rk4_project(s, st, mid).st, nullptr) != Ev::None)
            hi = mid;
          else
            lo = mid;
        }
        nx = rk4_project(s, st, hi);
        e = boundary_event(nx.st, &which);
        if (e == Ev::None) e = Ev::Liftoff;  // numerically on the edge; treat as departure
      }
      accept(nx, s);
      st = nx.st;
      ev = e;
      if (ev == Ev::None && ++since_sample >= lim_.sample_stride) {
        sample(st, SegmentKind::Boundary);
        since_sample = 0;
      }
    }
    close(seg, st);
    sample(st, SegmentKind::Boundary);

    switch (ev) {
      case Ev::Ball:
        return Termination::ExitedBall;
      case Ev::Chart:
        return Termination::LeftChart;
      case Ev::Closest:
        return Termination::ReachedTarget;
      case Ev::Penetrate: {
        const auto [f, slope] = clearance_and_slope(surf_[which], st.position, st.velocity);
        (void)f;
        if (std::abs(slope) >= lim_.tangency_tol) return Termination::TransversalImpact;
        if (contact_decision(st, surf_, which, true, lim_.liftoff_tol) != ContactDecision::Attach)
          return Termination::TransversalImpact;
        attach(st, which, st.velocity);
        return std::nullopt;
      }
      case Ev::Liftoff:
      case Ev::Depart:
      default:
        switch_to(st, SegmentKind::Boundary, i, SegmentKind::Line, kInterior, st.velocity, st.velocity, false);
        st.surface = kInterior;
        return std::nullopt;
    }
  }

  std::optional<Termination> line_phase(GeodesicState& st) {
    Segment seg{SegmentKind::Line, kInterior, st.s, st.s, st.position, st.position, std::nullopt};
    {
      const Vec3 w = surf_[0].frame().dir_to_local(st.velocity);
      if (std::abs(w.x()) > 1e-12) seg.line_slope = w.y() / w.x();
    }
    const Vec3 p0 = st.position, v = st.velocity;
    const double s0 = st.s;

    double t_end = ball_exit_time(center_, eps_, p0, v);
    Termination end_kind = Termination::ExitedBall;
    const double t_chart = chart_exit_time(surf_, p0, v);
    if (t_chart < t_end) {
      t_end = t_chart;
      end_kind = Termination::LeftChart;
    }
    if (target_) {
      const double t_tgt = (*target_ - p0).dot(v);
      if (t_tgt < t_end) {
        t_end = std::max(t_tgt, 0.0);
        end_kind = Termination::ReachedTarget;
      }
    }

    double t = 0.0;
    for (;;) {
      GeodesicState probe = st;
      probe.position = p0 + t * v;
      probe.s = s0 + t;
      auto hit = line_contact(probe, surf_, lim_, t_end - t);
      if (!hit) break;
      const double th = hit->s_hit - s0;
      GeodesicState at = st;
      at.position = hit->point;
      at.s = hit->s_hit;
      const ContactDecision d = contact_decision(at, surf_, hit->surface, hit->tangential, lim_.liftoff_tol);
      if (d == ContactDecision::ContinueStraight) {
        t = th;
        continue;
      }
      st = at;
      close(seg, st);
      sample(st, SegmentKind::Line);
      if (d == ContactDecision::TerminateTransversal) return Termination::TransversalImpact;
      attach(st, hit->surface, v);
      return std::nullopt;
    }
    st.position = p0 + t_end * v;
    st.s = s0 + t_end;
    close(seg, st);
    sample(st, SegmentKind::Line);
    return end_kind;
  }

  void attach(GeodesicState& st, int k, const Vec3& v_in) {
    const Surface& s = surf_[k];
    Vec3 q = s.frame().to_local(st.position);
    q.z() = s.height(q.x(), q.y());
    st.position = s.frame().to_world(q);
    const Vec3 n = s.unit_normal(st.position);
    Vec3 v = v_in - v_in.dot(n) * n;
    v.normalize();
    const bool ambiguous = std::abs(normal_factor(s, st.position, v)) <= kAmbiguousCurvature;
    const SegmentKind from = st.surface == kInterior ? SegmentKind::Line : SegmentKind::Boundary;
    switch_to(st, from, st.surface, SegmentKind::Boundary, k, v_in, v, ambiguous);
    st.velocity = v;
    st.surface = k;
  }

  void switch_to(const GeodesicState& st, SegmentKind from, int from_surface, SegmentKind to, int to_surface,
                 const Vec3& v_in, const Vec3& v_out, bool ambiguous) {
    SwitchPoint sp;
    sp.s = st.s;
    sp.point = st.position;
    sp.from_kind = from;
    sp.from_surface = from_surface;
    sp.to_kind = to;
    sp.to_surface = to_surface;
    sp.velocity = v_out;
    sp.turn_angle = angle_between(v_in, v_out);
    sp.ambiguous = ambiguous;
    res_.max_turn_angle = std::max(res_.max_turn_angle, sp.turn_angle);
    res_.switch_points.push_back(sp);
  }

  void accept(const Stepped& nx, const Surface& s) {
    res_.max_speed_drift = std::max(res_.max_speed_drift, nx.drift);
    res_.max_surface_residual = std::max(res_.max_surface_residual, std::abs(s.clearance(nx.st.position)));
    res_.min_boundary_curvature =
        std::min(res_.min_boundary_curvature, normal_factor(s, nx.st.position, nx.st.velocity));
  }

  void close(Segment& seg, const GeodesicState& st) {
    seg.s_end = st.s;
    seg.end = st.position;
    res_.segments.push_back(seg);
  }

  void sample(const GeodesicState& st, SegmentKind k) { res_.samples.push_back({st.s, st.position, k}); }

  TraceResult finish(const GeodesicState& st, Termination t) {
    res_.termination = t;
    res_.final_state = st;
    if (!std::isfinite(res_.min_boundary_curvature)) res_.min_boundary_curvature = 0.0;
    return std::move(res_);
  }

  const std::vector<Surface>& surf_;
  double eps_;
  TraceLimits lim_;
  const Vec3* target_;
  Vec3 center_ = Vec3::Zero();
  TraceResult res_;
};

}  // namespace

int TraceResult::interval_count() const {
  return static_cast<int>(std::count_if(segments.begin(), segments.end(),
                                        [](const Segment& s) { return s.kind == SegmentKind::Line; }));
}

SurfaceAccel surface_accel(const Surface& s, double x, double y, double vx, double vy) {
  const auto j = s.jet(x, y);
  const double a = zpp_of(j, vx, vy);
  return {a * Vec3(-j.gx, -j.gy, 1.0), a};
}

double normal_factor(const Surface& s, const Vec3& position, const Vec3& velocity) {
  const Vec3 q = s.frame().to_local(position), w = s.frame().dir_to_local(velocity);
  return zpp_of(s.jet(q.x(), q.y()), w.x(), w.y());
}

GeodesicState tangent_state(const std::vector<Surface>& surfaces, int index, double x, double y, double theta) {
  if (index < 0 || index >= static_cast<int>(surfaces.size()))
    throw Error(ErrorCode::InvalidInput, "surface index out of range");
  const Surface& s = surfaces[index];
  const auto j = s.jet(x, y);
  const double c = std::cos(theta), sn = std::sin(theta);
  const Vec3 w = Vec3(c, sn, j.gx * c + j.gy * sn).normalized();
  GeodesicState st;
  st.position = s.frame().to_world(Vec3(x, y, j.g));
  st.velocity = s.frame().dir_to_world(w);
  st.surface = index;
  return st;
}

GeodesicState step_boundary(const std::vector<Surface>& surfaces, const GeodesicState& state, double ds) {
  if (!state.on_surface() || state.surface >= static_cast<int>(surfaces.size()))
    throw Error(ErrorCode::InvalidInput, "step_boundary needs an on-surface state");
  const Surface& s = surfaces[state.surface];
  GeodesicState out = rk4_project(s, state, ds).st;
  if (!s.in_chart(out.position)) throw Error(ErrorCode::LeftChart, "boundary step left the chart box");
  return out;
}

bool liftoff_event(const std::vector<Surface>& surfaces, const GeodesicState& state, double tol) {
  if (!state.on_surface() || state.surface >= static_cast<int>(surfaces.size()))
    throw Error(ErrorCode::InvalidInput, "liftoff_event needs an on-surface state");
  return normal_factor(surfaces[state.surface], state.position, state.velocity) < -tol;
}

std::optional<ContactEvent> line_contact(const GeodesicState& state, const std::vector<Surface>& surfaces,
                                         const TraceLimits& lim, double t_max) {
  const Vec3 p = state.position, v = state.velocity;
  t_max = std::min(t_max, chart_exit_time(surfaces, p, v));
  const double h = lim.ds;
  const int n = static_cast<int>(surfaces.size());
  auto F = [&](int k, double t) { return surfaces[k].clearance(p + t * v); };
  auto dF = [&](int k, double t) { return clearance_and_slope(surfaces[k], p + t * v, v).second; };

  auto root = [&](int k, double a, double b) {
    double fa = F(k, a);
    while (b - a > 1e-13) {
      const double m = 0.5 * (a + b), fm = F(k, m);
      if ((fm > 0) == (fa > 0) && fm != 0) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return b;
  };
  // critical point of F_k near t, used to put grazing contacts where F' = 0
  auto critical = [&](int k, double a, double b, double fallback) {
    double da = dF(k, a), db = dF(k, b);
    if ((da > 0) == (db > 0)) return fallback;
    while (b - a > 1e-14) {
      const double m = 0.5 * (a + b), dm = dF(k, m);
      if ((dm > 0) == (da > 0)) {
        a = m;
        da = dm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  double t0 = lim.deadband;
  if (t0 >= t_max) return std::nullopt;
  std::vector<double> f_prev2(n, std::numeric_limits<double>::quiet_NaN()), f_prev(n);
  for (int k = 0; k < n; ++k) f_prev[k] = F(k, t0);
  double t_prev2 = t0, t_prev = t0;

  while (t_prev < t_max) {
    const double t_cur = std::min(t_prev + h, t_max);
    std::optional<ContactEvent> best;
    auto offer = [&](int k, double th, bool tangential) {
      if (best && best->s_hit - state.s <= th) return;
      ContactEvent e;
      e.surface = k;
      e.s_hit = state.s + th;
      e.point = p + th * v;
      e.slope = dF(k, th);
      e.tangential = tangential;
      best = e;
    };
    for (int k = 0; k < n; ++k) {
      const double fc = F(k, t_cur);
      const double fp = f_prev[k];
      if ((fp > 0 && fc <= 0) || (fp < 0 && fc >= 0) || fp == 0) {
        double tr = fp == 0 ? t_prev : root(k, t_prev, t_cur);
        bool tang = std::abs(dF(k, tr)) < lim.tangency_tol;
        if (tang) tr = critical(k, std::max(t0, tr - h), std::min(t_max, tr + h), tr);
        offer(k, tr, tang);
      } else if (!std::isnan(f_prev2[k]) && fp > 0 && fp < f_prev2[k] && fp <= fc && fp < 1e-6) {
        // clearance dipped near zero between samples
        const double tm = golden_min([&](double t) { return F(k, t); }, t_prev2, t_cur, 1e-13);
        const double fm = F(k, tm);
        if (fm <= lim.graze_tol) {
          const double tr = fm < 0 ? critical(k, t_prev2, t_cur, tm) : tm;
          offer(k, tr, std::abs(dF(k, tr)) < lim.tangency_tol);
        }
      }
      f_prev2[k] = fp;
      f_prev[k] = fc;
    }
    if (best) return best;
    t_prev2 = t_prev;
    t_prev = t_cur;
  }
  return std::nullopt;
}

ContactDecision contact_decision(const GeodesicState& at_contact, const std::vector<Surface>& surfaces, int index,
                                 bool tangential, double tol) {
  if (index < 0 || index >= static_cast<int>(surfaces.size()))
    throw Error(ErrorCode::InvalidInput, "surface index out of range");
  if (!tangential) return ContactDecision::TerminateTransversal;
  const Surface& s = surfaces[index];
  const Vec3 n = s.unit_normal(at_contact.position);
  Vec3 v = at_contact.velocity - at_contact.velocity.dot(n) * n;
  if (v.norm() == 0) return ContactDecision::TerminateTransversal;
  v.normalize();
  return normal_factor(s, at_contact.position, v) >= -tol ? ContactDecision::Attach
                                                          : ContactDecision::ContinueStraight;
}

TraceResult trace(const GeodesicState& s0, const std::vector<Surface>& surfaces, double eps,
                  const TraceLimits& limits) {
  return Tracer(surfaces, eps, limits, nullptr).run(s0);
}

TraceResult trace_toward(const GeodesicState& s0, const std::vector<Surface>& surfaces, const Vec3& target,
                         double eps, const TraceLimits& limits) {
  return Tracer(surfaces, eps, limits, &target).run(s0);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ExitedBall: return "exited_ball";
    case Termination::MaxSegments: return "max_segments";
    case Termination::TransversalImpact: return "transversal_impact";
    case Termination::LeftChart: return "left_chart";
    case Termination::StepLimit: return "step_limit";
    case Termination::ReachedTarget: return "reached_target";
  }
  return "unknown";
}

std::string_view to_string(SegmentKind k) { return k == SegmentKind::Boundary ? "boundary" : "line"; }

}  // namespace geoobs
