#include "geoobs/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>

#include "geoobs/errors.hpp"

namespace geoobs {

namespace {

constexpr double kOnSurfaceTol = 1e-9;

struct SweepContext {
  BoundPrediction prediction;
  bool convex_up = false;
  bool alternating = false;  // two-surface MainAlternating
};

SweepContext make_context(const std::vector<Surface>& surfaces, const Vec3& p) {
  SweepContext ctx;
  if (surfaces.size() == 1) {
    const Surface& s = surfaces[0];
    const Vec3 n = s.unit_normal(p);
    Vec3 t = s.frame().dir_to_world(Vec3::UnitX());
    t -= t.dot(n) * n;
    if (t.norm() < 1e-9) t = n.unitOrthogonal();
    const auto rc = reexpand_chart(s, p, t.normalized());
    const HessianClass h = hessian_classify(rc.k);
    ctx.convex_up = h.shape == Shape::ConvexUp;
    ctx.prediction = predict_bound(h);
  } else if (surfaces.size() == 2) {
    try {
      const auto c = classify_two_surfaces(surfaces[0], surfaces[1], p);
      ctx.prediction = predict_bound(c);
      ctx.alternating = c.label == CaseLabel::MainAlternating;
    } catch (const Error& e) {
      ctx.prediction = BoundPrediction{std::nullopt, "switch_points", std::string("unclassified: ") + e.what()};
    }
  } else {
    ctx.prediction = BoundPrediction{std::nullopt, "switch_points", "no prediction for three or more surfaces"};
  }
  return ctx;
}

bool trace_invariants_ok(const TraceResult& t, bool convex_up) {
  if (t.max_speed_drift > 1e-8 || t.max_surface_residual > 1e-9 || t.max_turn_angle > 1e-7) return false;
  for (size_t i = 1; i < t.segments.size(); ++i)
    if (t.segments[i].s_start != t.segments[i - 1].s_end) return false;
  if (convex_up && t.min_boundary_curvature < -1e-10) return false;
  return true;
}

struct Task {
  int surface;
  double theta;
};

SweepRecord run_task(const std::vector<Surface>& surfaces, const Vec3& p, const Task& task,
                     const SweepConfig& cfg, const SweepContext& ctx) {
  SweepRecord r;
  r.direction = task.theta;
  r.surface = task.surface;
  const Vec3 q = surfaces[task.surface].frame().to_local(p);
  const GeodesicState st = tangent_state(surfaces, task.surface, q.x(), q.y(), task.theta);
  for (int k = 0; k < static_cast<int>(surfaces.size()); ++k) {
    if (k == task.surface || std::abs(surfaces[k].clearance(p)) > kOnSurfaceTol) continue;
    if (st.velocity.dot(surfaces[k].unit_normal(p)) > 1e-12) {
      r.feasible = false;
      return r;
    }
  }
  const TraceResult t = trace(st, surfaces, cfg.eps, cfg.limits);
  r.intervals = t.interval_count();
  r.switches = t.switch_count();
  r.termination = t.termination;
  if (ctx.prediction.bound) {
    const int observed = ctx.prediction.quantity == "intervals" ? r.intervals : r.switches;
    r.within_bound = observed <= *ctx.prediction.bound;
  }
  if (ctx.alternating) r.alternation_ok = alternation_check(t).ok;
  r.invariants_ok = trace_invariants_ok(t, ctx.convex_up);
  return r;
}

void validate_sweep(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg) {
  if (surfaces.empty() || surfaces.size() > 2)
    throw Error(ErrorCode::InvalidInput, "sweeps take one or two surfaces");
  if (cfg.n_dirs < 4) throw Error(ErrorCode::InvalidInput, "n_dirs must be >= 4");
  if (!(cfg.eps > 0)) throw Error(ErrorCode::InvalidInput, "eps must be positive");
  for (const auto& s : surfaces)
    if (std::abs(s.clearance(p)) > kOnSurfaceTol)
      throw Error(ErrorCode::InvalidInput, "sweep start point must lie on every surface");
}

std::vector<Task> make_tasks(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg) {
  std::vector<Task> tasks;
  const auto angles = sweep_angles(surfaces, p, cfg);
  for (int i = 0; i < static_cast<int>(surfaces.size()); ++i)
    for (double a : angles) tasks.push_back({i, a});
  return tasks;
}

SweepReport assemble(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg,
                     const SweepContext& ctx, std::vector<SweepRecord> records) {
  SweepReport rep;
  rep.config = cfg;
  rep.point = p;
  rep.surface_count = static_cast<int>(surfaces.size());
  rep.prediction = ctx.prediction;
  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return a.surface != b.surface ? a.surface < b.surface : a.direction < b.direction;
  });
  for (const auto& r : records) {
    if (!r.feasible) continue;
    rep.max_interval_count = std::max(rep.max_interval_count, r.intervals);
    rep.max_switch_count = std::max(rep.max_switch_count, r.switches);
    rep.all_within_bound = rep.all_within_bound && r.within_bound;
    rep.invariants_ok = rep.invariants_ok && r.invariants_ok && r.alternation_ok;
  }
  rep.records = std::move(records);
  return rep;
}

}  // namespace

int worker_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("GEOOBS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<int>(std::min<long>(v, n));
  }
  return std::max(1, n);
}

std::vector<double> sweep_angles(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg) {
  const double two_pi = 2 * std::numbers::pi;
  const double step = two_pi / cfg.n_dirs;
  std::vector<double> out;
  for (int j = 0; j < cfg.n_dirs; ++j) out.push_back(step * j);

  if (cfg.refine && surfaces.size() == 1) {
    // wedge boundaries are only known in chart angles when p is a critical point at the chart origin
    const Surface& s = surfaces[0];
    const Vec3 q = s.frame().to_local(p);
    const auto j = s.jet(q.x(), q.y());
    if (q.head<2>().norm() < 1e-12 && std::hypot(j.gx, j.gy) < 1e-12) {
      try {
        const auto w = wedge_decompose(s.g());
        for (double a : w.boundary_angles)
          for (int k = -9; k <= 9; ++k) {
            double t = std::fmod(a + k * step / 10, two_pi);
            if (t < 0) t += two_pi;
            out.push_back(t);
          }
      } catch (const Error&) {
        // flat or degenerate: nothing to refine
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return b - a < 1e-12; }), out.end());
  return out;
}

SweepReport sweep_directions(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg) {
  validate_sweep(surfaces, p, cfg);
  const SweepContext ctx = make_context(surfaces, p);
  const auto tasks = make_tasks(surfaces, p, cfg);
  std::vector<SweepRecord> records(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_threads())
  for (long i = 0; i < n; ++i) {
    try {
      records[i] = run_task(surfaces, p, tasks[i], cfg, ctx);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return assemble(surfaces, p, cfg, ctx, std::move(records));
}

SweepReport sweep_directions_serial(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg) {
  validate_sweep(surfaces, p, cfg);
  const SweepContext ctx = make_context(surfaces, p);
  std::vector<SweepRecord> records;
  for (const auto& t : make_tasks(surfaces, p, cfg)) records.push_back(run_task(surfaces, p, t, cfg, ctx));
  return assemble(surfaces, p, cfg, ctx, std::move(records));
}

CascadeReport epsilon_cascade(const std::vector<Surface>& surfaces, const GeodesicState& s0,
                              const std::vector<double>& eps_list, const TraceLimits& limits) {
  if (eps_list.size() < 3) throw Error(ErrorCode::InvalidInput, "eps list needs at least three values");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0)) throw Error(ErrorCode::InvalidInput, "eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw Error(ErrorCode::InvalidInput, "eps list must be strictly descending");
  }
  const TraceResult t = trace(s0, surfaces, eps_list.front(), limits);
  CascadeReport r;
  r.eps = eps_list;
  r.limits = limits;
  r.start = s0;
  r.termination = t.termination;
  for (double e : eps_list) {
    r.counts.push_back(static_cast<int>(std::count_if(t.switch_points.begin(), t.switch_points.end(),
                                                      [&](const SwitchPoint& sp) { return sp.s - s0.s < e; })));
  }
  for (size_t i = 1; i < r.counts.size(); ++i) r.monotone = r.monotone && r.counts[i] <= r.counts[i - 1];
  r.stabilized = r.counts[r.counts.size() - 1] == r.counts[r.counts.size() - 2];
  return r;
}

AlternationResult alternation_check(const TraceResult& t) {
  const Segment* last_boundary = nullptr;
  for (int i = 0; i < static_cast<int>(t.segments.size()); ++i) {
    const Segment& seg = t.segments[i];
    if (i > 0 && seg.kind == t.segments[i - 1].kind) return {false, i};
    if (seg.kind == SegmentKind::Boundary) {
      if (last_boundary && last_boundary->surface == seg.surface) return {false, i};
      last_boundary = &seg;
    }
  }
  return {};
}

SignLemmaReport check_sign_lemmas(const Surface& s, const std::vector<std::pair<Vec3, Vec3>>& contacts, int order_n,
                                  int expected_sign) {
  if (order_n < 2) throw Error(ErrorCode::InvalidInput, "order_n must be >= 2");
  if (expected_sign != 1 && expected_sign != -1) throw Error(ErrorCode::InvalidInput, "expected_sign must be +1 or -1");
  SignLemmaReport rep;
  rep.order_n = order_n;
  rep.expected_sign = expected_sign;
  int agree = 0;
  for (const auto& [p, t] : contacts) {
    const auto rc = reexpand_chart(s, p, t, std::max(kDefaultOrder, order_n));
    ContactCoefficients c{p, t, {}, true};
    for (int n = 2; n <= order_n; ++n) {
      const double b = rc.k.coeff(n, 0);
      c.b.push_back(b);
      c.agrees = c.agrees && b * expected_sign > 0;
    }
    agree += c.agrees;
    rep.contacts.push_back(std::move(c));
  }
  rep.agreement = contacts.empty() ? 0.0 : static_cast<double>(agree) / contacts.size();
  return rep;
}

std::vector<std::pair<Vec3, Vec3>> traced_contacts(const std::vector<Surface>& surfaces,
                                                   const std::vector<GeodesicState>& starts, double eps,
                                                   const TraceLimits& limits) {
  std::vector<std::vector<std::pair<Vec3, Vec3>>> per(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  const long n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_threads())
  for (long i = 0; i < n; ++i) {
    try {
      for (const auto& sp : trace(starts[i], surfaces, eps, limits).switch_points)
        per[i].emplace_back(sp.point, sp.velocity);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<std::pair<Vec3, Vec3>> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace geoobs
