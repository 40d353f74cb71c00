#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "geoobs/geometry.hpp"

namespace geoobs {

inline constexpr int kInterior = -1;

struct GeodesicState {
  Vec3 position = Vec3::Zero();  // world coordinates
  Vec3 velocity = Vec3::UnitX();  // unit
  int surface = kInterior;        // index into the surface list, or kInterior
  double s = 0.0;

  bool on_surface() const { return surface != kInterior; }
};

enum class SegmentKind { Boundary, Line };

struct Segment {
  SegmentKind kind = SegmentKind::Line;
  int surface = kInterior;  // Boundary only
  double s_start = 0.0;
  double s_end = 0.0;
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
  std::optional<double> line_slope;  // dy/dx of a Line, in the first surface's chart
};

struct SwitchPoint {
  double s = 0.0;
  Vec3 point = Vec3::Zero();
  SegmentKind from_kind = SegmentKind::Boundary;
  int from_surface = kInterior;
  SegmentKind to_kind = SegmentKind::Line;
  int to_surface = kInterior;
  Vec3 velocity = Vec3::UnitX();  // outgoing
  double turn_angle = 0.0;        // angle between incoming and outgoing velocity
  bool ambiguous = false;         // grazing attach with (numerically) zero normal curvature
};

enum class Termination { ExitedBall, MaxSegments, TransversalImpact, LeftChart, StepLimit, ReachedTarget };

struct TraceLimits {
  double ds = 1e-4;
  int max_segments = 64;
  long max_steps = 2'000'000;
  double event_tol = 1e-10;      // bisection width for events, in s
  double liftoff_tol = 1e-9;     // depart when z'' < -liftoff_tol
  double tangency_tol = 1e-6;    // |F'| below this is a grazing contact
  double deadband = 1e-6;        // contact search starts this far along a new line
  double graze_tol = 1e-10;      // a clearance minimum below this counts as a touch
  int sample_stride = 20;        // record every n-th boundary step
};

struct TraceSample {
  double s;
  Vec3 point;
  SegmentKind kind;
};

struct TraceResult {
  std::vector<Segment> segments;
  std::vector<SwitchPoint> switch_points;
  std::vector<TraceSample> samples;
  Termination termination = Termination::ExitedBall;
  GeodesicState final_state;
  double eps = 0.0;
  TraceLimits limits;
  Vec3 origin = Vec3::Zero();

  double max_speed_drift = 0.0;       // | |v| - 1 | before renormalization, per step
  double max_surface_residual = 0.0;  // |z - g| on boundary steps after projection
  double min_boundary_curvature = 0.0;  // smallest z'' on accepted boundary steps
  double max_turn_angle = 0.0;
  long steps = 0;

  int interval_count() const;
  int switch_count() const { return static_cast<int>(switch_points.size()); }
  double length() const { return segments.empty() ? 0.0 : segments.back().s_end - segments.front().s_start; }
};

struct SurfaceAccel {
  Vec3 accel;  // gamma'' in chart coordinates
  double zpp;  // scalar normal factor
};

// (vx, vy) are the horizontal components of a unit tangent in the surface chart
SurfaceAccel surface_accel(const Surface& s, double x, double y, double vx, double vy);

// normal factor z'' for a world-space state on surface `s`
double normal_factor(const Surface& s, const Vec3& position, const Vec3& velocity);

// Tangent state on surface `index` at chart point (x, y), heading at angle theta in the chart plane.
GeodesicState tangent_state(const std::vector<Surface>& surfaces, int index, double x, double y,
                            double theta);

GeodesicState step_boundary(const std::vector<Surface>& surfaces, const GeodesicState& state, double ds);

bool liftoff_event(const std::vector<Surface>& surfaces, const GeodesicState& state,
                   double tol = TraceLimits{}.liftoff_tol);

struct ContactEvent {
  int surface = 0;
  double s_hit = 0.0;
  Vec3 point = Vec3::Zero();
  double slope = 0.0;  // dF/ds at the contact
  bool tangential = false;
};

// First contact of the line state.position + t * velocity, t in (deadband, t_max], inside every chart.
std::optional<ContactEvent> line_contact(const GeodesicState& state, const std::vector<Surface>& surfaces,
                                         const TraceLimits& limits = {},
                                         double t_max = std::numeric_limits<double>::infinity());

enum class ContactDecision { Attach, ContinueStraight, TerminateTransversal };

ContactDecision contact_decision(const GeodesicState& at_contact, const std::vector<Surface>& surfaces,
                                 int index, bool tangential, double tol = TraceLimits{}.liftoff_tol);

TraceResult trace(const GeodesicState& s0, const std::vector<Surface>& surfaces, double eps,
                  const TraceLimits& limits = {});

// Same dynamics, but the trace leaves a boundary once the target is in front of the tangent plane
// and stops at the closest approach to the target.
TraceResult trace_toward(const GeodesicState& s0, const std::vector<Surface>& surfaces, const Vec3& target,
                         double eps, const TraceLimits& limits = {});

struct ShootResult {
  TraceResult trace;
  double length = 0.0;
  double miss = 0.0;
  double parameter = 0.0;  // best azimuth
};

// Two-point geodesic by shooting from a; throws NonConverged when the miss stays above tol.
ShootResult shoot_between(const Vec3& a, const Vec3& b, const std::vector<Surface>& surfaces, double tol = 1e-6,
                          const TraceLimits& limits = {});

std::string_view to_string(Termination t);
std::string_view to_string(SegmentKind k);

}  // namespace geoobs
