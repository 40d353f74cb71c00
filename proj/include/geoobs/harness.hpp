#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoobs/classifier.hpp"
#include "geoobs/tracer.hpp"

namespace geoobs {

// Worker count: GEOOBS_THREADS if set to a positive integer, else the OpenMP default.
int worker_threads();

struct SweepConfig {
  int n_dirs = 360;
  double eps = 0.05;
  TraceLimits limits;
  bool refine = true;  // 10x finer directions around wedge boundaries
};

struct SweepRecord {
  double direction = 0.0;  // angle in the start surface's chart plane
  int surface = 0;         // surface the trace starts on
  bool feasible = true;
  int intervals = 0;
  int switches = 0;
  Termination termination = Termination::ExitedBall;
  bool within_bound = true;
  bool alternation_ok = true;
  bool invariants_ok = true;
};

struct SweepReport {
  SweepConfig config;
  Vec3 point = Vec3::Zero();
  int surface_count = 1;
  std::vector<SweepRecord> records;  // sorted by (surface, direction)
  int max_interval_count = 0;
  int max_switch_count = 0;
  BoundPrediction prediction;
  bool all_within_bound = true;
  bool invariants_ok = true;
};

SweepReport sweep_directions(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg = {});
// Single-threaded reference; produces the same report as sweep_directions.
SweepReport sweep_directions_serial(const std::vector<Surface>& surfaces, const Vec3& p,
                                    const SweepConfig& cfg = {});

// Directions the sweep will trace, before feasibility filtering; exposed for tests.
std::vector<double> sweep_angles(const std::vector<Surface>& surfaces, const Vec3& p, const SweepConfig& cfg);

struct CascadeReport {
  std::vector<double> eps;   // descending
  std::vector<int> counts;   // switch points with s < eps
  bool stabilized = false;
  bool monotone = true;
  Termination termination = Termination::ExitedBall;
  TraceLimits limits;
  GeodesicState start;
};

CascadeReport epsilon_cascade(const std::vector<Surface>& surfaces, const GeodesicState& s0,
                              const std::vector<double>& eps_list, const TraceLimits& limits = {});

struct AlternationResult {
  bool ok = true;
  std::optional<int> violation;  // index of the first offending segment
};

AlternationResult alternation_check(const TraceResult& t);

struct ContactCoefficients {
  Vec3 point;
  Vec3 tangent;
  std::vector<double> b;  // pure-u coefficients b_2 .. b_N
  bool agrees = false;
};

struct SignLemmaReport {
  int order_n = 0;
  int expected_sign = 1;
  std::vector<ContactCoefficients> contacts;
  double agreement = 0.0;  // fraction of contacts whose b_2..b_N all carry the expected sign
};

SignLemmaReport check_sign_lemmas(const Surface& s, const std::vector<std::pair<Vec3, Vec3>>& contacts,
                                  int order_n, int expected_sign);

// Switch points (point, velocity) of traces started from the given states, in start order.
std::vector<std::pair<Vec3, Vec3>> traced_contacts(const std::vector<Surface>& surfaces,
                                                   const std::vector<GeodesicState>& starts, double eps,
                                                   const TraceLimits& limits = {});

}  // namespace geoobs
