#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noncollapse/geometry.hpp"
#include "noncollapse/monitor.hpp"
#include "noncollapse/speed.hpp"

namespace noncollapse {

/// Initial body: "sphere" (radius), "ellipse" (a, b; curves), "ellipsoid"
/// (a, c; surfaces), "random" (seed) or "samples" (explicit support values h,
/// which fix N).
struct BodySpec {
  BodyMode mode = BodyMode::Axisymmetric;
  int n = 128;
  std::string shape = "sphere";
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> h;
};

ConvexBody make_body(const BodySpec& spec);

struct FlowConfig {
  std::string speed = "mean";
  BodySpec body;
  double cfl = 0.1;
  std::optional<double> t_end;
  /// Defaults to 1e3 times the initial max F.
  std::optional<double> stop_max_f;
  int snapshot_every = 100;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless cfl is in (0, 0.5] and snapshot_every >= 1.
  void validate() const;
};

/// The speed a run uses: curves always move by curvature (a normalised,
/// degree-one homogeneous function of one variable is the identity), surfaces
/// by the named speed in two variables.
SpeedFunction flow_speed(const std::string& speed, BodyMode mode);

enum class Termination { ReachedMaxF, ReachedTEnd, ConvexityLost, StepUnderflow };
const char* to_string(Termination t);

struct FlowRun {
  std::vector<ConvexBody> snapshots;  // one per sample, recentred at the in-center
  std::vector<MonitorRow> rows;       // one per sample
  Termination termination = Termination::ReachedMaxF;
  std::string message;
  std::size_t steps = 0;
  std::size_t rollbacks = 0;
  double initial_max_f = 0;
  double stop_max_f = 0;
};

/// One classical Runge-Kutta step of dh/dt = -f(kappa(h)). Throws
/// ConvexityLost if any stage (or the result) leaves the convex cone.
ConvexBody step(const ConvexBody& body, const SpeedFunction& f, double dt);

/// cfl * dtheta^2 * min r_min^2 / max lambda_max(F-dot).
double stable_dt(const ConvexBody& body, const SpeedFunction& f, double cfl);

struct RunOptions {
  bool monitor = true;  // compute monitor rows at each sample
  FieldOptions field;
};

/// Steps until max F reaches stop_max_f (the last step is shortened to land on
/// it), t reaches t_end, or the body degenerates. Samples (snapshot + monitor
/// row) are taken at step 0, every snapshot_every steps and at the end; at each
/// sample the body is recentred at its in-center.
/// Throws ConvexityLost if the initial body is not strictly convex.
FlowRun run(const FlowConfig& config, RunOptions options = {});
/// Same, from an explicit initial body.
FlowRun run(const ConvexBody& initial, const FlowConfig& config, RunOptions options = {});

/// Roundness series of a finished run.
Roundness roundness(const FlowRun& run);

}  // namespace noncollapse
