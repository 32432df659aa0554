#include "noncollapse/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "noncollapse/error.hpp"

namespace noncollapse {

ConvexBody make_body(const BodySpec& s) {
  if (s.shape == "sphere") {
    if (!(s.radius > 0)) throw ConfigError("sphere radius must be positive");
    return sphere(s.mode, s.n, s.radius);
  }
  if (s.shape == "ellipse") {
    if (s.mode != BodyMode::Curve) throw ConfigError("ellipse bodies are curves");
    if (!(s.a > 0 && s.b > 0)) throw ConfigError("ellipse semi-axes must be positive");
    return ellipse(s.n, s.a, s.b);
  }
  if (s.shape == "ellipsoid") {
    if (s.mode != BodyMode::Axisymmetric) throw ConfigError("ellipsoid bodies are axisymmetric");
    if (!(s.a > 0 && s.c > 0)) throw ConfigError("ellipsoid semi-axes must be positive");
    return ellipsoid(s.n, s.a, s.c);
  }
  if (s.shape == "random") return random_convex_body(s.mode, s.n, s.seed);
  if (s.shape == "samples") {
    if (s.h.empty()) throw ConfigError("shape 'samples' needs support values h");
    return ConvexBody(s.mode, Eigen::Map<const Eigen::VectorXd>(s.h.data(), static_cast<Eigen::Index>(s.h.size())));
  }
  throw ConfigError("unknown body shape '" + s.shape + "'");
}

void FlowConfig::validate() const {
  if (!(cfl > 0 && cfl <= 0.5)) throw ConfigError("cfl must lie in (0, 0.5]");
  if (snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
  if (t_end && !(*t_end > 0)) throw ConfigError("t_end must be positive");
  if (stop_max_f && !(*stop_max_f > 0)) throw ConfigError("stop_max_f must be positive");
  flow_speed(speed, body.mode);
}

SpeedFunction flow_speed(const std::string& speed, BodyMode mode) {
  const SpeedFunction f = SpeedFunction::parse(speed, 2);
  if (mode == BodyMode::Curve) return SpeedFunction::arithmetic_mean(1);
  return f;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedMaxF:
      return "ReachedMaxF";
    case Termination::ReachedTEnd:
      return "ReachedTEnd";
    case Termination::ConvexityLost:
      return "ConvexityLost";
    case Termination::StepUnderflow:
      return "StepUnderflow";
  }
  return "?";
}

namespace {

// Allocation-free right-hand side and RK4 on raw support-function samples.
class Stepper {
 public:
  Stepper(const SpectralGrid& grid, const SpeedFunction& f) : grid_(grid), f_(f), n_(grid.size()) {
    surface_ = grid.mode() == BodyMode::Axisymmetric;
    cot_.setZero(n_);
    if (surface_)
      for (int j = 1; j < n_ - 1; ++j) cot_(j) = 1.0 / std::tan(grid.theta()(j));
    d_.resize(2 * n_);
    k1_.resize(n_);
    k2_.resize(n_);
    k3_.resize(n_);
    k4_.resize(n_);
    tmp_.resize(n_);
  }

  // radii at j from the current derivative buffer; false outside the cone
  bool radii_at(const Eigen::VectorXd& h, int j, double& r1, double& r2) const {
    r1 = d_(n_ + j) + h(j);
    r2 = r1;
    if (surface_ && j > 0 && j < n_ - 1) r2 = d_(j) * cot_(j) + h(j);
    return r1 > 0 && r2 > 0 && std::isfinite(r1) && std::isfinite(r2);
  }

  bool rhs(const Eigen::VectorXd& h, Eigen::VectorXd& out) {
    d_.noalias() = grid_.derivative_stack() * h;
    double z[2];
    const std::span<const double> zs(z, surface_ ? 2 : 1);
    for (int j = 0; j < n_; ++j) {
      double r1, r2;
      if (!radii_at(h, j, r1, r2)) return false;
      z[0] = 1.0 / r1;
      z[1] = 1.0 / r2;
      const double F = f_.value(zs);
      if (!(F > 0) || !std::isfinite(F)) return false;
      out(j) = -F;
    }
    return true;
  }

  bool rk4(const Eigen::VectorXd& h, double dt, Eigen::VectorXd& out) {
    if (!rhs(h, k1_)) return false;
    tmp_ = h + 0.5 * dt * k1_;
    if (!rhs(tmp_, k2_)) return false;
    tmp_ = h + 0.5 * dt * k2_;
    if (!rhs(tmp_, k3_)) return false;
    tmp_ = h + dt * k3_;
    if (!rhs(tmp_, k4_)) return false;
    out = h + (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    // the result must itself be convex
    return rhs(out, tmp_);
  }

  double max_f(const Eigen::VectorXd& h) {
    if (!rhs(h, tmp_)) return std::numeric_limits<double>::quiet_NaN();
    return -tmp_.minCoeff();
  }

  double stable_dt(const Eigen::VectorXd& h, double cfl) {
    d_.noalias() = grid_.derivative_stack() * h;
    double rmin = std::numeric_limits<double>::infinity();
    double lmax = 0;
    Eigen::VectorXd z(surface_ ? 2 : 1);
    for (int j = 0; j < n_; ++j) {
      double r1, r2;
      if (!radii_at(h, j, r1, r2)) return 0.0;
      rmin = std::min({rmin, r1, r2});
      z(0) = 1.0 / r1;
      if (surface_) z(1) = 1.0 / r2;
      lmax = std::max(lmax, f_.jet(z, false).grad.maxCoeff());
    }
    const double s = grid_.spacing();
    return cfl * s * s * rmin * rmin / lmax;
  }

 private:
  const SpectralGrid& grid_;
  const SpeedFunction& f_;
  int n_;
  bool surface_;
  Eigen::VectorXd cot_, d_, k1_, k2_, k3_, k4_, tmp_;
};

// Compensated running sum, so the clock does not drift over 10^5 steps.
struct Clock {
  double t = 0;
  double c = 0;
  void add(double dt) {
    const double y = dt - c;
    const double s = t + y;
    c = (s - t) - y;
    t = s;
  }
};

}  // namespace

ConvexBody step(const ConvexBody& body, const SpeedFunction& f, double dt) {
  if (!(dt > 0)) throw DomainError("time step must be positive");
  body.check_convex();
  Stepper stepper(body.grid(), f);
  Eigen::VectorXd out(body.size());
  if (!stepper.rk4(body.h(), dt, out)) throw ConvexityLost("a Runge-Kutta stage left the convex cone", -1);
  return body.with_h(std::move(out), body.t() + dt);
}

double stable_dt(const ConvexBody& body, const SpeedFunction& f, double cfl) {
  body.check_convex();
  Stepper stepper(body.grid(), f);
  return stepper.stable_dt(body.h(), cfl);
}

FlowRun run(const FlowConfig& config, RunOptions options) { return run(make_body(config.body), config, options); }

FlowRun run(const ConvexBody& initial, const FlowConfig& config, RunOptions options) {
  config.validate();
  initial.check_convex();
  const SpeedFunction f = flow_speed(config.speed, initial.mode());
  const BodyMode mode = initial.mode();

  FlowRun out;
  out.initial_max_f = speed_field(initial, f).maxCoeff();
  out.stop_max_f = config.stop_max_f.value_or(1e3 * out.initial_max_f);
  if (!(out.stop_max_f > out.initial_max_f)) throw ConfigError("stop_max_f must exceed the initial max F");
  if (config.t_end && !(*config.t_end > initial.t())) throw ConfigError("t_end must lie after the initial time");

  Stepper stepper(initial.grid(), f);
  const double t_scale = initial.h().cwiseAbs().maxCoeff() * initial.h().cwiseAbs().maxCoeff();
  const double floor = 1e-14 * t_scale;

  Eigen::VectorXd h = initial.h();
  Eigen::VectorXd next(h.size());
  Point3 offset = initial.offset();
  Clock clock{initial.t(), 0.0};

  auto sample = [&]() {
    ConvexBody body(mode, h, clock.t, offset);
    if (options.monitor) {
      const MonitorRow row = observe(body, f, options.field);
      body = body.recentered(row.in_center);
      h = body.h();
      offset = body.offset();
      out.rows.push_back(row);
    }
    out.snapshots.push_back(body);
  };

  sample();
  bool sampled_now = true;
  for (;;) {
    double dt = stepper.stable_dt(h, config.cfl);
    if (!(dt >= floor)) {
      out.termination = Termination::StepUnderflow;
      out.message = "stable time step fell below the underflow floor";
      break;
    }
    bool to_end = false;
    if (config.t_end && clock.t + dt >= *config.t_end) {
      dt = *config.t_end - clock.t;
      to_end = true;
    }
    bool ok = stepper.rk4(h, dt, next);
    while (!ok && dt / 2 >= floor) {
      dt /= 2;
      to_end = false;
      ++out.rollbacks;
      ok = stepper.rk4(h, dt, next);
    }
    if (!ok) {
      out.termination = Termination::ConvexityLost;
      out.message = "convexity lost; step halving exhausted";
      break;
    }
    const double mf = stepper.max_f(next);
    if (mf >= out.stop_max_f) {
      // land on the threshold: max F is increasing in the step length here
      double lo = 0, hi = dt;
      Eigen::VectorXd best = next;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (!stepper.rk4(h, mid, next)) {
          hi = mid;
          continue;
        }
        const double m = stepper.max_f(next);
        if (m >= out.stop_max_f) {
          hi = mid;
          best = next;
          if (m - out.stop_max_f <= 1e-12 * out.stop_max_f) break;
        } else {
          lo = mid;
        }
      }
      h = best;
      clock.add(hi);
      ++out.steps;
      out.termination = Termination::ReachedMaxF;
      sampled_now = false;
      break;
    }
    h = next;
    clock.add(dt);
    ++out.steps;
    sampled_now = false;
    if (to_end) {
      clock.t = *config.t_end;
      clock.c = 0;
      out.termination = Termination::ReachedTEnd;
      break;
    }
    if (out.steps % static_cast<std::size_t>(config.snapshot_every) == 0) {
      sample();
      sampled_now = true;
    }
  }
  if (!sampled_now) sample();
  return out;
}

Roundness roundness(const FlowRun& run) {
  return roundness(run.rows, run.snapshots, run.termination == Termination::ReachedMaxF);
}

}  // namespace noncollapse
