#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "noncollapse/error.hpp"
#include "noncollapse/flow.hpp"
#include "noncollapse/io.hpp"
#include "noncollapse/monitor.hpp"
#include "noncollapse/oracle.hpp"
#include "noncollapse/speed.hpp"
#include "noncollapse/version.hpp"

namespace noncollapse::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kTrendFloor = 1e-4;
// eps(2N) <= eps(N) up to rounding in the final sample
constexpr double kRefinementFloor = 1e-9;

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

// NaN has no JSON spelling; emit null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  write_file_atomic(path, text);
}

json cert_json(const CertReport& r) {
  json j;
  j["property"] = to_string(r.property);
  j["samples_tested"] = r.samples_tested;
  j["min_eigen_seen"] = num(r.min_eigen_seen);
  j["verdict"] = r.certified ? "certified-on-samples" : "refuted";
  if (r.witness) {
    j["witness"] = {{"point", vec_json(r.witness->point)},
                    {"violation", num(r.witness->violation)},
                    {"check", r.witness->check}};
  }
  return j;
}

json trend_json(const TrendVerdict& v) {
  json j;
  j["series"] = v.series;
  j["claim"] = to_string(v.claim);
  j["pass"] = v.pass;
  j["slack"] = v.slack_used;
  j["worst_violation"] = {{"t", num(v.worst_t)}, {"amount", num(v.worst_amount)}};
  return j;
}

std::vector<double> column(const std::vector<MonitorRow>& rows, double MonitorRow::*field) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const MonitorRow& r : rows) out.push_back(r.*field);
  return out;
}

std::string roundness_csv(const Roundness& r) {
  std::string out = "t,radius_ratio,r_minus_scaled,r_plus_scaled,center_drift,hausdorff_rescaled\n";
  for (const RoundnessRow& row : r.rows) {
    const double cols[] = {row.t,           row.radius_ratio, row.r_minus_scaled,
                           row.r_plus_scaled, row.center_drift, row.hausdorff_rescaled};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ',';
      out += format_double(cols[i]);
    }
    out += '\n';
  }
  return out;
}

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu.json", i);
  return buf;
}

}  // namespace

int cmd_certify(const CertifyOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.n < 1) throw ConfigError("--n must be >= 1");
    if (o.trials < 1) throw ConfigError("--trials must be >= 1");
    const SpeedFunction f = SpeedFunction::parse(o.speed, o.n);
    std::vector<Property> props;
    if (o.property)
      props.push_back(parse_property(*o.property));
    else
      props = {Property::Concave, Property::InverseConcave};
    json j;
    j["command"] = "certify";
    j["speed"] = f.name();
    j["n"] = o.n;
    j["trials"] = o.trials;
    j["seed"] = o.seed;
    j["reports"] = json::array();
    bool all = true;
    for (Property p : props) {
      const CertReport r = certify(f, p, o.trials, o.seed);
      all = all && r.certified;
      j["reports"].push_back(cert_json(r));
    }
    j["certified"] = all;
    emit(j, o.out, out);
    return all ? kOk : kRefuted;
  } catch (const ConfigError& e) {
    err << "certify: " << e.what() << "\n";
    return kUsage;
  }
}

int cmd_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.prop != "2.2" && o.prop != "2.5") throw ConfigError("--prop must be 2.2 or 2.5");
    if (o.n < 1) throw ConfigError("--n must be >= 1");
    if (o.prop == "2.5" && o.n < 2) throw ConfigError("the boundary form needs --n >= 2");
    if (o.trials < 1) throw ConfigError("--trials must be >= 1");
    const SpeedFunction f = SpeedFunction::parse(o.speed, o.n);
    const SuiteResult s = run_suite(o.prop, f, o.trials, o.seed);
    json j;
    j["command"] = "oracle";
    j["proposition"] = o.prop;
    j["speed"] = f.name();
    j["n"] = o.n;
    j["trials"] = o.trials;
    j["seed"] = o.seed;
    j["tolerance"] = kOracleTolerance;
    j["min_value"] = num(s.min_value);
    j["min_normalized"] = num(s.min_normalized);
    j["worst_trial"] = s.worst_trial;
    j["failures"] = s.failures;
    j["perturbed"] = s.perturbed;
    if (o.prop == "2.2") {
      j["nonnegative_k"] = {{"trials", s.nonnegative_k_trials},
                            {"failures", s.nonnegative_k_failures},
                            {"min_normalized", num(s.nonnegative_k_min_normalized)}};
    }
    j["passed"] = s.passed();
    if (!s.passed()) {
      json w;
      w["trial"] = s.worst_trial;
      if (o.prop == "2.2") {
        const InteriorSample x = sample_interior(o.n, o.seed, s.worst_trial);
        const GapValue g = interior_gap(f, x);
        w["A"] = mat_json(x.a);
        w["B_diagonal"] = vec_json(x.b.diagonal());
        w["k"] = x.k;
        w["value"] = num(g.value);
        w["scale"] = num(g.scale);
      } else {
        const BoundarySample x = sample_boundary(o.n, o.seed, s.worst_trial);
        const GapValue g = boundary_form(f, x);
        w["lambda"] = vec_json(x.lambda);
        w["B"] = mat_json(x.b);
        w["value"] = num(g.value);
        w["scale"] = num(g.scale);
      }
      j["witness"] = w;
    }
    emit(j, o.out, out);
    return s.passed() ? kOk : kRefuted;
  } catch (const ConfigError& e) {
    err << "oracle: " << e.what() << "\n";
    return kUsage;
  }
}

int cmd_flow(const FlowOptions& o, std::ostream& out, std::ostream& err) {
  FlowConfig config;
  try {
    config = parse_flow_config(read_file(o.config));
    if (o.speed) config.speed = *o.speed;
    if (o.grid) config.body.n = *o.grid;
    if (o.cfl) config.cfl = *o.cfl;
    if (o.stop_max_f) config.stop_max_f = *o.stop_max_f;
    if (o.seed) config.seed = *o.seed;
    config.validate();
    if (o.out.empty()) throw ConfigError("--out is required");
  } catch (const ConfigError& e) {
    err << "flow: " << e.what() << "\n";
    return kUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir / "snapshots", ec);
  if (ec) {
    err << "flow: cannot create " << dir.string() << ": " << ec.message() << "\n";
    return kUsage;
  }

  json manifest;
  manifest["command"] = "flow";
  manifest["config"] = o.config;
  manifest["seed"] = config.seed;
  manifest["version"] = version();
  manifest["status"] = "running";
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  write_file_atomic(dir / "config.json", to_json(config));

  auto finish = [&](const char* status, int code) {
    manifest["status"] = status;
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    if (o.timing) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      write_file_atomic(dir / "timing.json", json{{"wall_time_ms", ms}}.dump(2) + "\n");
    }
    return code;
  };

  ConvexBody initial = sphere(BodyMode::Curve, 8);
  FlowRun result;
  try {
    initial = make_body(config.body);
    result = run(initial, config);
  } catch (const ConvexityLost& e) {
    err << "flow: " << e.what() << "\n";
    manifest["termination"] = to_string(Termination::ConvexityLost);
    manifest["message"] = e.what();
    return finish("convexity-lost", kConvexityLost);
  } catch (const ConfigError& e) {
    err << "flow: " << e.what() << "\n";
    return finish("config-error", kUsage);
  }

  for (std::size_t i = 0; i < result.snapshots.size(); ++i)
    write_file_atomic(dir / "snapshots" / snapshot_name(i), snapshot_json(result.snapshots[i]));
  write_file_atomic(dir / "monitor.csv", monitor_csv(result.rows));

  const SpeedFunction f = flow_speed(config.speed, initial.mode());
  const double delta_lower = discretization_delta(initial, f, 0);
  const double delta_upper = discretization_delta(initial, f, 1);
  const double slack_lower = kTrendFloor + delta_lower;
  const double slack_upper = kTrendFloor + delta_upper;
  const double delta_shape = discretization_delta(initial, f, 2);
  const double slack_shape = kTrendFloor + delta_shape;

  const auto& rows = result.rows;
  const std::vector<double> t = column(rows, &MonitorRow::t);
  std::vector<double> radius_ratio;
  for (const MonitorRow& r : rows) radius_ratio.push_back(r.r_plus / r.r_minus);

  json verdicts;
  verdicts["slack"] = {{"floor", kTrendFloor}, {"delta_lower", delta_lower}, {"delta_upper", delta_upper},
                        {"delta_radius_ratio", delta_shape}};
  verdicts["verdicts"] = json::array();
  bool pass = true;
  if (rows.size() >= 3) {
    const TrendVerdict v[] = {
        assert_trend("min_ratio_lower", t, column(rows, &MonitorRow::min_ratio_lower), TrendClaim::non_decreasing(),
                     slack_lower),
        assert_trend("max_ratio_upper", t, column(rows, &MonitorRow::max_ratio_upper), TrendClaim::non_increasing(),
                     slack_upper),
        assert_trend("radius_ratio", t, radius_ratio, TrendClaim::non_increasing(), slack_shape),
        assert_trend("r_plus", t, column(rows, &MonitorRow::r_plus), TrendClaim::non_increasing(), 0.0),
        extinction_nesting(rows),
    };
    for (const TrendVerdict& x : v) {
      pass = pass && x.pass;
      verdicts["verdicts"].push_back(trend_json(x));
    }
  } else {
    verdicts["verdicts_skipped"] = "fewer than three samples";
  }

  try {
    const Roundness rd = roundness(result);
    write_file_atomic(dir / "roundness.csv", roundness_csv(rd));
    const RoundnessRow& last = rd.rows.back();
    verdicts["roundness"] = {{"t_hat", rd.t_hat},
                             {"t_hat_slack", rd.t_hat_slack},
                             {"sandwich_holds", rd.sandwich_holds},
                             {"worst_index", rd.worst_index},
                             {"worst_violation", num(rd.worst_violation)},
                             {"final_radius_ratio", num(last.radius_ratio)},
                             {"final_center_drift", num(last.center_drift)},
                             {"final_hausdorff_rescaled", num(last.hausdorff_rescaled)}};
    pass = pass && rd.sandwich_holds;
  } catch (const RunTooShort& e) {
    verdicts["roundness"] = {{"skipped", e.what()}};
  }

  if (!rows.empty()) {
    const MonitorRow& last = rows.back();
    verdicts["gates"] = {{"epsilon", num(last.max_ratio_upper - 1.0)},
                         {"delta", num(1.0 - last.min_ratio_lower)},
                         {"radius_ratio_excess", num(last.r_plus / last.r_minus - 1.0)},
                         {"hausdorff_rescaled", num(last.hausdorff_rescaled)},
                         {"max_f_growth", num(last.max_f / result.initial_max_f)}};
  }
  verdicts["pass"] = pass;
  write_file_atomic(dir / "verdicts.json", verdicts.dump(2) + "\n");

  manifest["termination"] = to_string(result.termination);
  if (!result.message.empty()) manifest["message"] = result.message;
  manifest["steps"] = result.steps;
  manifest["rollbacks"] = result.rollbacks;
  manifest["samples"] = rows.size();

  out << "flow: " << to_string(result.termination) << " after " << result.steps << " steps; verdicts "
      << (pass ? "pass" : "FAIL") << "\n";
  if (result.termination == Termination::ConvexityLost || result.termination == Termination::StepUnderflow)
    return finish("degenerate", kConvexityLost);
  return finish("complete", pass ? kOk : kVerdictFailed);
}

namespace {

struct RunSummary {
  std::string dir;
  json config;
  json verdicts;
  json manifest;
  MonitorRow last;
};

// the monitor cadence does not change the flow, and step counts grow with N
std::string group_key(json config) {
  config["body"].erase("N");
  config.erase("snapshot_every");
  return config.dump();
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  if (o.runs.empty()) {
    err << "report: no run directories given\n";
    return kUsage;
  }
  std::vector<RunSummary> runs;
  for (const std::string& d : o.runs) {
    const fs::path dir(d);
    if (!fs::exists(dir / "manifest.json")) {
      err << "report: warning: " << d << " has no manifest.json; skipped\n";
      continue;
    }
    try {
      RunSummary s;
      s.dir = d;
      s.manifest = json::parse(read_file(dir / "manifest.json"));
      s.config = json::parse(read_file(dir / "config.json"));
      s.verdicts = json::parse(read_file(dir / "verdicts.json"));
      const auto rows = parse_monitor_csv(read_file(dir / "monitor.csv"));
      if (rows.empty()) throw ConfigError("empty monitor.csv");
      s.last = rows.back();
      runs.push_back(std::move(s));
    } catch (const std::exception& e) {
      err << "report: warning: " << d << " is incomplete (" << e.what() << "); skipped\n";
    }
  }
  if (runs.empty()) {
    err << "report: no usable runs\n";
    return kUsage;
  }

  json report;
  report["command"] = "report";
  report["runs"] = json::array();
  char line[512];
  std::snprintf(line, sizeof line, "%-28s %-16s %-12s %5s %-12s %11s %11s %11s %11s %11s  %s\n", "run", "speed", "mode",
                "N", "termination", "maxF_growth", "epsilon", "delta", "r+/r- - 1", "hausdorff", "verdicts");
  out << line;
  for (const RunSummary& s : runs) {
    const MonitorRow& r = s.last;
    json row;
    row["run"] = s.dir;
    row["speed"] = s.config["speed"];
    row["mode"] = s.config["body"]["mode"];
    row["shape"] = s.config["body"]["shape"];
    row["N"] = s.config["body"]["N"];
    row["termination"] = s.manifest.value("termination", std::string("unknown"));
    row["final_max_f"] = num(r.max_f);
    const json gates = s.verdicts.value("gates", json::object());
    row["max_f_growth"] = gates.value("max_f_growth", json(nullptr));
    row["epsilon"] = num(r.max_ratio_upper - 1.0);
    row["delta"] = num(1.0 - r.min_ratio_lower);
    row["radius_ratio_excess"] = num(r.r_plus / r.r_minus - 1.0);
    row["hausdorff_rescaled"] = num(r.hausdorff_rescaled);
    json assertions = json::object();
    std::string flags;
    for (const auto& v : s.verdicts.value("verdicts", json::array())) {
      assertions[v["series"].get<std::string>()] = v["pass"];
      flags += v["pass"].get<bool>() ? 'P' : 'F';
    }
    if (s.verdicts.contains("roundness") && s.verdicts["roundness"].contains("sandwich_holds")) {
      assertions["sandwich"] = s.verdicts["roundness"]["sandwich_holds"];
      flags += s.verdicts["roundness"]["sandwich_holds"].get<bool>() ? 'P' : 'F';
    }
    row["assertions"] = assertions;
    row["pass"] = s.verdicts.value("pass", false);
    report["runs"].push_back(row);
    const double growth = gates.contains("max_f_growth") && gates["max_f_growth"].is_number()
                              ? gates["max_f_growth"].get<double>()
                              : std::nan("");
    std::snprintf(line, sizeof line, "%-28s %-16s %-12s %5d %-12s %11s %11s %11s %11s %11s  %s\n", s.dir.c_str(),
                  row["speed"].get<std::string>().c_str(), row["mode"].get<std::string>().c_str(),
                  row["N"].get<int>(), row["termination"].get<std::string>().c_str(), fixed(growth, 4).c_str(),
                  fixed(r.max_ratio_upper - 1.0, 4).c_str(), fixed(1.0 - r.min_ratio_lower, 4).c_str(),
                  fixed(r.r_plus / r.r_minus - 1.0, 4).c_str(), fixed(r.hausdorff_rescaled, 4).c_str(),
                  flags.c_str());
    out << line;
  }

  // refinement pairs: same configuration apart from N, one grid twice the other
  std::map<std::string, std::vector<const RunSummary*>> groups;
  for (const RunSummary& s : runs) groups[group_key(s.config)].push_back(&s);
  report["refinement"] = json::array();
  for (const auto& [key, members] : groups) {
    for (const RunSummary* a : members) {
      for (const RunSummary* b : members) {
        if (b->config["body"]["N"].get<int>() != 2 * a->config["body"]["N"].get<int>()) continue;
        const double ea = a->last.max_ratio_upper - 1.0;
        const double eb = b->last.max_ratio_upper - 1.0;
        const double ra = a->last.r_plus / a->last.r_minus - 1.0;
        const double rb = b->last.r_plus / b->last.r_minus - 1.0;
        const double ha = a->last.hausdorff_rescaled;
        const double hb = b->last.hausdorff_rescaled;
        json pr;
        pr["coarse"] = a->dir;
        pr["fine"] = b->dir;
        pr["floor"] = kRefinementFloor;
        pr["epsilon"] = {num(ea), num(eb)};
        pr["radius_ratio_excess"] = {num(ra), num(rb)};
        pr["hausdorff_rescaled"] = {num(ha), num(hb)};
        pr["epsilon_tightens"] = eb <= ea + kRefinementFloor;
        pr["radius_ratio_tightens"] = rb <= ra + kRefinementFloor;
        pr["hausdorff_tightens"] = hb <= ha + kRefinementFloor;
        report["refinement"].push_back(pr);
        out << "refinement " << a->dir << " -> " << b->dir << ": epsilon " << fixed(ea, 6) << " -> "
            << fixed(eb, 6) << ", r+/r- - 1 " << fixed(ra, 6) << " -> " << fixed(rb, 6) << ", hausdorff "
            << fixed(ha, 6) << " -> " << fixed(hb, 6) << "\n";
      }
    }
  }
  if (!o.out.empty()) write_file_atomic(o.out, report.dump(2) + "\n");
  return kOk;
}

}  // namespace noncollapse::cli
