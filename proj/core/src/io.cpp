#include "noncollapse/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "noncollapse/error.hpp"

namespace noncollapse {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

FlowConfig parse_flow_config(const std::string& text) {
  const json j = parse_json(text, "flow config");
  if (!j.is_object()) throw ConfigError("flow config must be a JSON object");
  reject_unknown(j, {"speed", "body", "cfl", "t_end", "stop_max_f", "snapshot_every", "seed"}, "flow config");
  FlowConfig c;
  c.speed = get_or<std::string>(j, "speed", c.speed);
  c.cfl = get_or<double>(j, "cfl", c.cfl);
  if (j.contains("t_end") && !j.at("t_end").is_null()) c.t_end = get_or<double>(j, "t_end", 0.0);
  if (j.contains("stop_max_f") && !j.at("stop_max_f").is_null()) c.stop_max_f = get_or<double>(j, "stop_max_f", 0.0);
  c.snapshot_every = get_or<int>(j, "snapshot_every", c.snapshot_every);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("body")) {
    const json& b = j.at("body");
    if (!b.is_object()) throw ConfigError("'body' must be an object");
    reject_unknown(b, {"mode", "N", "shape", "radius", "a", "b", "c", "seed", "h"}, "body");
    const std::string mode = get_or<std::string>(b, "mode", to_string(c.body.mode));
    c.body.mode = parse_body_mode(mode.c_str());
    c.body.n = get_or<int>(b, "N", c.body.n);
    c.body.shape = get_or<std::string>(b, "shape", c.body.shape);
    c.body.radius = get_or<double>(b, "radius", c.body.radius);
    c.body.a = get_or<double>(b, "a", c.body.a);
    c.body.b = get_or<double>(b, "b", c.body.b);
    c.body.c = get_or<double>(b, "c", c.body.c);
    c.body.seed = get_or<std::uint64_t>(b, "seed", c.body.seed);
    c.body.h = get_or<std::vector<double>>(b, "h", c.body.h);
    if (!c.body.h.empty()) c.body.n = static_cast<int>(c.body.h.size());
  }
  c.validate();
  return c;
}

std::string to_json(const FlowConfig& c) {
  json j;
  j["speed"] = c.speed;
  j["body"] = {{"mode", to_string(c.body.mode)}, {"N", c.body.n},    {"shape", c.body.shape},
               {"radius", c.body.radius},        {"a", c.body.a},    {"b", c.body.b},
               {"c", c.body.c},                  {"seed", c.body.seed}};
  if (!c.body.h.empty()) j["body"]["h"] = c.body.h;
  j["cfl"] = c.cfl;
  j["t_end"] = c.t_end ? json(*c.t_end) : json(nullptr);
  j["stop_max_f"] = c.stop_max_f ? json(*c.stop_max_f) : json(nullptr);
  j["snapshot_every"] = c.snapshot_every;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

std::string snapshot_json(const ConvexBody& body) {
  json j;
  j["mode"] = to_string(body.mode());
  j["N"] = body.size();
  j["t"] = body.t();
  j["h"] = std::vector<double>(body.h().data(), body.h().data() + body.size());
  j["offset"] = {body.offset().x(), body.offset().y(), body.offset().z()};
  return j.dump() + "\n";
}

ConvexBody parse_snapshot(const std::string& text) {
  const json j = parse_json(text, "snapshot");
  try {
    const std::string mode = j.at("mode").get<std::string>();
    const auto h = j.at("h").get<std::vector<double>>();
    const int n = j.at("N").get<int>();
    if (static_cast<int>(h.size()) != n) throw ConfigError("snapshot: N does not match the length of h");
    Point3 offset = Point3::Zero();
    if (j.contains("offset")) {
      const auto o = j.at("offset").get<std::vector<double>>();
      if (o.size() != 3) throw ConfigError("snapshot: offset needs three components");
      offset = Point3(o[0], o[1], o[2]);
    }
    return ConvexBody(parse_body_mode(mode.c_str()), Eigen::Map<const Eigen::VectorXd>(h.data(), n),
                      j.at("t").get<double>(), offset);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("snapshot: ") + e.what());
  }
}

std::string monitor_csv(const std::vector<MonitorRow>& rows) {
  std::string out = kMonitorCsvHeader;
  out += '\n';
  for (const MonitorRow& r : rows) {
    const double cols[] = {r.t,        r.max_f,           r.min_f,           r.r_plus,
                           r.r_minus,  r.min_ratio_lower, r.max_ratio_upper, r.hausdorff_rescaled,
                           r.t_hat_lo, r.t_hat_hi,        r.phi,             r.diag_residual};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ',';
      out += format_double(cols[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<MonitorRow> parse_monitor_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kMonitorCsvHeader) throw ConfigError("monitor CSV: unexpected header");
  std::vector<MonitorRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      const std::string cell = line.substr(start, end - start);
      v.push_back(cell == "nan" ? MonitorRow::kMissing : std::strtod(cell.c_str(), nullptr));
      start = end + 1;
    }
    if (v.size() != 12) throw ConfigError("monitor CSV: expected 12 columns");
    MonitorRow r;
    r.t = v[0];
    r.max_f = v[1];
    r.min_f = v[2];
    r.r_plus = v[3];
    r.r_minus = v[4];
    r.min_ratio_lower = v[5];
    r.max_ratio_upper = v[6];
    r.hausdorff_rescaled = v[7];
    r.t_hat_lo = v[8];
    r.t_hat_hi = v[9];
    r.phi = v[10];
    r.diag_residual = v[11];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace noncollapse
