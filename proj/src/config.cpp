#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edgectl/harness.hpp"

namespace edgectl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("setting '" + key + "': not a number: '" + t + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("setting '" + key + "': not a non-negative integer: '" + t + "'");
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    const auto end = pos == std::string_view::npos ? text.size() : pos;
    out.push_back(trim(text.substr(start, end - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const RealVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

RealVector parse_grid(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("grid '" + t + "' must be start:stop:step");
    const double a = to_double("grid", parts[0]);
    const double b = to_double("grid", parts[1]);
    const double step = to_double("grid", parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("grid '" + t + "' has a bad range or step");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    RealVector out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = a + static_cast<double>(i) * step;
    return out;
  }
  RealVector out;
  for (const auto& p : split(t, ',')) out.push_back(to_double("grid", p));
  return out;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + " has no '='");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "n",         "t-hop",       "v",          "alpha",      "delta",   "law",
      "gain",      "pf",          "p",          "target",     "dt",      "t-max",
      "stride",    "stop-fidelity", "edge-threshold", "initial", "threshold",
      "field-delta1", "field-delta2", "initial-delta", "theta-points", "count",
      "scan-count", "p-grid",     "pf-grid",    "deltas",     "n-list",  "scaling-t-max",
      "seed",      "workers",     "out",        "scan-out"};
  return keys;
}

ExperimentConfig::ExperimentConfig()
    : p_grid(parse_grid("-1:5:1")),
      pf_grid(parse_grid("-3:5:0.5")),
      deltas(parse_grid("0:0.1:0.025")),
      n_list{11, 17, 23, 29, 35, 41, 47, 53, 59} {}

double ExperimentConfig::horizon() const {
  if (t_max) return *t_max;
  return law.kind == LawKind::v2 ? 1000.0 : 2000.0;
}

IntegratorParams ExperimentConfig::integrator() const {
  IntegratorParams p;
  p.dt = dt;
  p.t_max = horizon();
  p.record_stride = record_stride;
  p.stop_fidelity = stop_fidelity;
  p.field_scale = errors.field_scale();
  return p;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "n") lattice.sites = to_uint(key, value);
  else if (key == "t-hop") lattice.hopping = to_double(key, value);
  else if (key == "v") lattice.potential = to_double(key, value);
  else if (key == "alpha") lattice.alpha = Rational::parse(value);
  else if (key == "delta") lattice.phase = parse_angle(value);
  else if (key == "law") law.kind = parse_law_kind(value);
  else if (key == "gain") law.gain = to_double(key, value);
  else if (key == "pf") law.p_f = to_double(key, value);
  else if (key == "p") {
    if (value.empty() || value == "lambda") law.p.reset();
    else law.p = to_double(key, value);
  } else if (key == "target") {
    if (value == "edgeN" || value == "last") law.target = Boundary::last;
    else if (value == "edge1" || value == "first") law.target = Boundary::first;
    else throw ConfigError("target must be edge1 or edgeN");
  } else if (key == "dt") dt = to_double(key, value);
  else if (key == "t-max") {
    if (value.empty()) t_max.reset();
    else t_max = to_double(key, value);
  } else if (key == "stride") record_stride = to_uint(key, value);
  else if (key == "stop-fidelity") {
    if (value.empty()) stop_fidelity.reset();
    else stop_fidelity = to_double(key, value);
  } else if (key == "edge-threshold") edges.threshold = to_double(key, value);
  else if (key == "initial") initial = InitialState::parse(value);
  else if (key == "threshold") {
    if (value.empty()) threshold.reset();
    else threshold = to_double(key, value);
  } else if (key == "field-delta1") errors.field_scale_delta[0] = to_double(key, value);
  else if (key == "field-delta2") errors.field_scale_delta[1] = to_double(key, value);
  else if (key == "initial-delta") errors.initial_state_delta = to_double(key, value);
  else if (key == "theta-points") theta_points = to_uint(key, value);
  else if (key == "count") count = to_uint(key, value);
  else if (key == "scan-count") scan_count = to_uint(key, value);
  else if (key == "p-grid") p_grid = parse_grid(value);
  else if (key == "pf-grid") pf_grid = parse_grid(value);
  else if (key == "deltas") deltas = parse_grid(value);
  else if (key == "n-list") {
    n_list.clear();
    for (double x : parse_grid(value)) {
      if (x < 3 || x != std::floor(x)) throw ConfigError("n-list entries must be integers >= 3");
      n_list.push_back(static_cast<std::size_t>(x));
    }
  } else if (key == "scaling-t-max") {
    if (value.empty()) scaling_t_max.reset();
    else scaling_t_max = to_double(key, value);
  } else if (key == "seed") seed = to_uint(key, value);
  else if (key == "workers") workers = static_cast<unsigned>(to_uint(key, value));
  else if (key == "out") out = value;
  else if (key == "scan-out") scan_out = value;
  else throw ConfigError("unknown setting '" + key + "'");
}

void ExperimentConfig::validate() const {
  lattice.validate();
  integrator().validate();
  errors.validate();
  if (law.gain && !(*law.gain >= 0.0)) throw ConfigError("gain must be >= 0");
  if (threshold && !(*threshold > 0.0 && *threshold <= 1.0))
    throw ConfigError("threshold must lie in (0, 1]");
  if (theta_points < 2) throw ConfigError("theta-points must be at least 2");
  if (initial.kind == InitialState::Kind::site && (initial.site < 1 || initial.site > lattice.sites))
    throw ConfigError("initial site out of range");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  o << "n=" << lattice.sites << '\n'
    << "t-hop=" << format_number(lattice.hopping) << '\n'
    << "v=" << format_number(lattice.potential) << '\n'
    << "alpha=" << lattice.alpha.str() << '\n'
    << "delta=" << format_number(lattice.phase) << '\n'
    << "law=" << to_string(law.kind) << '\n';
  if (law.gain) o << "gain=" << format_number(*law.gain) << '\n';
  o << "pf=" << format_number(law.p_f) << '\n'
    << "p=" << (law.p ? format_number(*law.p) : std::string("lambda")) << '\n'
    << "target=" << (law.target == Boundary::last ? "edgeN" : "edge1") << '\n'
    << "dt=" << format_number(dt) << '\n'
    << "t-max=" << (t_max ? format_number(*t_max) : std::string()) << '\n'
    << "stride=" << record_stride << '\n'
    << "stop-fidelity=" << (stop_fidelity ? format_number(*stop_fidelity) : std::string()) << '\n'
    << "edge-threshold=" << format_number(edges.threshold) << '\n'
    << "initial=" << initial.str() << '\n'
    << "threshold=" << (threshold ? format_number(*threshold) : std::string()) << '\n'
    << "field-delta1=" << format_number(errors.field_scale_delta[0]) << '\n'
    << "field-delta2=" << format_number(errors.field_scale_delta[1]) << '\n'
    << "initial-delta=" << format_number(errors.initial_state_delta) << '\n'
    << "theta-points=" << theta_points << '\n'
    << "count=" << count << '\n'
    << "scan-count=" << scan_count << '\n'
    << "p-grid=" << join(p_grid) << '\n'
    << "pf-grid=" << join(pf_grid) << '\n'
    << "deltas=" << join(deltas) << '\n';
  RealVector ns(n_list.begin(), n_list.end());
  o << "n-list=" << join(ns) << '\n'
    << "scaling-t-max=" << (scaling_t_max ? format_number(*scaling_t_max) : std::string()) << '\n'
    << "seed=" << seed << '\n'
    << "workers=" << workers << '\n'
    << "out=" << out << '\n'
    << "scan-out=" << scan_out << '\n';
  return o.str();
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) {
  ExperimentConfig c;
  for (const auto& [k, v] : parse_key_values(text)) c.set(k, v);
  return c;
}

}  // namespace edgectl
