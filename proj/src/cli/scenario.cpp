#include "pdattack/cli/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "pdattack/error.hpp"
#include "pdattack/numkit/linalg.hpp"

namespace pdattack::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, _] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) fail(join(path, key), "unknown key");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(join(path, key), "required key missing");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
  return j.contains(key) ? number(j.at(key), join(path, key)) : fallback;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  const auto v = j.get<long long>();
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

Vec vector(const json& j, const std::string& path, std::optional<std::size_t> dim) {
  if (j.is_object()) {
    check_keys(j, path, {"fill"});
    if (!dim) fail(path, "\"fill\" needs a known dimension");
    return Vec::filled(*dim, number(need(j, path, "fill"), join(path, "fill")));
  }
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  if (dim && v.size() != *dim) fail(path, "expected " + std::to_string(*dim) + " entries");
  return Vec(std::move(v));
}

Mat matrix(const json& j, const std::string& path, std::optional<std::size_t> dim = std::nullopt) {
  if (j.is_object()) {
    if (j.contains("identity")) {
      check_keys(j, path, {"identity"});
      if (!dim) fail(path, "\"identity\" needs a known dimension");
      return Mat::identity(*dim) * number(j.at("identity"), join(path, "identity"));
    }
    check_keys(j, path, {"diag"});
    const Vec d = vector(need(j, path, "diag"), join(path, "diag"), dim);
    return Mat::diag(d.data());
  }
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<double> v;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].empty()) fail(rp, "expected a non-empty row");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols) fail(rp, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) v.push_back(number(j[r][c], rp + "[" + std::to_string(c) + "]"));
  }
  return Mat(rows, cols, std::move(v));
}

void require_shape(const Mat& m, std::size_t rows, std::size_t cols, const std::string& path) {
  if (m.rows() != rows || m.cols() != cols)
    fail(path, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
}

PlantModel parse_plant(const json& j, const std::string& path) {
  require_object(j, path);
  const json& kind = need(j, path, "kind");
  if (kind == "pendulum") {
    check_keys(j, path, {"kind", "c", "g", "C"});
    const double c = number(need(j, path, "c"), join(path, "c"));
    const double g = number(need(j, path, "g"), join(path, "g"));
    Mat C = j.contains("C") ? matrix(j.at("C"), join(path, "C"), 4) : Mat{{1, 0, 0, 0}, {0, 1, 0, 0}};
    if (C.cols() != 4) fail(join(path, "C"), "pendulum output matrix needs 4 columns");
    return PlantModel::pendulum(c, g, std::move(C));
  }
  if (kind == "linear") {
    check_keys(j, path, {"kind", "A", "B", "C"});
    Mat A = matrix(need(j, path, "A"), join(path, "A"));
    const std::size_t p = A.rows();
    require_shape(A, p, p, join(path, "A"));
    Mat B = matrix(need(j, path, "B"), join(path, "B"));
    if (B.rows() != p) fail(join(path, "B"), "expected " + std::to_string(p) + " rows");
    Mat C = j.contains("C") ? matrix(j.at("C"), join(path, "C"), p) : Mat::identity(p);
    if (C.cols() != p) fail(join(path, "C"), "expected " + std::to_string(p) + " columns");
    return PlantModel::linear(std::move(A), std::move(B), std::move(C));
  }
  fail(join(path, "kind"), "expected \"pendulum\" or \"linear\"");
}

NominalModel parse_nominal(const json& j, const std::string& path, const PlantModel* plant) {
  check_keys(j, path, {"A_n", "B_n", "K_n"});
  const std::optional<std::size_t> p = plant ? std::optional(plant->state_dim()) : std::nullopt;
  Mat A_n = matrix(need(j, path, "A_n"), join(path, "A_n"), p);
  const std::size_t n = A_n.rows();
  require_shape(A_n, n, n, join(path, "A_n"));
  if (plant && n != plant->state_dim()) fail(join(path, "A_n"), "dimension differs from plant state");
  Mat B_n = matrix(need(j, path, "B_n"), join(path, "B_n"));
  if (B_n.rows() != n) fail(join(path, "B_n"), "expected " + std::to_string(n) + " rows");
  if (plant && B_n.cols() != plant->input_dim()) fail(join(path, "B_n"), "input count differs from plant");
  Mat K_n = matrix(need(j, path, "K_n"), join(path, "K_n"));
  require_shape(K_n, B_n.cols(), n, join(path, "K_n"));
  return NominalModel(std::move(A_n), std::move(B_n), std::move(K_n));
}

AttackSpec parse_attack(const json& j, const std::string& path, std::size_t p, std::size_t index) {
  check_keys(j, path, {"name", "variant", "Q", "Z", "F_a0", "aux0", "Z1", "P1", "P4"});
  AttackSpec a;
  const json& v = need(j, path, "variant");
  if (!v.is_string()) fail(join(path, "variant"), "expected a string");
  const auto variant = parse_variant(v.get<std::string>());
  if (!variant) fail(join(path, "variant"), "unknown attack variant \"" + v.get<std::string>() + "\"");
  a.variant = *variant;
  if (j.contains("name")) {
    if (!j.at("name").is_string() || j.at("name").get<std::string>().empty())
      fail(join(path, "name"), "expected a non-empty string");
    a.name = j.at("name").get<std::string>();
  } else {
    a.name = std::string(to_string(a.variant)) + (index > 0 ? "_" + std::to_string(index) : "");
  }
  for (char c : a.name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') fail(join(path, "name"), "use [A-Za-z0-9_-]");
  a.aux0 = j.contains("aux0") ? vector(j.at("aux0"), join(path, "aux0"), p) : Vec::filled(p, 1e-4);
  auto mat_or = [&](const char* key, Mat fallback) {
    if (!j.contains(key)) return fallback;
    Mat m = matrix(j.at(key), join(path, key), p);
    require_shape(m, p, p, join(path, key));
    return m;
  };
  a.Q = mat_or("Q", Mat::identity(p));
  a.Z = mat_or("Z", Mat::identity(p));
  a.F_a0 = mat_or("F_a0", Mat::identity(p));
  if (j.contains("Z1")) a.Z1 = mat_or("Z1", Mat());
  if (j.contains("P1")) a.P1 = mat_or("P1", Mat());
  if (j.contains("P4")) a.P4 = mat_or("P4", Mat());
  if (!is_mapda(a.variant)) {
    for (const char* key : {"Q", "Z", "F_a0", "Z1", "P1", "P4"})
      if (j.contains(key)) fail(join(path, key), "only used by adaptive variants");
  } else if (a.variant != AttackVariant::DelayInducedDiscreteMapda) {
    for (const char* key : {"Z1", "P1", "P4"})
      if (j.contains(key)) fail(join(path, key), "only used by delay_induced_discrete_mapda");
  } else if (!a.P4) {
    a.P4 = Mat::identity(p) * 0.01;
  }
  return a;
}

SimConfig parse_sim(const json& j, const std::string& path, std::optional<std::size_t> p, std::optional<std::size_t> q) {
  check_keys(j, path, {"t_end", "dt_int", "h_sample", "t0", "t_f", "x0", "limits", "stop_on_limit"});
  SimConfig s;
  s.t_end = number_or(j, path, "t_end", s.t_end);
  s.dt_int = number_or(j, path, "dt_int", s.dt_int);
  s.h_sample = number_or(j, path, "h_sample", s.h_sample);
  s.t0 = number_or(j, path, "t0", s.t0);
  s.t_f = number_or(j, path, "t_f", s.t_end);
  if (p) s.x0 = j.contains("x0") ? vector(j.at("x0"), join(path, "x0"), p) : Vec(*p);
  if (q) {
    if (!j.contains("limits")) fail(join(path, "limits"), "required key missing");
    s.limits = vector(j.at("limits"), join(path, "limits"), q);
    for (std::size_t i = 0; i < s.limits.dim(); ++i)
      if (!(s.limits[i] > 0.0)) fail(join(path, "limits"), "limits must be positive");
  }
  if (j.contains("stop_on_limit")) {
    if (!j.at("stop_on_limit").is_boolean()) fail(join(path, "stop_on_limit"), "expected a boolean");
    s.stop_on_limit = j.at("stop_on_limit").get<bool>();
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return s;
}

std::optional<Mat> optional_matrix(const json& j, const std::string& path, const char* key, std::size_t p) {
  if (!j.contains(key)) return std::nullopt;
  Mat m = matrix(j.at(key), join(path, key), p);
  require_shape(m, p, p, join(path, key));
  return m;
}

CheckIcSpec parse_check_ic(const json& j, const std::string& path, const NominalModel* nominal) {
  check_keys(j, path, {"M", "x0", "X", "J", "reconstruction_tolerance"});
  CheckIcSpec c;
  if (j.contains("M")) {
    c.M = matrix(j.at("M"), join(path, "M"));
  } else if (nominal) {
    c.M = nominal->A_n();
  } else {
    fail(join(path, "M"), "required key missing (no nominal model to default to)");
  }
  const std::size_t p = c.M.rows();
  require_shape(c.M, p, p, join(path, "M"));
  c.x0 = vector(need(j, path, "x0"), join(path, "x0"), p);
  c.X = optional_matrix(j, path, "X", p);
  c.J = optional_matrix(j, path, "J", p);
  if (c.X.has_value() != c.J.has_value()) fail(join(path, c.X ? "J" : "X"), "X and J must be given together");
  c.reconstruction_tolerance = number_or(j, path, "reconstruction_tolerance", c.reconstruction_tolerance);
  if (!(c.reconstruction_tolerance > 0.0)) fail(join(path, "reconstruction_tolerance"), "must be positive");
  return c;
}

Mat required_matrix(const json& j, const std::string& path, const char* key, std::size_t p) {
  need(j, path, key);
  return *optional_matrix(j, path, key, p);
}

OmegaSpec parse_omega(const json& j, const std::string& path) {
  check_keys(j, path, {"A", "B", "K", "P1", "P2", "P3", "P4", "h"});
  OmegaSpec o;
  o.A = matrix(need(j, path, "A"), join(path, "A"));
  const std::size_t p = o.A.rows();
  require_shape(o.A, p, p, join(path, "A"));
  o.B = matrix(need(j, path, "B"), join(path, "B"));
  if (o.B.rows() != p) fail(join(path, "B"), "expected " + std::to_string(p) + " rows");
  o.K = matrix(need(j, path, "K"), join(path, "K"));
  require_shape(o.K, o.B.cols(), p, join(path, "K"));
  o.P1 = required_matrix(j, path, "P1", p);
  o.P2 = required_matrix(j, path, "P2", p);
  o.P3 = required_matrix(j, path, "P3", p);
  o.P4 = required_matrix(j, path, "P4", p);
  o.h = number(need(j, path, "h"), join(path, "h"));
  if (o.h < 0.0) fail(join(path, "h"), "must be >= 0");
  return o;
}

}  // namespace

std::optional<AttackVariant> parse_variant(std::string_view name) {
  for (auto v : {AttackVariant::TpdaExact, AttackVariant::TpdaNominal, AttackVariant::MapdaIdeal,
                 AttackVariant::MapdaRegulated, AttackVariant::DiscreteTpdaExact, AttackVariant::DiscreteTpdaNominal,
                 AttackVariant::DiscreteMapda, AttackVariant::DelayInducedDiscreteMapda})
    if (to_string(v) == name) return v;
  return std::nullopt;
}

namespace {

bool is_shorthand(const json& j) {
  return j.is_object() && (j.contains("identity") || j.contains("diag") || j.contains("fill"));
}

// Object-wise merge where a shorthand matrix or vector replaces the preset
// value instead of being merged into it. A null removes the key.
void merge_override(json& target, const json& patch) {
  for (const auto& [key, value] : patch.items()) {
    if (value.is_null()) {
      target.erase(key);
    } else if (value.is_object() && !is_shorthand(value) && target.contains(key) && target[key].is_object() &&
               !is_shorthand(target[key])) {
      merge_override(target[key], value);
    } else {
      target[key] = value;
    }
  }
}

}  // namespace

json resolve(const json& doc) {
  require_object(doc, "");
  if (!doc.contains("preset")) return doc;
  const json& name = doc.at("preset");
  if (!name.is_string()) fail("preset", "expected a string");
  json out = preset(name.get<std::string>());
  json patch = doc;
  patch.erase("preset");
  merge_override(out, patch);
  return out;
}

Scenario parse_scenario(const json& doc) {
  check_keys(doc, "",
             {"plant", "nominal", "attack", "attacks", "sim", "noise", "detector", "check_ic", "omega", "output"});
  Scenario s;
  if (doc.contains("plant")) s.plant = parse_plant(doc.at("plant"), "plant");
  if (doc.contains("nominal")) {
    try {
      s.nominal = parse_nominal(doc.at("nominal"), "nominal", s.plant ? &*s.plant : nullptr);
    } catch (const Error& e) {
      fail("nominal", e.what());
    }
  }
  const std::optional<std::size_t> p = s.plant ? std::optional(s.plant->state_dim()) : std::nullopt;
  const std::optional<std::size_t> q = s.plant ? std::optional(s.plant->output_dim()) : std::nullopt;

  if (doc.contains("attack") || doc.contains("attacks")) {
    if (!s.plant) fail("plant", "required key missing (attacks need a plant)");
    if (!s.nominal) fail("nominal", "required key missing (attacks need a nominal model)");
  }
  if (doc.contains("attack") && doc.contains("attacks")) fail("attacks", "give either attack or attacks, not both");
  if (doc.contains("attack")) s.attacks.push_back(parse_attack(doc.at("attack"), "attack", *p, 0));
  if (doc.contains("attacks")) {
    const json& list = doc.at("attacks");
    if (!list.is_array()) fail("attacks", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
      s.attacks.push_back(parse_attack(list[i], "attacks[" + std::to_string(i) + "]", *p, i));
      if (!names.insert(s.attacks.back().name).second)
        fail("attacks[" + std::to_string(i) + "].name", "duplicate attack name");
    }
  }

  if (s.plant) s.sim = parse_sim(doc.contains("sim") ? doc.at("sim") : json::object(), "sim", p, q);

  if (doc.contains("noise")) {
    const json& n = doc.at("noise");
    check_keys(n, "noise", {"sigma_meas", "seed"});
    s.noise.sigma_meas = number_or(n, "noise", "sigma_meas", 0.0);
    if (n.contains("seed")) {
      if (!n.at("seed").is_number_unsigned() && !(n.at("seed").is_number_integer() && n.at("seed").get<long long>() >= 0))
        fail("noise.seed", "expected a non-negative integer");
      s.noise.seed = n.at("seed").get<std::uint64_t>();
    }
    if (s.noise.sigma_meas < 0.0) fail("noise.sigma_meas", "must be >= 0");
  }

  if (doc.contains("detector")) {
    const json& d = doc.at("detector");
    check_keys(d, "detector", {"epsilon", "settle_time", "calibrate"});
    s.detector.epsilon = number_or(d, "detector", "epsilon", s.detector.epsilon);
    s.detector.settle_time = number_or(d, "detector", "settle_time", s.detector.settle_time);
    if (!(s.detector.epsilon > 0.0)) fail("detector.epsilon", "must be positive");
    if (s.detector.settle_time < 0.0) fail("detector.settle_time", "must be >= 0");
    if (d.contains("calibrate")) {
      const json& c = d.at("calibrate");
      check_keys(c, "detector.calibrate", {"n_runs", "settle"});
      CalibrationSpec cal;
      if (c.contains("n_runs")) cal.n_runs = count(c.at("n_runs"), "detector.calibrate.n_runs");
      cal.settle = number_or(c, "detector.calibrate", "settle", cal.settle);
      if (cal.n_runs < 2) fail("detector.calibrate.n_runs", "must be >= 2");
      if (cal.settle < 0.0) fail("detector.calibrate.settle", "must be >= 0");
      s.calibration = cal;
    }
  }

  if (doc.contains("check_ic")) s.check_ic = parse_check_ic(doc.at("check_ic"), "check_ic", s.nominal ? &*s.nominal : nullptr);
  if (doc.contains("omega")) s.omega = parse_omega(doc.at("omega"), "omega");

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, "output", {"csv_stride"});
    if (o.contains("csv_stride")) s.csv_stride = count(o.at("csv_stride"), "output.csv_stride");
    if (s.csv_stride == 0) fail("output.csv_stride", "must be >= 1");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: malformed JSON: ") + e.what());
  }
  return parse_scenario(resolve(doc));
}

AttackEngine build_engine(const Scenario& s, const AttackSpec& spec) {
  if (!s.plant || !s.nominal) throw ConfigError("plant: attacks need a plant and a nominal model");
  const NominalModel& nm = *s.nominal;
  const auto [A, B] = linearize(*s.plant);
  const double h = s.sim.h_sample;
  switch (spec.variant) {
    case AttackVariant::TpdaExact: return make_tpda_exact(A, spec.aux0);
    case AttackVariant::TpdaNominal: return make_tpda_nominal(nm.A_n(), spec.aux0);
    case AttackVariant::DiscreteTpdaExact: return make_tpda_exact(A, spec.aux0, TimeModel::Discrete);
    case AttackVariant::DiscreteTpdaNominal: return make_tpda_nominal(nm.A_n(), spec.aux0, TimeModel::Discrete);
    case AttackVariant::MapdaIdeal:
      return make_mapda(nm.A_n(), A + B * nm.K_n(), spec.Q, spec.Z, spec.F_a0, spec.aux0, LyapunovModel::Ideal);
    case AttackVariant::MapdaRegulated:
      return make_mapda(nm.A_n(), nm.Phi_n(), spec.Q, spec.Z, spec.F_a0, spec.aux0, LyapunovModel::Regulated);
    case AttackVariant::DiscreteMapda:
      return make_discrete_mapda(nm.A_n(), nm.Phi_n(), spec.Q, spec.Z, spec.F_a0, spec.aux0, h);
    case AttackVariant::DelayInducedDiscreteMapda: {
      const Mat P1 = spec.P1 ? *spec.P1 : solve_lyapunov(nm.Phi_n(), spec.Q);
      return make_delay_induced_discrete_mapda(A, nm.A_n(), B, nm.K_n(), nm.Phi_n(), spec.Q, spec.Z1 ? *spec.Z1 : spec.Z,
                                               P1, *spec.P4, spec.F_a0, spec.aux0, h);
    }
  }
  throw ConfigError("attack.variant: unsupported");
}

}  // namespace pdattack::cli
