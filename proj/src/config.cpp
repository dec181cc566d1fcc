#include "emhd/config.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace emhd {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

json global_defaults() { return {{"seed", 1}, {"threads", 1}, {"out", "out"}}; }

json grid_defaults(int n, double lambda) { return {{"n", n}, {"lambda", lambda}}; }

json certify_targets() { return {{"M", 1.0}, {"mu", 0.5}, {"A", 1.0}, {"R", 1.0}, {"L", 10.0}, {"eps", 1.0}}; }

json ray_grid_defaults() {
  return {{"x3_per_R", 8},       {"transverse", {-1.0, 0.0, 1.0}}, {"center", {0.0, 0.0, 0.0}},
          {"refine_levels", 3},  {"refine_angle", 0.2},            {"t_max", 400.0},
          {"tol", 1e-9}};
}

json ray_entry_defaults() { return {{"x", {0.0, 0.0, 0.0}}, {"xi", {0.0, 0.0, 1.0}}, {"sign", 1}}; }

json bump_entry_defaults() {
  return {{"delta", 1e-3}, {"center", {0.0, 0.0, 0.0}}, {"width", 1.0}, {"dir", {1.0, 0.0, 0.0}}};
}

const std::set<std::string>& field_keys() {
  static const std::set<std::string> k = {"field", "background", "initial"};
  return k;
}

const std::set<std::string>& vec3_keys() {
  static const std::set<std::string> k = {"x", "xi", "value", "center", "dir", "mean", "background"};
  return k;
}

json element_template(const std::string& key) {
  if (key == "rays") return ray_entry_defaults();
  if (key == "bumps") return bump_entry_defaults();
  return nullptr;
}

std::string kind(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

void check_scalar(const json& def, const json& val, const std::string& ptr) {
  const bool ok = def.is_boolean()          ? val.is_boolean()
                  : def.is_number_integer() ? val.is_number_integer()
                  : def.is_number()         ? val.is_number()
                  : def.is_string()         ? val.is_string()
                                            : false;
  if (!ok) throw ConfigError(ptr, "expected " + kind(def) + ", got " + kind(val));
}

json merge(const json& defaults, const json& user, const std::string& ptr);

json resolve_field(const json& user, const std::string& ptr) {
  if (!user.is_object()) throw ConfigError(ptr, "field spec must be an object");
  if (!user.contains("type") || !user["type"].is_string()) throw ConfigError(ptr + "/type", "missing field type");
  json defs;
  try {
    defs = field_defaults(user["type"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ptr + "/type", e.what());
  }
  return merge(defs, user, ptr);
}

json merge_array(const std::string& key, const json& def, const json& val, const std::string& ptr) {
  if (!val.is_array()) throw ConfigError(ptr, "expected array, got " + kind(val));
  const json tmpl = element_template(key);
  json out = json::array();
  for (std::size_t i = 0; i < val.size(); ++i) {
    const std::string p = ptr + "/" + std::to_string(i);
    if (!tmpl.is_null()) {
      out.push_back(merge(tmpl, val[i], p));
    } else {
      const json& proto = def.empty() ? val[i] : def[0];
      if (!val[i].is_number() || !proto.is_number()) throw ConfigError(p, "expected number, got " + kind(val[i]));
      if (proto.is_number_integer() && !val[i].is_number_integer()) throw ConfigError(p, "expected integer");
      out.push_back(val[i]);
    }
  }
  if (vec3_keys().count(key) && out.size() != 3) throw ConfigError(ptr, "expected 3 components");
  return out;
}

json merge(const json& defaults, const json& user, const std::string& ptr) {
  if (!user.is_object()) throw ConfigError(ptr, "expected object, got " + kind(user));
  json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string& key = it.key();
    const std::string p = ptr + "/" + key;
    if (key == "type" && defaults.contains("type")) {
      if (!it->is_string() || *it != defaults["type"]) throw ConfigError(p, "type mismatch");
      continue;
    }
    if (!defaults.contains(key)) throw ConfigError(p, "unknown key");
    const json& def = defaults[key];
    if (field_keys().count(key) && def.is_object()) {
      out[key] = resolve_field(*it, p);
    } else if (def.is_object()) {
      out[key] = merge(def, *it, p);
    } else if (def.is_array()) {
      out[key] = merge_array(key, def, *it, p);
    } else {
      check_scalar(def, *it, p);
      out[key] = *it;
    }
  }
  return out;
}

void require_positive(const json& c, const std::string& key, const std::string& ptr) {
  if (c.contains(key) && !(c[key].get<double>() > 0.0)) throw ConfigError(ptr + "/" + key, "must be positive");
}

void check_grid(const json& g, const std::string& ptr) {
  const int n = g["n"].get<int>();
  if (n < 8 || (n & (n - 1)) != 0) throw ConfigError(ptr + "/n", "must be a power of two >= 8");
  require_positive(g, "lambda", ptr);
}

Vec3 vec3(const json& a) { return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}; }

std::vector<CosMode> random_cos_modes(const json& spec, const Grid3& g) {
  std::mt19937_64 rng(spec["seed"].get<std::uint64_t>());
  const int mm = spec["max_mode"].get<int>();
  const int count = spec["count"].get<int>();
  const double amp = spec["amplitude"].get<double>();
  std::uniform_int_distribution<int> mode(-mm, mm);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CosMode> out;
  while (int(out.size()) < count) {
    const Vec3 m{double(mode(rng)), double(mode(rng)), double(mode(rng))};
    if (m[0] == 0 && m[1] == 0 && m[2] == 0) continue;
    const Vec3 k{m[0] / g.lambda, m[1] / g.lambda, m[2] / g.lambda};
    const Vec3 r{unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5};
    Vec3 v = cross3(k, r);
    const double nv = norm3(v);
    if (nv < 1e-6) continue;
    for (double& c : v) c /= nv;
    out.push_back(CosMode{k, v, amp * (0.5 + 0.5 * unit(rng)), 2.0 * kPi * unit(rng)});
  }
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"trace", "certify", "solve", "norms", "smooth", "psdo-check"};
  return names;
}

json field_defaults(const std::string& type) {
  json d;
  if (type == "e3") {
    d = json::object();
  } else if (type == "uniform") {
    d = {{"value", {0.0, 0.0, 1.0}}};
  } else if (type == "bump") {
    d = bump_entry_defaults();
    d["background"] = {0.0, 0.0, 1.0};
    d["bumps"] = json::array();
  } else if (type == "cos_modes") {
    d = {{"mean", {0.0, 0.0, 1.0}}, {"amplitude", 0.1}, {"max_mode", 2}, {"count", 6}, {"seed", 1}};
  } else if (type == "null_point") {
    d = {{"center", {0.0, 0.0, 0.0}}, {"width", 1.0}};
  } else if (type == "file") {
    d = {{"path", ""}};
  } else {
    throw std::invalid_argument("unknown field type '" + type + "'");
  }
  d["type"] = type;
  return d;
}

json command_defaults(const std::string& command) {
  json d = global_defaults();
  if (command == "trace") {
    d["field"] = field_defaults("e3");
    d["grid"] = grid_defaults(32, 2.0);
    d["rays"] = json::array();
    d["t_max"] = 50.0;
    d["exit_height"] = 4.0;
    d["tol"] = 1e-9;
    d["output_dt"] = 0.0;
    d["two_sided"] = false;
    d["sphere_directions"] = 100000;
  } else if (command == "certify") {
    d["field"] = field_defaults("e3");
    d["grid"] = grid_defaults(32, 2.0);
    d["s"] = 2.0;
    d["targets"] = certify_targets();
    d["rays"] = ray_grid_defaults();
  } else if (command == "solve") {
    d["mode"] = "linearized";
    d["grid"] = grid_defaults(32, 2.0);
    d["T"] = 1.0;
    d["dt"] = 0.0;
    d["enforce_cfl"] = true;
    d["diag_every"] = 1;
    d["background"] = field_defaults("e3");
    json init = field_defaults("cos_modes");
    init["mean"] = {0.0, 0.0, 0.0};
    init["amplitude"] = 0.05;
    init["max_mode"] = 3;
    d["initial"] = init;
    d["save_field"] = false;
  } else if (command == "norms") {
    d["field"] = field_defaults("bump");
    d["grid"] = grid_defaults(64, 2.0);
    d["s"] = 2.0;
    d["R"] = 1.0;
  } else if (command == "smooth") {
    d["background"] = field_defaults("e3");
    d["grid"] = grid_defaults(128, 0.9);
    d["ks"] = {2, 3, 4, 5};
    d["T"] = 10.0;
    d["method"] = "auto";
    d["frames"] = 65;
    d["center"] = 0.0;
    d["width"] = 0.0;
    d["box_fraction"] = 0.25;
    d["certify"] = true;
    d["certify_grid"] = grid_defaults(32, 2.0);
    d["s"] = 2.0;
    d["targets"] = certify_targets();
  } else if (command == "psdo-check") {
    d["cv"] = {{"n", 8192}, {"lambda", 2.0}, {"M", 2.0}, {"shells", {6, 7, 8, 9, 10}}, {"max_order", 4}};
    d["composition"] = {{"n", 2048}, {"lambda", 2.0}, {"coefficient_mode", 1}, {"amplitude", 0.5},
                        {"shells", {3, 4, 5, 6, 7, 8}}};
  } else {
    throw ConfigError("", "unknown command '" + command + "'");
  }
  return d;
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

json resolve_config(const std::string& command, const json& user) {
  const json defaults = command_defaults(command);
  json c = merge(defaults, user.is_null() ? json::object() : user, "");
  if (c["threads"].get<int>() < 1) throw ConfigError("/threads", "must be >= 1");
  if (c.contains("grid")) check_grid(c["grid"], "/grid");
  if (c.contains("certify_grid")) check_grid(c["certify_grid"], "/certify_grid");
  for (const char* key : {"T", "t_max", "exit_height", "tol", "box_fraction"}) require_positive(c, key, "");
  if (c.contains("mode")) {
    const std::string m = c["mode"];
    if (m != "nonlinear" && m != "linearized" && m != "diagonalized" && m != "constant" && m != "2p5d")
      throw ConfigError("/mode", "expected nonlinear, linearized, diagonalized, constant or 2p5d");
  }
  if (c.contains("method")) {
    const std::string m = c["method"];
    if (m != "auto" && m != "exact" && m != "linearized") throw ConfigError("/method", "expected auto, exact or linearized");
  }
  if (c.contains("ks") && c["ks"].empty()) throw ConfigError("/ks", "must not be empty");
  for (const auto& key : field_keys())
    if (c.contains(key) && c[key]["type"] == "file" && c[key]["path"].get<std::string>().empty())
      throw ConfigError("/" + key + "/path", "missing path");
  if (c.contains("rays") && c["rays"].is_array())
    for (std::size_t i = 0; i < c["rays"].size(); ++i) {
      const int s = c["rays"][i]["sign"].get<int>();
      if (s != 1 && s != -1) throw ConfigError("/rays/" + std::to_string(i) + "/sign", "must be +1 or -1");
    }
  return c;
}

Grid3 grid_from(const json& grid) { return Grid3(grid["n"].get<int>(), grid["lambda"].get<double>()); }

FieldPtr make_field(const json& spec, const Grid3& g) {
  const std::string type = spec["type"];
  if (type == "e3") return std::make_shared<UniformField>(Vec3{0, 0, 1});
  if (type == "uniform") return std::make_shared<UniformField>(vec3(spec["value"]));
  if (type == "bump") {
    std::vector<Bump> bumps;
    if (spec["bumps"].empty()) {
      bumps.push_back(Bump{spec["delta"].get<double>(), vec3(spec["center"]), spec["width"].get<double>(),
                           vec3(spec["dir"])});
    } else {
      for (const auto& b : spec["bumps"])
        bumps.push_back(Bump{b["delta"].get<double>(), vec3(b["center"]), b["width"].get<double>(), vec3(b["dir"])});
    }
    return std::make_shared<BumpField>(vec3(spec["background"]), bumps);
  }
  if (type == "cos_modes") return make_cos_modes(vec3(spec["mean"]), random_cos_modes(spec, g));
  if (type == "null_point") return make_null_point_field(vec3(spec["center"]), spec["width"].get<double>());
  if (type == "file") return std::make_shared<LagrangeGridField>(make_spectral(spec, g));
  throw ConfigError("/type", "unknown field type");
}

SpectralVectorField make_spectral(const json& spec, const Grid3& g) {
  if (spec["type"] == "file") {
    const RealVectorField f = read_field(spec["path"].get<std::string>());
    if (f.grid != g) throw ConfigError("/path", "field file grid does not match the configured grid");
    return leray_project(fft_forward(f));
  }
  return leray_project(fft_forward(sample_field(*make_field(spec, g), g)));
}

std::string field_id(const json& spec) {
  const std::string type = spec["type"];
  std::ostringstream os;
  os << type;
  if (type == "bump" && spec["bumps"].empty()) os << "(delta=" << spec["delta"].get<double>() << ")";
  if (type == "bump" && !spec["bumps"].empty()) os << "(" << spec["bumps"].size() << " bumps)";
  if (type == "cos_modes") os << "(amplitude=" << spec["amplitude"].get<double>() << ",seed=" << spec["seed"] << ")";
  if (type == "file") os << "(" << spec["path"].get<std::string>() << ")";
  return os.str();
}

}  // namespace emhd
