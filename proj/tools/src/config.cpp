#include "config.hpp"

#include <initializer_list>
#include <set>

#include "json.hpp"
#include "occtime/errors.hpp"
#include "occtime/grid.hpp"

namespace occtime::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorKind::InvalidConfig, "config: " + msg);
}

void allow_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> keys) {
  if (!obj.is_object()) invalid(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) invalid("unknown key '" + item.key() + "' in " + where);
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) invalid(where + " needs '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) invalid(where + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

VectorXd vector(const json& v, const std::string& where, Eigen::Index expected) {
  VectorXd out;
  if (v.is_number()) {
    out = VectorXd::Constant(1, v.get<double>());
  } else if (v.is_array()) {
    out.resize(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) invalid(where + " must contain numbers");
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
  } else {
    invalid(where + " must be a number or an array");
  }
  if (expected >= 0 && out.size() != expected) {
    invalid(where + " must have length " + std::to_string(expected));
  }
  return out;
}

MatrixXd matrix(const json& v, const std::string& where, Eigen::Index n) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
    invalid(where + " must be an array of " + std::to_string(n) + " rows");
  }
  MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.row(i) = vector(v[static_cast<std::size_t>(i)], where + " row", n).transpose();
  }
  return out;
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) invalid(where + " needs '" + key + "'");
  return obj.at(key);
}

double initial_x0(const json& initial) {
  const double x0 = number_or(initial, "x0", 0.0, "initial");
  if (x0 != 0.0) invalid("initial.x0 must be 0 for sliding systems (they start on x = 0)");
  return x0;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) invalid("top level must be an object");
  const auto& kind_v = member(doc, "kind", "top level");
  if (!kind_v.is_string()) invalid("kind must be a string");
  const auto kind = kind_v.get<std::string>();

  SystemConfig cfg;
  cfg.text = text;

  if (kind == "two_valued") {
    cfg.kind = SystemKind::two_valued;
    allow_keys(doc, "top level", {"kind", "a_L", "a_R", "initial", "diffusion_scale"});
    cfg.two_valued.rate_left = number(doc, "a_L", "top level");
    cfg.two_valued.rate_right = number(doc, "a_R", "top level");
    cfg.two_valued.diffusion_scale = number_or(doc, "diffusion_scale", 1.0, "top level");
    if (doc.contains("initial")) {
      allow_keys(doc["initial"], "initial", {"x0"});
      cfg.two_valued.x0 = number_or(doc["initial"], "x0", 0.0, "initial");
    }
    try {
      cfg.two_valued.validate();
    } catch (const Error& e) {
      invalid(e.what());
    }
    return cfg;
  }

  if (kind == "builtin_example") {
    cfg.kind = SystemKind::builtin_example;
    allow_keys(doc, "top level", {"kind", "noise", "initial"});
    double epsilon = 0.1;
    if (doc.contains("noise")) {
      allow_keys(doc["noise"], "noise", {"epsilon"});
      epsilon = number_or(doc["noise"], "epsilon", epsilon, "noise");
    }
    cfg.y0 = VectorXd::Constant(1, 2.0);
    if (doc.contains("initial")) {
      allow_keys(doc["initial"], "initial", {"x0", "y0"});
      initial_x0(doc["initial"]);
      if (doc["initial"].contains("y0")) cfg.y0 = vector(doc["initial"]["y0"], "initial.y0", 1);
    }
    cfg.system = FilippovSystem::builtin_example();
    cfg.noise = NoiseSpec::builtin_example(epsilon);
  } else if (kind == "piecewise_affine") {
    cfg.kind = SystemKind::piecewise_affine;
    allow_keys(doc, "top level", {"kind", "N", "A_L", "c_L", "A_R", "c_R", "noise", "initial"});
    const auto& n_v = member(doc, "N", "top level");
    if (!n_v.is_number_integer() || n_v.get<long>() < 2) invalid("N must be an integer >= 2");
    const auto n = static_cast<Eigen::Index>(n_v.get<long>());
    const MatrixXd a_left = matrix(member(doc, "A_L", "top level"), "A_L", n);
    const MatrixXd a_right = matrix(member(doc, "A_R", "top level"), "A_R", n);
    const VectorXd c_left = vector(member(doc, "c_L", "top level"), "c_L", n);
    const VectorXd c_right = vector(member(doc, "c_R", "top level"), "c_R", n);
    const auto& noise = member(doc, "noise", "top level");
    allow_keys(noise, "noise", {"epsilon", "D"});
    cfg.noise.epsilon = number(noise, "epsilon", "noise");
    cfg.noise.matrix = matrix(member(noise, "D", "noise"), "noise.D", n);
    const auto& initial = member(doc, "initial", "top level");
    allow_keys(initial, "initial", {"x0", "y0"});
    initial_x0(initial);
    cfg.y0 = vector(member(initial, "y0", "initial"), "initial.y0", n - 1);
    cfg.system = FilippovSystem::piecewise_affine(a_left, c_left, a_right, c_right);
  } else {
    invalid("unknown kind '" + kind + "' (expected two_valued, builtin_example or piecewise_affine)");
  }

  try {
    cfg.noise.validate(cfg.system->dimension());
  } catch (const Error& e) {
    invalid(e.what());
  }
  if (!cfg.y0.allFinite()) invalid("initial.y0 must be finite");
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    invalid(e.what());
  }
  return parse_config(text);
}

}  // namespace occtime::cli
