#pragma once

// JSON scenario files: parsing with key-path errors, and a canonical echo
// that parses back to the same config.

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dynamics.hpp"
#include "error.hpp"
#include "simulation.hpp"

namespace nlnoether {

using json = nlohmann::json;

namespace detail {

inline std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline void require_object(const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError(key.empty() ? "<root>" : key, "expected an object");
}

inline void reject_unknown(const json& j, const std::string& prefix,
                           const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(join_key(prefix, it.key()), "unknown key");
}

inline const json& require_key(const json& j, const std::string& prefix, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join_key(prefix, key), "missing required key");
  return *it;
}

inline double as_number(const json& j, const std::string& key) {
  if (j.is_string() && (j == "inf" || j == "infinity"))
    return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  const double x = j.get<double>();
  if (std::isnan(x)) throw ConfigError(key, "expected a number");
  return x;
}

inline long long as_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    if (j.is_number_float()) {
      const double x = j.get<double>();
      if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
    }
    throw ConfigError(key, "expected an integer");
  }
  return j.get<long long>();
}

inline double number_or(const json& j, const std::string& prefix, const std::string& key,
                        double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, join_key(prefix, key));
}

inline json number_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

}  // namespace detail

/// Parses and validates a scenario. Errors carry the dotted key path.
inline ScenarioConfig parse_config(const json& j) {
  using namespace detail;
  require_object(j, "");
  reject_unknown(j, "", {"dim", "counts", "lengths", "material", "kernel", "init", "bc", "dt",
                         "steps", "sample_every"});
  ScenarioConfig c;

  const long long dim = as_integer(require_key(j, "", "dim"), "dim");
  if (dim < 1 || dim > 3) throw ConfigError("dim", "must be 1, 2 or 3");
  c.dim = static_cast<int>(dim);

  const json& counts = require_key(j, "", "counts");
  if (!counts.is_array() || counts.size() != static_cast<std::size_t>(c.dim))
    throw ConfigError("counts", "expected an array of " + std::to_string(c.dim) + " integers");
  c.counts.clear();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const long long n = as_integer(counts[k], "counts[" + std::to_string(k) + "]");
    if (n < 3 || n > 1 << 20)
      throw ConfigError("counts[" + std::to_string(k) + "]", "must be in [3, 2^20]");
    c.counts.push_back(static_cast<int>(n));
  }

  const json& lengths = require_key(j, "", "lengths");
  if (!lengths.is_array() || lengths.size() != static_cast<std::size_t>(c.dim))
    throw ConfigError("lengths", "expected an array of " + std::to_string(c.dim) + " numbers");
  c.lengths.clear();
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const std::string key = "lengths[" + std::to_string(k) + "]";
    const double L = as_number(lengths[k], key);
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError(key, "must be finite and > 0");
    c.lengths.push_back(L);
  }

  // material
  const json& mat = require_key(j, "", "material");
  require_object(mat, "material");
  reject_unknown(mat, "material", {"rho", "E", "lambda", "mu"});
  const double rho = as_number(require_key(mat, "material", "rho"), "material.rho");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("material.rho", "must be > 0");
  const bool has_E = mat.contains("E");
  const bool has_lame = mat.contains("lambda") || mat.contains("mu");
  if (has_E && has_lame)
    throw ConfigError("material", "give either E or the pair lambda, mu, not both");
  if (has_E) {
    if (c.dim > 1) throw ConfigError("material.E", "dim >= 2 needs lambda and mu");
    const double E = as_number(mat["E"], "material.E");
    if (!(E > 0.0) || !std::isfinite(E)) throw ConfigError("material.E", "must be > 0");
    c.material = MaterialModel::uniaxial(rho, E);
  } else if (has_lame) {
    const double lam = as_number(require_key(mat, "material", "lambda"), "material.lambda");
    const double mu = as_number(require_key(mat, "material", "mu"), "material.mu");
    if (!(mu > 0.0)) throw ConfigError("material.mu", "must be > 0");
    if (!(3.0 * lam + 2.0 * mu > 0.0))
      throw ConfigError("material.lambda", "3 lambda + 2 mu must be > 0");
    c.material = MaterialModel::lame(rho, lam, mu);
  } else {
    throw ConfigError("material.E", "missing elasticity: give E (1D) or lambda and mu");
  }

  // kernel
  const json& ker = require_key(j, "", "kernel");
  require_object(ker, "kernel");
  reject_unknown(ker, "kernel", {"family", "A", "ell", "beta", "central", "cutoff"});
  const json& fam = require_key(ker, "kernel", "family");
  if (!fam.is_string()) throw ConfigError("kernel.family", "expected a string");
  const auto family = parse_kernel_family(fam.get<std::string>());
  if (!family) throw ConfigError("kernel.family", "unknown family '" + fam.get<std::string>() + "'");
  c.kernel.family = *family;
  c.kernel.amplitude = number_or(ker, "kernel", "A", 1.0);
  c.kernel.horizon = number_or(ker, "kernel", "ell", 1.0);
  c.kernel.modulation = number_or(ker, "kernel", "beta", 0.0);
  if (!(c.kernel.amplitude >= 0.0) || !std::isfinite(c.kernel.amplitude))
    throw ConfigError("kernel.A", "must be finite and >= 0");
  if (!(c.kernel.horizon > 0.0)) throw ConfigError("kernel.ell", "must be > 0");
  if (!(c.kernel.modulation >= 0.0) || !std::isfinite(c.kernel.modulation))
    throw ConfigError("kernel.beta", "must be finite and >= 0");
  if (c.kernel.modulation != 0.0 && c.kernel.family != KernelFamily::exponential_modulated)
    throw ConfigError("kernel.beta", "only used by exponential_modulated");
  if (auto it = ker.find("central"); it != ker.end()) {
    if (!it->is_boolean()) throw ConfigError("kernel.central", "expected a boolean");
    c.kernel.central = it->get<bool>();
  }
  if (auto it = ker.find("cutoff"); it != ker.end() && !it->is_null()) {
    const double cut = as_number(*it, "kernel.cutoff");
    if (!(cut > 0.0)) throw ConfigError("kernel.cutoff", "must be > 0");
    c.cutoff = cut;
  }

  // init
  if (auto it = j.find("init"); it != j.end()) {
    const json& init = *it;
    require_object(init, "init");
    reject_unknown(init, "init", {"preset", "params", "seed"});
    const json& preset = require_key(init, "init", "preset");
    if (!preset.is_string()) throw ConfigError("init.preset", "expected a string");
    c.init.preset = preset.get<std::string>();
    bool known = false;
    for (const auto& n : preset_names()) known = known || n == c.init.preset;
    if (!known) throw ConfigError("init.preset", "unknown preset '" + c.init.preset + "'");
    if (auto pit = init.find("params"); pit != init.end()) {
      require_object(*pit, "init.params");
      for (auto e = pit->begin(); e != pit->end(); ++e) {
        const std::string key = "init.params." + e.key();
        std::vector<double> vals;
        if (e->is_array()) {
          for (const auto& x : *e) vals.push_back(as_number(x, key));
        } else {
          vals.push_back(as_number(*e, key));
        }
        c.init.params[e.key()] = vals;
      }
    }
    if (auto sit = init.find("seed"); sit != init.end()) {
      const long long seed = as_integer(*sit, "init.seed");
      if (seed < 0) throw ConfigError("init.seed", "must be >= 0");
      c.init.seed = static_cast<std::uint64_t>(seed);
    }
  }

  // bc: {"x-min": "fixed", ...} or {"faces": {...}}; unlisted faces are free.
  if (auto it = j.find("bc"); it != j.end()) {
    const json* faces = &*it;
    std::string prefix = "bc";
    require_object(*faces, prefix);
    if (faces->size() == 1 && faces->contains("faces")) {
      faces = &(*faces)["faces"];
      prefix = "bc.faces";
      require_object(*faces, prefix);
    }
    for (auto e = faces->begin(); e != faces->end(); ++e) {
      const std::string key = join_key(prefix, e.key());
      const auto label = parse_face_label(e.key());
      if (!label) throw ConfigError(key, "unknown face label");
      if (face_axis(*label) >= c.dim) throw ConfigError(key, "face does not exist in this dimension");
      if (!e->is_string() || (*e != "fixed" && *e != "free"))
        throw ConfigError(key, "expected \"fixed\" or \"free\"");
      if (*e == "fixed") c.fixed_faces.insert(*label);
    }
  }

  // dt may be "auto": the stability bound itself.
  const json& dt = require_key(j, "", "dt");
  if (dt.is_string() && dt == "auto") {
    c.dt = stability_bound(c);
  } else {
    c.dt = as_number(dt, "dt");
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt", "must be finite and > 0");
  }

  const long long steps = as_integer(require_key(j, "", "steps"), "steps");
  if (steps < 0) throw ConfigError("steps", "must be >= 0");
  c.steps = static_cast<std::size_t>(steps);
  if (auto it = j.find("sample_every"); it != j.end()) {
    const long long se = as_integer(*it, "sample_every");
    if (se < 1) throw ConfigError("sample_every", "must be >= 1");
    c.sample_every = static_cast<std::size_t>(se);
  }

  validate(c);
  return c;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<json>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Canonical JSON form; parse_config(echo_config(c)) reproduces c.
inline json echo_config(const ScenarioConfig& c) {
  using detail::number_to_json;
  json j;
  j["dim"] = c.dim;
  j["counts"] = c.counts;
  json lengths = json::array();
  for (double L : c.lengths) lengths.push_back(number_to_json(L));
  j["lengths"] = lengths;
  json mat;
  mat["rho"] = c.material.rho;
  if (c.material.isotropic) {
    mat["lambda"] = c.material.lambda;
    mat["mu"] = c.material.mu;
  } else {
    mat["E"] = c.material.E;
  }
  j["material"] = mat;
  json ker;
  ker["family"] = std::string(to_string(c.kernel.family));
  ker["A"] = number_to_json(c.kernel.amplitude);
  ker["ell"] = number_to_json(c.kernel.horizon);
  ker["beta"] = number_to_json(c.kernel.modulation);
  ker["central"] = c.kernel.central;
  if (c.cutoff) ker["cutoff"] = *c.cutoff;
  j["kernel"] = ker;
  json params = json::object();
  for (const auto& [k, v] : c.init.params) {
    if (v.size() == 1) {
      params[k] = v[0];
    } else {
      params[k] = v;
    }
  }
  j["init"] = {{"preset", c.init.preset}, {"params", params}, {"seed", c.init.seed}};
  json bc = json::object();
  for (FaceLabel f : kAllFaces) {
    if (face_axis(f) >= c.dim) continue;
    bc[std::string(to_string(f))] = c.fixed_faces.count(f) ? "fixed" : "free";
  }
  j["bc"] = bc;
  j["dt"] = c.dt;
  j["steps"] = c.steps;
  j["sample_every"] = c.sample_every;
  return j;
}

}  // namespace nlnoether
