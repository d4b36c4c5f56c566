#include "xxcorr/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace xxcorr {

using nlohmann::json;
using namespace xxhydro;

namespace {

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "config" : path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
}

template <class T>
T read(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + key, e.what());
  }
}

IntRange read_range(const json& j, const std::string& key, IntRange fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = read<std::vector<int>>(j, key, "", {});
  if (v.size() != 2) throw ConfigError(key, "expected [lo, hi]");
  return {v[0], v[1]};
}

}  // namespace

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &config;
  std::stringstream ss(key);
  std::string seg;
  std::vector<std::string> parts;
  while (std::getline(ss, seg, '.')) parts.push_back(seg);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.empty()) throw ConfigError(key, "empty path segment");
    if (node->is_array() && is_index(p)) {
      const std::size_t idx = std::stoul(p);
      if (idx >= node->size()) throw ConfigError(key, "index out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError(key, "'" + p + "' is not inside an object");
      node = &(*node)[p];
    }
  }
  *node = value;
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json config = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    config = json::parse(in, nullptr, false, true);
    if (config.is_discarded()) throw ConfigError("config", "'" + path + "' is not valid JSON");
  }
  for (const auto& o : overrides) apply_override(config, o);
  return config;
}

ScanConfig ScanConfig::from_json(const json& j) {
  check_keys(j, {"chain", "state", "observables", "rays", "x_range", "fit_window",
                 "gap_threshold", "cell", "factorisation", "fluidcell"},
             "");
  ScanConfig c;

  json chain = j.value("chain", json::object());
  check_keys(chain, {"N", "h", "boundary", "sector"}, "chain");
  try {
    c.chain = chain_from_json(chain);
    c.chain.validate();
  } catch (const std::exception& e) {
    std::string what = e.what();
    if (what.rfind("chain: ", 0) == 0) what.erase(0, 7);
    throw ConfigError("chain", what);
  }

  json state = j.value("state", json{{"kind", "thermal"}, {"beta", 0.0}});
  if (!state.is_object()) throw ConfigError("state", "expected an object");
  if (!state.contains("h")) state["h"] = c.chain.h;
  try {
    c.state = state_from_json(state);
  } catch (const std::exception& e) {
    throw ConfigError("state", e.what());
  }
  if (c.state.h() != c.chain.h) throw ConfigError("state.h", "differs from chain.h");

  if (j.contains("observables")) {
    c.observables.clear();
    for (const auto& name : read<std::vector<std::string>>(j, "observables", "", {})) {
      try {
        c.observables.push_back(observable_from_string(name));
      } catch (const std::exception& e) {
        throw ConfigError("observables", e.what());
      }
      if (c.observables.back() != Observable::transverse_pm &&
          c.observables.back() != Observable::longitudinal_zz_connected)
        throw ConfigError("observables", "scans support transverse_pm and longitudinal_zz_connected");
    }
    if (c.observables.empty()) throw ConfigError("observables", "empty list");
  }

  c.rays = read<std::vector<double>>(j, "rays", "", {});
  for (double phi : c.rays)
    if (!(phi >= 0.0 && phi <= pi / 2 + 1e-12)) throw ConfigError("rays", "phi must lie in [0, pi/2]");

  c.x_range = read_range(j, "x_range", {1, std::min(20, c.chain.N - 1)});
  if (c.x_range.lo < 0 || c.x_range.hi < c.x_range.lo)
    throw ConfigError("x_range", "expected 0 <= lo <= hi");
  if (c.x_range.hi > c.chain.N - 1) throw ConfigError("x_range", "hi exceeds N - 1");
  c.fit_window = read_range(j, "fit_window", {std::min(c.x_range.lo + 5, c.x_range.hi), c.x_range.hi});
  if (c.fit_window.lo > c.fit_window.hi || !c.x_range.contains(c.fit_window.lo) ||
      !c.x_range.contains(c.fit_window.hi))
    throw ConfigError("fit_window", "must be a sub-interval of x_range");

  c.gap_threshold = read<double>(j, "gap_threshold", "", 0.07);
  if (!(c.gap_threshold > 0.0)) throw ConfigError("gap_threshold", "must be positive");

  if (j.contains("cell")) {
    const json& cell = j.at("cell");
    check_keys(cell, {"kind", "ell0", "epsilon", "ray_nodes"}, "cell");
    FluidCellSpec s;
    try {
      s.kind = cell_kind_from_string(read<std::string>(cell, "kind", "cell.", "time_mean"));
    } catch (const DomainError& e) {
      throw ConfigError("cell.kind", e.what());
    }
    s.ell0 = read<double>(cell, "ell0", "cell.", s.ell0);
    s.epsilon = read<double>(cell, "epsilon", "cell.", s.epsilon);
    s.ray_nodes = read<int>(cell, "ray_nodes", "cell.", s.ray_nodes);
    try {
      s.validate();
    } catch (const DomainError& e) {
      throw ConfigError("cell", e.what());
    }
    c.cell = s;
  }

  if (j.contains("factorisation")) {
    const json& f = j.at("factorisation");
    check_keys(f, {"lambda_imag", "x", "origin"}, "factorisation");
    c.factorisation.lambda_imag = read<std::vector<double>>(f, "lambda_imag", "factorisation.", {});
    c.factorisation.x = read<std::vector<int>>(f, "x", "factorisation.", {});
    c.factorisation.origin = read<int>(f, "origin", "factorisation.", -1);
    for (int x : c.factorisation.x)
      if (x < 1 || x >= c.chain.N) throw ConfigError("factorisation.x", "need 1 <= x < N");
  }

  if (j.contains("fluidcell")) {
    const json& f = j.at("fluidcell");
    check_keys(f, {"source", "xi", "x", "samples"}, "fluidcell");
    const std::string src = read<std::string>(f, "source", "fluidcell.", "asymptotic");
    if (src == "wick")
      c.fluidcell.source = FieldSource::wick;
    else if (src == "asymptotic")
      c.fluidcell.source = FieldSource::asymptotic;
    else
      throw ConfigError("fluidcell.source", "expected 'wick' or 'asymptotic'");
    c.fluidcell.xi = read<double>(f, "xi", "fluidcell.", c.fluidcell.xi);
    c.fluidcell.x = read<int>(f, "x", "fluidcell.", c.fluidcell.x);
    c.fluidcell.samples = read<int>(f, "samples", "fluidcell.", c.fluidcell.samples);
    if (!(c.fluidcell.xi > 0.0 && c.fluidcell.xi < 4.0))
      throw ConfigError("fluidcell.xi", "must lie in (0, 4)");
    if (c.fluidcell.x < 1) throw ConfigError("fluidcell.x", "must be positive");
    if (c.fluidcell.samples < 2) throw ConfigError("fluidcell.samples", "need at least 2");
  }
  return c;
}

json ScanConfig::to_json() const {
  json j;
  j["chain"] = xxhydro::to_json(chain);
  j["state"] = xxhydro::to_json(state);
  j["observables"] = json::array();
  for (Observable o : observables) j["observables"].push_back(to_string(o));
  j["rays"] = rays;
  j["x_range"] = {x_range.lo, x_range.hi};
  j["fit_window"] = {fit_window.lo, fit_window.hi};
  j["gap_threshold"] = gap_threshold;
  if (cell)
    j["cell"] = {{"kind", to_string(cell->kind)},
                 {"ell0", cell->ell0},
                 {"epsilon", cell->epsilon},
                 {"ray_nodes", cell->ray_nodes}};
  if (!factorisation.x.empty() || !factorisation.lambda_imag.empty())
    j["factorisation"] = {{"lambda_imag", factorisation.lambda_imag},
                          {"x", factorisation.x},
                          {"origin", factorisation.origin}};
  j["fluidcell"] = {{"source", fluidcell.source == FieldSource::wick ? "wick" : "asymptotic"},
                    {"xi", fluidcell.xi},
                    {"x", fluidcell.x},
                    {"samples", fluidcell.samples}};
  return j;
}

}  // namespace xxcorr
