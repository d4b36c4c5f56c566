#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xxhydro/hydro.hpp"
#include "xxhydro/series.hpp"

namespace xxcorr {

// Invalid configuration; field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// "a.b.c=value". The value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);
nlohmann::json load_config(const std::string& path, const std::vector<std::string>& overrides);

struct IntRange {
  int lo = 0;
  int hi = 0;

  bool contains(int v) const { return v >= lo && v <= hi; }
};

struct FactorisationConfig {
  std::vector<double> lambda_imag;  // lambda = i * value
  std::vector<int> x;
  int origin = -1;  // -1 centres the interval
};

enum class FieldSource { wick, asymptotic };

struct FluidcellConfig {
  FieldSource source = FieldSource::asymptotic;
  double xi = 1.0;
  int x = 300;       // first base point
  int samples = 64;  // base points, unit x steps for ray means, required spacing for time means
};

struct ScanConfig {
  xxhydro::ChainSpec chain;
  xxhydro::GGEState state = xxhydro::GGEState::thermal(0.0, 0.0);
  std::vector<xxhydro::Observable> observables{xxhydro::Observable::transverse_pm};
  std::vector<double> rays;  // phi in [0, pi/2]
  IntRange x_range{1, 20};
  IntRange fit_window{5, 20};
  double gap_threshold = 0.07;
  std::optional<xxhydro::FluidCellSpec> cell;
  FactorisationConfig factorisation;
  FluidcellConfig fluidcell;

  static ScanConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace xxcorr
