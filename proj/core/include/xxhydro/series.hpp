#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "xxhydro/model.hpp"

namespace xxhydro {

enum class Observable {
  transverse_pm,
  longitudinal_zz_connected,
  string_average,
  generating_function,
  euler_prediction,
};

std::string to_string(Observable o);
Observable observable_from_string(const std::string& s);

struct CorrelatorSeries {
  Observable observable = Observable::transverse_pm;
  std::vector<SpaceTimePoint> points;
  std::vector<LogValue> values;
  std::vector<unsigned> warnings;
  std::optional<GGEState> state;
  std::optional<ChainSpec> chain;

  std::size_t size() const { return points.size(); }
  void push(SpaceTimePoint p, LogValue v, unsigned flags = 0);
  // Points strictly increasing in (x, t); equal lengths of all columns.
  void validate() const;
};

std::string to_csv(const CorrelatorSeries& s);
CorrelatorSeries series_from_csv(const std::string& text, Observable observable);

nlohmann::json to_json(const CorrelatorSeries& s);
CorrelatorSeries series_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GGEState& s);
GGEState state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChainSpec& c);
ChainSpec chain_from_json(const nlohmann::json& j);

// Shortest round-trip decimal form used in every text output.
std::string format_double(double v);

}  // namespace xxhydro
