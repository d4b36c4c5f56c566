#include "xxhydro/series.hpp"

#include <charconv>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace xxhydro {

std::string to_string(Observable o) {
  switch (o) {
    case Observable::transverse_pm: return "transverse_pm";
    case Observable::longitudinal_zz_connected: return "longitudinal_zz_connected";
    case Observable::string_average: return "string_average";
    case Observable::generating_function: return "generating_function";
    case Observable::euler_prediction: return "euler_prediction";
  }
  return "?";
}

Observable observable_from_string(const std::string& s) {
  for (Observable o : {Observable::transverse_pm, Observable::longitudinal_zz_connected,
                       Observable::string_average, Observable::generating_function,
                       Observable::euler_prediction})
    if (to_string(o) == s) return o;
  throw DomainError("unknown observable '" + s + "'");
}

void CorrelatorSeries::push(SpaceTimePoint p, LogValue v, unsigned flags) {
  points.push_back(p);
  values.push_back(v);
  warnings.push_back(flags);
}

void CorrelatorSeries::validate() const {
  if (values.size() != points.size() || warnings.size() != points.size())
    throw ShapeError("series: column lengths differ");
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const auto& a = points[i];
    const auto& b = points[i + 1];
    if (!(a.x < b.x || (a.x == b.x && a.t < b.t)))
      throw ShapeError("series: points are not strictly ordered along the scan");
  }
  for (const auto& v : values)
    if (std::isnan(v.log_abs) || std::isnan(v.phase) || v.log_abs == HUGE_VAL)
      throw ShapeError("series: non-finite value");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ShapeError("series: bad number '" + s + "'");
  return v;
}

LogValue from_log10(double log10_abs, double phase) {
  LogValue v;
  if (std::isinf(log10_abs) && log10_abs < 0) return v;
  v.log_abs = log10_abs * std::log(10.0);
  v.phase = phase;
  return v;
}

}  // namespace

std::string to_csv(const CorrelatorSeries& s) {
  std::ostringstream out;
  out << "x,t,re,im,log10_abs,phase,warning_flags\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const cplx z = s.values[i].value();
    out << s.points[i].x << ',' << format_double(s.points[i].t) << ',' << format_double(z.real())
        << ',' << format_double(z.imag()) << ',' << format_double(s.values[i].log10_abs()) << ','
        << format_double(s.values[i].phase) << ',' << s.warnings[i] << '\n';
  }
  return out.str();
}

CorrelatorSeries series_from_csv(const std::string& text, Observable observable) {
  CorrelatorSeries s;
  s.observable = observable;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "x,t,re,im,log10_abs,phase,warning_flags")
    throw ShapeError("series: unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw ShapeError("series: expected 7 CSV fields");
    s.push({static_cast<int>(parse_double(f[0])), parse_double(f[1])},
           from_log10(parse_double(f[4]), parse_double(f[5])),
           static_cast<unsigned>(parse_double(f[6])));
  }
  s.validate();
  return s;
}

nlohmann::json to_json(const GGEState& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind());
  j["h"] = s.h();
  switch (s.kind()) {
    case StateKind::thermal: j["beta"] = s.beta(); break;
    case StateKind::fourier: {
      nlohmann::json c = nlohmann::json::array();
      for (cplx z : s.fourier_coeffs()) c.push_back({z.real(), z.imag()});
      j["fourier_coeffs"] = c;
      break;
    }
    case StateKind::tabulated:
      j["table"] = {{"k", s.table_k()}, {"w", s.table_w()}};
      break;
  }
  return j;
}

GGEState state_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double h = j.value("h", 0.0);
  if (kind == "thermal") return GGEState::thermal(j.at("beta").get<double>(), h);
  if (kind == "fourier") {
    std::vector<cplx> c;
    for (const auto& z : j.at("fourier_coeffs")) {
      if (z.is_array()) {
        c.emplace_back(z.at(0).get<double>(), z.size() > 1 ? z.at(1).get<double>() : 0.0);
      } else {
        c.emplace_back(z.get<double>(), 0.0);
      }
    }
    return GGEState::fourier(c, h);
  }
  if (kind == "tabulated") {
    const auto& t = j.at("table");
    return GGEState::tabulated(t.at("k").get<std::vector<double>>(),
                               t.at("w").get<std::vector<double>>(), h);
  }
  throw DomainError("state.kind: unknown kind '" + kind + "'");
}

nlohmann::json to_json(const ChainSpec& c) {
  return {{"N", c.N}, {"h", c.h}, {"boundary", to_string(c.boundary)},
          {"sector", to_string(c.sector)}};
}

ChainSpec chain_from_json(const nlohmann::json& j) {
  ChainSpec c;
  c.N = j.at("N").get<int>();
  c.h = j.value("h", 0.0);
  c.boundary = boundary_from_string(j.value("boundary", std::string("open")));
  c.sector = sector_from_string(j.value("sector", std::string("grand")));
  c.validate();
  return c;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number_from(const nlohmann::json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

}  // namespace

nlohmann::json to_json(const CorrelatorSeries& s) {
  nlohmann::json j;
  j["observable"] = to_string(s.observable);
  if (s.state) j["state"] = to_json(*s.state);
  if (s.chain) j["chain"] = to_json(*s.chain);
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const cplx z = s.values[i].value();
    pts.push_back({{"x", s.points[i].x},
                   {"t", s.points[i].t},
                   {"re", number(z.real())},
                   {"im", number(z.imag())},
                   {"log10_abs", number(s.values[i].log10_abs())},
                   {"phase", s.values[i].phase},
                   {"warning_flags", s.warnings[i]}});
  }
  j["points"] = pts;
  return j;
}

CorrelatorSeries series_from_json(const nlohmann::json& j) {
  CorrelatorSeries s;
  s.observable = observable_from_string(j.at("observable").get<std::string>());
  if (j.contains("state")) s.state = state_from_json(j.at("state"));
  if (j.contains("chain")) s.chain = chain_from_json(j.at("chain"));
  for (const auto& p : j.at("points"))
    s.push({p.at("x").get<int>(), p.at("t").get<double>()},
           from_log10(number_from(p.at("log10_abs")), p.at("phase").get<double>()),
           p.at("warning_flags").get<unsigned>());
  s.validate();
  return s;
}

}  // namespace xxhydro
