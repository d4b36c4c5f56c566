#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "xxcorr/config.hpp"
#include "xxcorr/scan.hpp"

namespace fs = std::filesystem;
using namespace xxcorr;
using namespace xxhydro;

namespace {

enum ExitCode { kOk = 0, kComparisonFailed = 1, kConfigError = 2, kNumericFailure = 3 };

struct Output {
  fs::path dir;

  void write(const std::string& name, const std::string& text) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("--out-dir", "cannot write " + p.string());
    out << text;
    std::cout << p.string() << '\n';
  }
  void write(const std::string& name, const nlohmann::json& j) const { write(name, j.dump(2) + "\n"); }
};

std::string ray_tag(double phi) { return "phi" + format_double(phi); }

void require_rays(const ScanConfig& c) {
  if (c.rays.empty()) throw ConfigError("rays", "at least one ray is required");
}

int cmd_exact(const ScanConfig& c, const Output& out) {
  require_rays(c);
  const EigenBasis basis = build_eigenbasis(c.chain);
  for (Observable o : c.observables)
    for (double phi : c.rays) {
      const CorrelatorSeries s = exact_ray_series(basis, c.state, o, phi, c.x_range);
      const std::string stem = "exact_" + to_string(o) + "_" + ray_tag(phi);
      out.write(stem + ".csv", to_csv(s));
      out.write(stem + ".json", to_json(s));
    }
  return kOk;
}

int cmd_predict(const ScanConfig& c, const Output& out) {
  require_rays(c);
  for (Observable o : c.observables) {
    if (o == Observable::transverse_pm) {
      out.write("predict_transverse_pm_rays.csv", ray_sweep_csv(c.state, c.rays));
    } else {
      for (double phi : c.rays) {
        const CorrelatorSeries s = euler_ray_series(c.state, phi, c.x_range);
        out.write("predict_" + to_string(o) + "_" + ray_tag(phi) + ".csv", to_csv(s));
      }
    }
  }
  return kOk;
}

int cmd_compare(const ScanConfig& c, const Output& out) {
  require_rays(c);
  const EigenBasis basis = build_eigenbasis(c.chain);
  nlohmann::json reports = nlohmann::json::array();
  bool all_ok = true;
  for (double phi : c.rays) {
    const CorrelatorSeries s =
        exact_ray_series(basis, c.state, Observable::transverse_pm, phi, c.x_range);
    const DecayReport r = compare_ray(s, c.state, phi, c.fit_window, c.gap_threshold);
    all_ok = all_ok && r.ok;
    reports.push_back(to_json(r));
    std::cout << ray_tag(phi) << " fitted " << format_double(r.fitted.slope) << " predicted "
              << format_double(r.predicted.F) << " gap " << format_double(r.gap)
              << (r.ok ? " ok" : " FAIL") << '\n';
  }
  out.write("decay_reports.json", reports);
  return all_ok ? kOk : kComparisonFailed;
}

int cmd_factorisation(const ScanConfig& c, const Output& out) {
  if (c.factorisation.x.empty() || c.factorisation.lambda_imag.empty())
    throw ConfigError("factorisation", "needs non-empty x and lambda_imag lists");
  out.write("factorisation.csv", factorisation_csv(factorisation_table(c.chain, c.state, c.factorisation)));
  return kOk;
}

int cmd_fluidcell(const ScanConfig& c, const Output& out) {
  if (!c.cell) throw ConfigError("cell", "required for fluidcell");
  const FluidcellReport r = fluidcell_diagnostic(c.state, c.fluidcell, *c.cell);
  const std::string stem = "fluidcell_" + to_string(c.cell->kind);
  out.write(stem + "_raw.csv", to_csv(r.raw));
  out.write(stem + "_averaged.csv", to_csv(r.averaged));
  out.write(stem + "_report.json", to_json(r));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and hydrodynamic correlators of the XX chain"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--set", overrides, "override a configuration key, key.path=value");
  app.add_option("--out-dir", out_dir, "directory for output files");

  using Command = int (*)(const ScanConfig&, const Output&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"exact", "exact correlators along rays", cmd_exact},
      {"predict", "predicted decay rates and Euler profiles", cmd_predict},
      {"compare", "fit exact decay along rays against the prediction", cmd_compare},
      {"factorisation", "static factorisation gap table", cmd_factorisation},
      {"fluidcell", "fluid-cell means and oscillation diagnostics", cmd_fluidcell},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) subs.push_back(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const ScanConfig config = ScanConfig::from_json(load_config(config_path, overrides));
    const Output out{out_dir};
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return std::get<2>(commands[i])(config, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SamplingError& e) {
    std::cerr << "config error: " << e.what() << " (required spacing " << e.required_spacing()
              << ")\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedStateError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kOk;
}
