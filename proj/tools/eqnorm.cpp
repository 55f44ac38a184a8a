// eqnorm: certificates, quench dynamics and parameter scans from a config file.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eqnorm/config.hpp"
#include "eqnorm/error.hpp"
#include "eqnorm/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic normality certificates and approach-to-equilibrium runs"};
  app.require_subcommand(1);

  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out_dir, "output directory (default ./out)");
  app.add_option("--seed", seed, "override every seed in the config");

  std::string config_path;
  std::string scan_kind;
  auto* run = app.add_subcommand("run", "certificate plus dynamics");
  run->add_option("config", config_path, "config file")->required();
  auto* certify = app.add_subcommand("certify", "certificate only");
  certify->add_option("config", config_path, "config file")->required();
  auto* scan = app.add_subcommand("scan", "parameter sweep to CSV");
  scan->add_option("kind", scan_kind, "degeneracy | theta | volume")
      ->required()
      ->check(CLI::IsMember({"degeneracy", "theta", "volume"}));
  scan->add_option("config", config_path, "config file")->required();
  for (auto* sub : {run, certify, scan}) {
    sub->add_option("--out", out_dir, "output directory (default ./out)");
    sub->add_option("--seed", seed, "override every seed in the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    auto cfg = eqnorm::load_config(config_path);
    if (seed) cfg.override_seed(*seed);
    std::string dir = out_dir;
    if (dir.empty()) dir = cfg.output_dir.empty() ? "out" : cfg.output_dir;

    if (*scan) {
      const auto path = eqnorm::run_scan(scan_kind, cfg, dir);
      std::cout << "wrote " << path.string() << '\n';
      return kExitOk;
    }
    const auto report = eqnorm::run_experiment(cfg, dir, static_cast<bool>(*run));
    std::cout << "zeta: " << report.certificate.zeta << '\n'
              << "precondition: " << eqnorm::verdict_name(report.precondition) << '\n';
    if (report.good_set_fraction) {
      std::cout << "good_set_fraction: " << *report.good_set_fraction << '\n';
    }
    std::cout << "wrote " << dir << "/report.txt\n";
    return kExitOk;
  } catch (const eqnorm::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInput;
  } catch (const eqnorm::EmptyWindowError& e) {
    std::cerr << "empty window: " << e.what() << '\n';
    return kExitInput;
  } catch (const eqnorm::CapacityError& e) {
    std::cerr << "too large: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
