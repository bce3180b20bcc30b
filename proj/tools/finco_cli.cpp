#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "finco/driver.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kNumericalFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FINCO wavepacket propagation along complex trajectories"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a configuration in one mode");
  std::string config_path, mode_name = "finco", preset_name, out_dir;
  std::vector<std::string> overrides;
  run->add_option("config", config_path, "Config file; absent keys keep the preset or built-in default");
  run->add_option("--mode", mode_name, "finco, reference, branchmap, rootsearch, compare, real_contour_compare")
      ->capture_default_str();
  run->add_option("--preset", preset_name, "Start from a named preset instead of the built-in defaults");
  run->add_option("--override,-o", overrides, "key=value applied after the config file, e.g. manifold.nx=50");
  run->add_option("--out", out_dir, "Output directory (same as output.dir)");
  bool quiet = false;
  run->add_flag("--quiet,-q", quiet, "No progress lines");

  auto* presets = app.add_subcommand("presets", "Built-in presets");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "Print preset names");
  auto* show = presets->add_subcommand("show", "Print a preset as a config file");
  std::string show_name;
  show->add_option("name", show_name)->required();

  app.add_subcommand("version", "Print the version");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("version")) {
      std::cout << "finco " << finco::kVersion << "\n";
      return 0;
    }
    if (app.got_subcommand("presets")) {
      if (presets->got_subcommand("list")) {
        for (const auto& [name, make] : finco::presets()) std::cout << name << "\n";
      } else {
        std::cout << finco::to_toml(finco::preset(show_name));
      }
      return 0;
    }

    const finco::RunConfig base = preset_name.empty() ? finco::RunConfig{} : finco::preset(preset_name);
    if (!out_dir.empty()) overrides.push_back("output.dir=" + out_dir);
    const auto cfg = config_path.empty() ? finco::parse_config("", base, overrides)
                                         : finco::load_config(config_path, base, overrides);
    const auto mode = finco::parse_mode(mode_name);

    const auto report = finco::run(cfg, mode, [&](const std::string& s) {
      if (!quiet) std::cerr << s << "\n";
    });
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& c : report.comparisons)
      std::cout << "t = " << finco::num(c.t) << "  rel_l2 " << c.rel_l2 << "  rel_linf " << c.rel_linf << "  norm "
                << c.norm << " (reference " << c.norm_ref << ")\n";
    for (const auto& c : report.restricted)
      std::cout << "t = " << finco::num(c.t) << "  real-accessible rel_l2 " << c.rel_l2 << "  norm " << c.norm << "\n";
    for (std::size_t k = 0; k < report.branch_counts.size(); ++k)
      std::cout << "checkpoint " << k << ": " << report.branch_counts[k] << " branches\n";
    for (const auto& f : report.files) std::cout << "wrote " << f.string() << "\n";
    return 0;
  } catch (const finco::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const finco::EmptyReconstruction& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
