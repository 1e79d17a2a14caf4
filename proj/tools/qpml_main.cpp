#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "qpml/cli.hpp"
#include "qpml/output.hpp"

int main(int argc, char** argv) {
  using namespace qpml::cli;
  CLI::App app{"Quasi-periodic multilayer Helmholtz scattering solver"};
  app.set_version_flag("--version", std::string(qpml::version()));
  app.require_subcommand(1);

  std::string config, preset_name;
  Overrides ov;
  for (const char* name : {"solve", "converge", "spectra", "field"}) {
    auto* sub = app.add_subcommand(name, std::string("Run a ") + name + " job");
    sub->add_option("--config", config, "Job config (JSON)");
    sub->add_option("--out", ov.out, "Output directory");
    sub->add_option("--threads", ov.threads, "Thread budget")->check(CLI::PositiveNumber);
    sub->add_option("--preset", preset_name, "Built-in preset used as the base config");
    sub->add_option("--order", ov.order, "Quadrature correction order")->check(CLI::IsMember({5, 7}));
  }
  auto* presets_cmd = app.add_subcommand("presets", "List presets, or print one as a config file");
  std::string show, write_to;
  presets_cmd->add_option("name", show, "Preset to materialize");
  presets_cmd->add_option("--write", write_to, "Write the preset to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (presets_cmd->parsed()) {
    if (show.empty()) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
      return 0;
    }
    try {
      const std::string text = preset(show).dump(2) + "\n";
      if (write_to.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(write_to);
        out << text;
        if (!out) {
          std::cerr << "cannot write '" << write_to << "'\n";
          return 4;
        }
      }
    } catch (const qpml::ConfigError& e) {
      std::cerr << e.what() << '\n';
      return 2;
    }
    return 0;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  return run(job_kind(kind), config, preset_name, ov);
}
