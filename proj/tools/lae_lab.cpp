// lae-lab: run the averaged-flow solver, Monte Carlo ensembles and the
// identity checks from one INI configuration.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lael/config.hpp"
#include "lael/experiments.hpp"

namespace {

const char* usage_text =
    "usage: lae-lab <subcommand> [--config FILE] [--section.key=value ...]\n"
    "subcommands: run-lae run-mc verify-magnus verify-lemma2 verify-wick "
    "verify-commutation\n";

bool known(const std::string& s) {
  for (const char* k : {"run-lae", "run-mc", "verify-magnus", "verify-lemma2",
                        "verify-wick", "verify-commutation"})
    if (s == k) return true;
  return false;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian-averaged flow laboratory", "lae-lab"};
  app.allow_extras();
  std::string subcommand, config_path;
  app.add_option("subcommand", subcommand, "what to run")->required();
  app.add_option("--config,-c", config_path, "INI configuration file");
  app.set_version_flag("--version", LAEL_VERSION);
  app.footer(usage_text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!known(subcommand)) {
    std::cerr << "unknown subcommand '" << subcommand << "'\n" << usage_text;
    return 2;
  }

  lael::cli::Config cfg;
  try {
    if (!config_path.empty()) cfg = lael::cli::parse_config(config_path);
    for (const auto& extra : app.remaining()) lael::cli::apply_override(cfg, extra);
    cfg.validate();
  } catch (const lael::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  return lael::lab::dispatch(subcommand, cfg);
}
