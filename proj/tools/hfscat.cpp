#include <iostream>

#include <CLI11.hpp>

#include "hfscat/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hartree-Fock scattering simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "integrate a configuration and write its artifacts");
  run->add_option("config", config_path, "TOML run configuration")->required();

  auto* compare = app.add_subcommand("compare", "run the same data under two modes and compare phase drift");
  compare->add_option("config", config_path, "TOML run configuration")->required();

  std::string level = "fast";
  std::string fault = "none";
  auto* verify = app.add_subcommand("verify", "run the built-in invariant suite");
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--inject-fault", fault)->check(CLI::IsMember({"none", "exchange-sign"}))->group("");

  std::string run_dir, quantity, window;
  auto* fit = app.add_subcommand("fit", "power-law fit of a stored time series");
  fit->add_option("run_dir", run_dir, "directory written by run")->required();
  fit->add_option("--quantity", quantity, "sup_norm, l2_mass, h10_x, h01_z, d_inf, s1_distance, ...")->required();
  fit->add_option("--window", window, "t_lo:t_hi")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hfscat::exit_config;
  }

  try {
    if (*run) return hfscat::cmd_run(config_path, std::cout, std::cerr);
    if (*compare) return hfscat::cmd_compare(config_path, std::cout, std::cerr);
    if (*verify) {
      const auto lv = level == "full" ? hfscat::VerifyLevel::Full : hfscat::VerifyLevel::Fast;
      const auto f = fault == "exchange-sign" ? hfscat::Fault::ExchangeSign : hfscat::Fault::None;
      return hfscat::cmd_verify(lv, f, std::cout, std::cerr);
    }
    return hfscat::cmd_fit(run_dir, quantity, window, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 4;
  }
}
