#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "halfvol/run.hpp"

namespace {

using nlohmann::json;

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j = json::parse(in);
  // Accept either a bare config or a manifest carrying one.
  if (j.contains("config")) return j.at("config");
  return j;
}

int execute(json cfg) {
  try {
    halfvol::RunManifest m = halfvol::run_command(cfg);
    std::cout << m.data.at("result").dump(2) << "\n";
    std::cout << (m.checks_passed ? "ok" : "FAILED") << " ("
              << halfvol::format_double(
                     m.data.at("timing_seconds").get<double>())
              << " s)\n";
    return m.checks_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"half-volume phase-transition width laboratory on flat tori"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config (or manifest) to execute as-is");

  json cfg;

  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option_function<std::string>(
        "--out", [&cfg](const std::string& v) { cfg["out"] = v; },
        "output directory");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&cfg](std::uint64_t v) { cfg["seed"] = v; }, "RNG seed");
    cmd->add_option_function<int>(
        "--threads", [&cfg](int v) { cfg["threads"] = v; }, "worker threads");
    cmd->add_option_function<double>(
        "--q", [&cfg](double v) { cfg["q"] = v; }, "tail exponent");
    cmd->add_option_function<double>(
        "--beta", [&cfg](double v) { cfg["beta"] = v; }, "tail threshold");
  };

  auto* vp = app.add_subcommand("verify-potential",
                                "check the double-well conditions");
  add_common(vp);
  vp->add_option_function<int>(
      "--n-samples", [&cfg](int v) { cfg["n_samples"] = v; }, "sample count");
  vp->add_option_function<double>(
      "--x-max", [&cfg](double v) { cfg["x_max"] = v; }, "sample range");

  auto* solve = app.add_subcommand("solve", "descend to a critical point");
  add_common(solve);
  solve->add_option_function<int>(
      "--dim", [&cfg](int v) { cfg["dim"] = v; }, "torus dimension")
      ->required();
  solve->add_option_function<int>(
      "--res", [&cfg](int v) { cfg["res"] = v; }, "points per axis")
      ->required();
  solve->add_option_function<double>(
      "--eps", [&cfg](double v) { cfg["eps"] = v; }, "interface scale")
      ->required();
  solve->add_option_function<std::string>(
      "--init", [&cfg](const std::string& v) { cfg["init"] = v; },
      "zero | mode:k | file:path");
  solve->add_option_function<double>(
      "--tau", [&cfg](double v) { cfg["tau"] = v; }, "initial step");
  solve->add_option_function<double>(
      "--tol", [&cfg](double v) { cfg["tol"] = v; }, "residual tolerance");
  solve->add_option_function<long>(
      "--max-iters", [&cfg](long v) { cfg["max_iters"] = v; },
      "iteration cap");

  auto* width = app.add_subcommand("width", "one min-max width estimate");
  add_common(width);
  width->add_option_function<int>(
      "--p", [&cfg](int v) { cfg["p"] = v; }, "sphere dimension")
      ->required();
  width->add_option_function<double>(
      "--eps", [&cfg](double v) { cfg["eps"] = v; }, "interface scale")
      ->required();
  width->add_option_function<bool>(
      "--constrained", [&cfg](bool v) { cfg["constrained"] = v; },
      "restrict to mean-zero fields");
  width->add_option_function<int>(
      "--res", [&cfg](int v) { cfg["res"] = v; }, "points per axis");
  width->add_option_function<int>(
      "--dim", [&cfg](int v) { cfg["dim"] = v; }, "torus dimension");

  auto* weyl = app.add_subcommand("weyl", "width spectrum and power-law fit");
  add_common(weyl);
  weyl->add_option_function<int>(
      "--p-min", [&cfg](int v) { cfg["p_min"] = v; }, "lowest p")
      ->required();
  weyl->add_option_function<int>(
      "--p-max", [&cfg](int v) { cfg["p_max"] = v; }, "highest p")
      ->required();
  weyl->add_option_function<double>(
      "--eps", [&cfg](double v) { cfg["eps"] = v; }, "interface scale")
      ->required();
  weyl->add_option_function<int>(
      "--res", [&cfg](int v) { cfg["res"] = v; }, "points per axis");
  weyl->add_option_function<int>(
      "--dim", [&cfg](int v) { cfg["dim"] = v; }, "torus dimension");
  weyl->add_option_function<int>(
      "--pairs-per-p", [&cfg](int v) { cfg["pairs_per_p"] = v; },
      "sampler pairs per unit 2^p");

  auto* retract = app.add_subcommand("retract",
                                     "half-volume voxel retraction");
  add_common(retract);
  retract->add_option_function<int>(
      "--dim", [&cfg](int v) { cfg["dim"] = v; }, "torus dimension")
      ->required();
  retract->add_option_function<int>(
      "--res", [&cfg](int v) { cfg["res"] = v; }, "cells per axis")
      ->required();
  retract->add_option_function<std::string>(
      "--order", [&cfg](const std::string& v) { cfg["order"] = v; },
      "height | lex");
  retract->add_option_function<std::string>(
      "--sweepout", [&cfg](const std::string& v) { cfg["sweepout"] = v; },
      "height | lex | file:path");

  auto* diagnose = app.add_subcommand("diagnose",
                                      "multiplier/defect certificates");
  add_common(diagnose);
  diagnose->add_option_function<std::string>(
      "--field", [&cfg](const std::string& v) { cfg["field"] = v; },
      "HVF1 checkpoint")
      ->required();
  diagnose->add_option_function<std::string>(
      "--eta", [&cfg](const std::string& v) {
        try {
          cfg["eta"] = std::stod(v);
        } catch (...) {
          cfg["eta"] = v;
        }
      },
      "smoothing length or auto");

  CLI11_PARSE(app, argc, argv);

  if (!config_path.empty()) {
    try {
      return execute(load_config_file(config_path));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  for (auto* sub :
       {vp, solve, width, weyl, retract, diagnose}) {
    if (sub->parsed()) {
      cfg["command"] = sub->get_name();
      return execute(cfg);
    }
  }
  std::cout << app.help() << "\n";
  return 2;
}
