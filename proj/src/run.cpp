#include "halfvol/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "halfvol/diagnostics.hpp"
#include "halfvol/field_io.hpp"
#include "halfvol/flow.hpp"
#include "halfvol/rng.hpp"

namespace halfvol {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct KeySpec {
  const char* name;
  bool required;
};

const std::vector<KeySpec>& keys_for(const std::string& command) {
  static const std::vector<KeySpec> common = {
      {"command", true}, {"out", false},  {"seed", false},
      {"threads", false}, {"q", false},   {"beta", false},
      {"potential", false},
  };
  static const std::map<std::string, std::vector<KeySpec>> per_command = {
      {"verify-potential", {{"n_samples", false}, {"x_max", false}}},
      {"solve",
       {{"dim", true},
        {"res", true},
        {"eps", true},
        {"sides", false},
        {"init", false},
        {"tau", false},
        {"tol", false},
        {"max_iters", false}}},
      {"width",
       {{"p", true},
        {"eps", true},
        {"constrained", false},
        {"dim", false},
        {"res", false},
        {"sides", false},
        {"pairs_per_p", false},
        {"refine", false},
        {"profile", false}}},
      {"weyl",
       {{"p_min", true},
        {"p_max", true},
        {"eps", true},
        {"constrained", false},
        {"dim", false},
        {"res", false},
        {"sides", false},
        {"pairs_per_p", false},
        {"refine", false},
        {"profile", false}}},
      {"retract",
       {{"dim", true},
        {"res", true},
        {"sides", false},
        {"order", false},
        {"sweepout", false}}},
      {"diagnose", {{"field", true}, {"eta", false}}},
  };
  auto it = per_command.find(command);
  if (it == per_command.end()) {
    throw std::invalid_argument("unknown command: " + command);
  }
  static thread_local std::vector<KeySpec> merged;
  merged = common;
  merged.insert(merged.end(), it->second.begin(), it->second.end());
  return merged;
}

void set_default(json& cfg, const char* key, const json& value) {
  if (!cfg.contains(key)) cfg[key] = value;
}

int power_of_two_res_for(double eps, double min_side) {
  // Resolution rule: at least 8 grid points per interface width.
  int n = 16;
  while (n * eps / min_side < 8.0 && n < (1 << 14)) n *= 2;
  return n;
}

TorusGrid grid_from(const json& cfg) {
  const int dim = cfg.at("dim").get<int>();
  const int res = cfg.at("res").get<int>();
  std::vector<double> sides(dim, 1.0);
  if (cfg.contains("sides")) {
    sides = cfg.at("sides").get<std::vector<double>>();
    if (static_cast<int>(sides.size()) != dim) {
      throw std::invalid_argument("config: sides must have dim entries");
    }
  }
  return TorusGrid(std::vector<int>(dim, res), sides);
}

json grid_json(const TorusGrid& g) {
  json j;
  j["dim"] = g.dim();
  j["res"] = json::array();
  j["sides"] = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    j["res"].push_back(g.res(a));
    j["sides"].push_back(g.side(a));
  }
  j["total_volume"] = g.total_volume();
  return j;
}

json energy_json(const EnergyBreakdown& e, double eps, double lambda) {
  return json{{"eps", eps},
              {"dirichlet", e.dirichlet},
              {"potential", e.potential},
              {"total", e.total},
              {"normalized", e.normalized},
              {"lambda", lambda}};
}

ScalarField initial_field(const std::string& init, const TorusGrid& g) {
  if (init == "zero") return ScalarField(g);
  if (init.rfind("mode:", 0) == 0) {
    const int k = std::stoi(init.substr(5));
    return make_field(g, [&](std::array<double, 3> x) {
      return std::cos(2.0 * std::numbers::pi * k * x[0] / g.side(0));
    });
  }
  if (init.rfind("file:", 0) == 0) {
    HvfData data = read_hvf(init.substr(5));
    if (data.field.grid() != g) {
      throw std::invalid_argument("init file grid does not match config");
    }
    return data.field;
  }
  throw std::invalid_argument("config: init must be zero|mode:k|file:path");
}

json potential_report_json(const PotentialReport& rep) {
  json conditions = json::array();
  for (int i = 0; i < 7; ++i) {
    conditions.push_back({{"condition", i + 1},
                          {"pass", rep.conditions[i].pass},
                          {"worst_violation", rep.conditions[i].worst_violation}});
  }
  return json{{"conditions", conditions},
              {"n_samples", rep.n_samples},
              {"x_max", rep.x_max},
              {"pass", rep.pass}};
}

json width_json(const WidthEstimate& e) {
  json j;
  j["p"] = e.p;
  j["eps"] = e.eps;
  j["constrained"] = e.constrained;
  j["value"] = e.value;
  j["refined"] = e.refined;
  j["refined_value"] = e.refined_value;
  j["lambda"] = e.lambda;
  j["residual"] = e.residual;
  j["index_estimate"] = e.index_estimate;
  j["family"] = e.family_desc;
  j["argmax"] = e.argmax;
  j["seed"] = e.seed;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

json validate_config(const json& config) {
  if (!config.is_object() || !config.contains("command")) {
    throw std::invalid_argument("config: need an object with a command key");
  }
  const std::string command = config.at("command").get<std::string>();
  const auto& specs = keys_for(command);

  for (auto it = config.begin(); it != config.end(); ++it) {
    const bool known =
        std::any_of(specs.begin(), specs.end(),
                    [&](const KeySpec& k) { return it.key() == k.name; });
    if (!known) {
      throw std::invalid_argument("config: unknown key '" + it.key() +
                                  "' for command " + command);
    }
  }
  for (const auto& k : specs) {
    if (k.required && !config.contains(k.name)) {
      throw std::invalid_argument(std::string("config: missing key '") +
                                  k.name + "' for command " + command);
    }
  }

  json cfg = config;
  set_default(cfg, "out", "out");
  set_default(cfg, "seed", 0);
  set_default(cfg, "threads", 1);
  set_default(cfg, "potential", "glued_quartic");
  set_default(cfg, "q", 2.1);
  set_default(cfg, "beta", 5.0);

  if (cfg.at("potential").get<std::string>() != "glued_quartic") {
    throw std::invalid_argument("config: potential must be glued_quartic");
  }
  const double q = cfg.at("q").get<double>();
  if (!(q > 2.0 && q < 11.0 / 5.0)) {
    throw std::invalid_argument(
        "config: q out of range, the tail exponent must lie in (2, 11/5)");
  }
  const double beta = cfg.at("beta").get<double>();
  if (!(beta > 1.0)) {
    throw std::invalid_argument("config: beta must exceed 1");
  }

  if (command == "verify-potential") {
    set_default(cfg, "n_samples", 10001);
    set_default(cfg, "x_max", 2.0 * beta);
  } else if (command == "solve") {
    set_default(cfg, "init", "mode:1");
    set_default(cfg, "tau", 0.0);
    set_default(cfg, "tol", 0.0);
    set_default(cfg, "max_iters", 200000);
  } else if (command == "width" || command == "weyl") {
    set_default(cfg, "dim", 2);
    set_default(cfg, "constrained", true);
    set_default(cfg, "pairs_per_p", 100);
    set_default(cfg, "refine", true);
    set_default(cfg, "profile", "tanh");
    if (!cfg.contains("res")) {
      cfg["res"] = power_of_two_res_for(cfg.at("eps").get<double>(), 1.0);
    }
  } else if (command == "retract") {
    set_default(cfg, "order", "height");
    set_default(cfg, "sweepout", "height");
  } else if (command == "diagnose") {
    set_default(cfg, "eta", "auto");
  }
  return cfg;
}

std::string spectrum_csv(const std::vector<WidthEstimate>& rows) {
  std::string out =
      "p,eps,constrained,value,refined_value,lambda,index_estimate,seed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.p);
    out += ',';
    out += format_double(r.eps);
    out += ',';
    out += r.constrained ? "true" : "false";
    out += ',';
    out += format_double(r.value);
    out += ',';
    out += format_double(r.refined ? r.refined_value : r.value);
    out += ',';
    out += format_double(r.lambda);
    out += ',';
    out += std::to_string(r.index_estimate);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

std::string spectrum_svg(const SpectrumTable& table, const WeylFit& fit,
                         int p_min, int p_max) {
  const int w = 640, h = 480, margin = 60;
  double xmin = std::log10(static_cast<double>(p_min));
  double xmax = std::log10(static_cast<double>(p_max));
  double ymin = 1e300, ymax = -1e300;
  for (const auto& r : table.rows) {
    if (r.p < p_min || r.p > p_max || r.c_tilde_value <= 0.0) continue;
    ymin = std::min(ymin, std::log10(r.c_tilde_value));
    ymax = std::max(ymax, std::log10(r.c_tilde_value));
  }
  if (ymin > ymax) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (ymax - ymin < 1e-6) ymax = ymin + 1.0;
  if (xmax - xmin < 1e-6) xmax = xmin + 1.0;

  auto sx = [&](double lx) {
    return margin + (lx - xmin) / (xmax - xmin) * (w - 2 * margin);
  };
  auto sy = [&](double ly) {
    return h - margin - (ly - ymin) / (ymax - ymin) * (h - 2 * margin);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\""
     << w - margin << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
     << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - margin / 3
     << "\" text-anchor=\"middle\">log10 p</text>\n";
  os << "<text x=\"" << margin / 3 << "\" y=\"" << h / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << margin / 3 << " "
     << h / 2 << ")\">log10 width</text>\n";

  // Fitted line over the plotted range.
  const double l10 = std::log(10.0);
  auto fit_log10 = [&](double lx) {
    // log10 c = log10 prefactor + exponent * log10 p
    return std::log10(fit.prefactor) + fit.exponent * lx;
  };
  (void)l10;
  os << "<line x1=\"" << format_double(sx(xmin)) << "\" y1=\""
     << format_double(sy(fit_log10(xmin))) << "\" x2=\""
     << format_double(sx(xmax)) << "\" y2=\""
     << format_double(sy(fit_log10(xmax)))
     << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";

  for (const auto& r : table.rows) {
    if (r.p < p_min || r.p > p_max || r.c_tilde_value <= 0.0) continue;
    os << "<circle cx=\"" << format_double(sx(std::log10(r.p))) << "\" cy=\""
       << format_double(sy(std::log10(r.c_tilde_value)))
       << "\" r=\"4\" fill=\"firebrick\"/>\n";
  }
  os << "<text x=\"" << w / 2 << "\" y=\"" << margin / 2
     << "\" text-anchor=\"middle\">exponent "
     << format_double(fit.exponent) << ", prefactor "
     << format_double(fit.prefactor) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

RunManifest run_command(const json& config_in) {
  const auto t0 = std::chrono::steady_clock::now();
  json cfg = validate_config(config_in);
  const std::string command = cfg.at("command").get<std::string>();
  const fs::path out_dir = cfg.at("out").get<std::string>();
  fs::create_directories(out_dir);

  const double q = cfg.at("q").get<double>();
  const double beta = cfg.at("beta").get<double>();
  DoubleWellPotential pot = build_glued_quartic(q, beta);

  RunManifest manifest;
  manifest.checks_passed = true;
  json extra;

  auto emit = [&](const fs::path& rel, const std::string& content) {
    const fs::path full = out_dir / rel;
    atomic_write(full, content);
    manifest.outputs.push_back(full.string());
  };

  if (command == "verify-potential") {
    PotentialReport rep = verify_potential(pot, cfg.at("n_samples").get<int>(),
                                           cfg.at("x_max").get<double>());
    emit("report.json", potential_report_json(rep).dump(2) + "\n");
    manifest.checks_passed = rep.pass;
    extra["pass"] = rep.pass;
  } else if (command == "solve") {
    TorusGrid grid = grid_from(cfg);
    ScalarField u0 = initial_field(cfg.at("init").get<std::string>(), grid);
    FlowConfig fc;
    fc.tau = cfg.at("tau").get<double>();
    fc.tol = cfg.at("tol").get<double>();
    fc.max_iters = cfg.at("max_iters").get<long>();
    const double eps = cfg.at("eps").get<double>();
    CriticalPoint cp = solve_critical(u0, eps, pot, fc);
    json j;
    j["energy"] = energy_json(cp.energy, eps, cp.lambda);
    j["residual"] = cp.residual;
    j["iterations"] = cp.iterations;
    j["converged"] = cp.converged;
    j["tau_underflow"] = cp.tau_underflow;
    j["index_estimate"] = cp.index_estimate;
    j["max_mean_ratio"] = cp.max_mean_ratio;
    j["grid"] = grid_json(grid);
    emit("critical_point.json", j.dump(2) + "\n");
    write_hvf(out_dir / "field.hvf", cp.u, eps);
    manifest.outputs.push_back((out_dir / "field.hvf").string());
    manifest.checks_passed = cp.converged;
    extra["converged"] = cp.converged;
    extra["residual"] = cp.residual;
  } else if (command == "width" || command == "weyl") {
    TorusGrid grid = grid_from(cfg);
    SearchConfig sc;
    sc.seed = cfg.at("seed").get<std::uint64_t>();
    sc.threads = cfg.at("threads").get<int>();
    sc.pairs_per_p = cfg.at("pairs_per_p").get<int>();
    sc.profile = cfg.at("profile").get<std::string>() == "clamp"
                     ? ProfileKind::Clamp
                     : ProfileKind::Tanh;
    const double eps = cfg.at("eps").get<double>();
    const bool refine = cfg.at("refine").get<bool>();

    std::vector<WidthEstimate> rows;
    if (command == "width") {
      WidthEstimate est =
          optimize_family(cfg.at("p").get<int>(), eps, pot,
                          cfg.at("constrained").get<bool>(), grid, sc);
      if (refine && est.constrained) {
        est = refine_argmax(est, pot, FlowConfig{.max_iters = 500});
      }
      emit("width.json", width_json(est).dump(2) + "\n");
      rows.push_back(std::move(est));
    } else {
      const int p_min = cfg.at("p_min").get<int>();
      const int p_max = cfg.at("p_max").get<int>();
      if (p_min < 1 || p_max < p_min) {
        throw std::invalid_argument("config: need 1 <= p_min <= p_max");
      }
      SpectrumTable table;
      table.seed = sc.seed;
      for (int p = p_min; p <= p_max; ++p) {
        WidthEstimate est = optimize_family(p, eps, pot, true, grid, sc);
        if (refine) {
          est = refine_argmax(est, pot, FlowConfig{.max_iters = 500});
        }
        table.rows.push_back({p, eps, 0.0, est.value});
        rows.push_back(std::move(est));
      }
      WeylFit fit = weyl_fit(table, p_min, p_max);
      emit("spectrum.csv", spectrum_csv(rows));
      json fj;
      fj["exponent"] = fit.exponent;
      fj["prefactor"] = fit.prefactor;
      fj["residuals"] = fit.residuals;
      emit("weyl_fit.json", fj.dump(2) + "\n");
      emit("spectrum.svg", spectrum_svg(table, fit, p_min, p_max));
      extra["exponent"] = fit.exponent;
      extra["prefactor"] = fit.prefactor;
    }
  } else if (command == "retract") {
    TorusGrid grid = grid_from(cfg);
    const std::string order_name = cfg.at("order").get<std::string>();
    MorseOrder order(grid, order_name == "lex" ? MorseOrder::Kind::Lex
                                               : MorseOrder::Kind::Height);
    const std::string sweep = cfg.at("sweepout").get<std::string>();
    DiscreteSweepout sw;
    if (sweep == "height" || sweep == "lex") {
      MorseOrder sworder(grid, sweep == "lex" ? MorseOrder::Kind::Lex
                                              : MorseOrder::Kind::Height);
      sw = DiscreteSweepout::single_cell_growth(sworder);
    } else if (sweep.rfind("file:", 0) == 0) {
      auto data = read_voxel_family(sweep.substr(5));
      sw.slices = std::move(data.sets);
      for (const auto& s : sw.slices) {
        sw.max_area = std::max(sw.max_area, boundary_area(s));
      }
    } else {
      throw std::invalid_argument("config: sweepout must be height|lex|file:");
    }
    auto [family, rep] = retract_sweepout(sw, order);
    json j;
    j["input_max_area"] = rep.input_max_area;
    j["output_max_area"] = rep.output_max_area;
    j["k_bound"] = rep.k_bound;
    j["area_bound_ok"] = rep.area_bound_ok;
    j["half_volume_ok"] = rep.half_volume_ok;
    j["output_admissible"] = rep.output_admissible;
    j["order"] = order.name();
    emit("retract_report.json", j.dump(2) + "\n");
    write_voxel_family(out_dir / "family.rle", family.slices, order.name());
    manifest.outputs.push_back((out_dir / "family.rle").string());
    manifest.checks_passed = rep.area_bound_ok && rep.half_volume_ok;
  } else if (command == "diagnose") {
    HvfData data = read_hvf(cfg.at("field").get<std::string>());
    const double eps = data.eps;
    double eta = eps;
    if (cfg.at("eta").is_number()) {
      eta = cfg.at("eta").get<double>();
    } else if (cfg.at("eta").get<std::string>() != "auto") {
      throw std::invalid_argument("config: eta must be a number or auto");
    }
    MultiplierCertificate cert =
        multiplier_certificate(data.field, eps, pot, eta);
    DefectReport defect = defect_report(data.field, eps, pot);
    LinfCheck linf = linf_check(data.field, pot);
    json line;
    line["eps"] = eps;
    line["eta"] = eta;
    line["lambda"] = cert.lambda;
    line["pairing"] = cert.pairing;
    line["identity_residual"] = cert.identity_residual;
    line["pairing_lower_ok"] = cert.pairing_lower_ok;
    line["degenerate"] = cert.degenerate;
    line["defect"] = defect.defect;
    line["defect_ratio"] = defect.ratio;
    line["max_abs"] = linf.max_abs;
    line["linf_ok"] = linf.ok;
    {
      std::ofstream log(out_dir / "diagnostics.jsonl", std::ios::app);
      log << line.dump() << "\n";
    }
    manifest.outputs.push_back((out_dir / "diagnostics.jsonl").string());
    const bool identity_ok =
        cert.identity_residual <=
        1e-8 * (1.0 + std::abs(cert.lambda * cert.pairing));
    manifest.checks_passed = linf.ok && !cert.degenerate && identity_ok;
    extra = line;
  }

  const auto t1 = std::chrono::steady_clock::now();
  json m;
  m["artifact_version"] = kArtifactVersion;
  m["command"] = command;
  m["config"] = cfg;
  m["seed"] = cfg.at("seed");
  m["rng"] = CounterRng::kName;
  m["potential"] = {{"type", "glued_quartic"}, {"q", q}, {"beta", beta},
                    {"sigma", pot.sigma}};
  m["timing_seconds"] =
      std::chrono::duration<double>(t1 - t0).count();
  m["outputs"] = manifest.outputs;
  m["checks_passed"] = manifest.checks_passed;
  m["result"] = extra;
  manifest.data = m;
  atomic_write(out_dir / "manifest.json", m.dump(2) + "\n");
  return manifest;
}

}  // namespace halfvol
