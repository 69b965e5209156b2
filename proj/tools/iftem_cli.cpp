// Command-line front end for the IF-TEM sampling toolkit.
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical or precondition
// failure.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "iftem/iftem.hpp"

namespace {

using iftem::json;

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

void reject_unknown_keys(const json& cfg, const std::set<std::string>& known) {
  for (const auto& [key, _] : cfg.items()) {
    if (!known.count(key))
      throw iftem::config_error("unknown config key: " + key);
  }
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  uint64_t seed = 0;
  bool seed_set = false;
};

uint64_t effective_seed(const CommonOpts& opts, const json& cfg) {
  if (opts.seed_set) return opts.seed;
  if (cfg.contains("seed")) return cfg.at("seed").get<uint64_t>();
  return 0;
}

int cmd_simulate(const CommonOpts& opts) {
  const json cfg = iftem::read_json_file(opts.config_path);
  reject_unknown_keys(cfg, {"signal", "kernel", "tem", "t_start", "t_obs",
                            "seed"});
  const auto x = iftem::signal_from_json(cfg.at("signal"));
  const auto spec = iftem::kernel_from_json(cfg.at("kernel"));

  iftem::TemParams tem;
  tem.b = cfg.at("tem").at("b").get<double>();
  tem.kappa = cfg.at("tem").at("kappa").get<double>();
  tem.delta = cfg.at("tem").at("delta").get<double>();
  tem.c = cfg.at("tem").value("c", 0.0);
  if (tem.c == 0.0) tem.c = iftem::bound_c(x, spec, iftem::BoundMode::grid);

  const auto rate = iftem::validate_rate(tem, spec.K, spec.period);
  if (!rate.ok) {
    std::cerr << "firing-rate condition violated: need (b-c)/(kappa delta) >= "
                 "(2K+2)/T, have "
              << rate.min_rate << " < " << rate.required << "\n";
    return kExitNumeric;
  }

  const double t_start = cfg.value("t_start", 0.0);
  const double t_obs = cfg.value("t_obs", x.period);
  const auto rec = iftem::encode(iftem::filter(x, spec), tem, t_start, t_obs);

  std::filesystem::create_directories(opts.out_dir);
  iftem::write_text_file(opts.out_dir + "/firings.csv",
                         iftem::firing_record_to_csv(rec));
  json meta = iftem::firing_record_to_json(rec, tem);
  meta["signal"] = iftem::signal_to_json(x);
  meta["kernel"] = iftem::kernel_to_json(spec);
  meta["rate_check"] = json{{"ok", rate.ok},
                            {"min_rate", rate.min_rate},
                            {"max_rate", rate.max_rate},
                            {"required", rate.required}};
  iftem::write_text_file(opts.out_dir + "/firings.json", meta.dump(2) + "\n");
  std::cout << "wrote " << rec.instants.size() << " firings ("
            << "min_rate=" << rate.min_rate << ", required=" << rate.required
            << ")\n";
  return 0;
}

struct RecoverOpts {
  std::string firings_path;
  std::string method = "with-dc";
  bool on_grid = false;
  double grid_resolution = 0.01;
  int L = 0;
};

int cmd_recover(const CommonOpts& opts, const RecoverOpts& ropts) {
  const json meta = iftem::read_json_file(ropts.firings_path);
  auto [rec, tem] = iftem::firing_record_from_json(meta);
  const auto x = iftem::signal_from_json(meta.at("signal"));
  const auto spec = iftem::kernel_from_json(meta.at("kernel"));
  const int L = ropts.L > 0 ? ropts.L : x.num_pulses();

  iftem::RecoveredParams hat;
  if (ropts.method == "with-dc") {
    hat = iftem::reconstruct_with_dc(rec.instants, tem, spec.K, x.pulse, L,
                                     spec.period);
  } else if (ropts.method == "no-dc") {
    hat = iftem::reconstruct_no_dc(rec.instants, tem, spec.K, x.pulse, L,
                                   spec.period, ropts.on_grid,
                                   ropts.grid_resolution);
  } else {
    throw iftem::config_error("method must be with-dc or no-dc");
  }

  std::filesystem::create_directories(opts.out_dir);
  iftem::write_text_file(opts.out_dir + "/recovered.json",
                         iftem::recovered_to_json(hat).dump(2) + "\n");
  std::cout << "recovered L=" << L
            << " (condition number " << hat.condition_number << ")\n";
  return 0;
}

struct StudyOpts {
  std::string which;
  int trials = 0;
  bool noiseless = false;
};

int cmd_study(const CommonOpts& opts, const StudyOpts& sopts) {
  const uint64_t seed = opts.seed_set ? opts.seed : 0;
  std::filesystem::create_directories(opts.out_dir);
  iftem::StudyReport rep;
  if (sopts.which == "table1") {
    rep = iftem::run_table1(seed, sopts.trials > 0 ? sopts.trials : 10);
  } else if (sopts.which == "cond") {
    rep = iftem::run_condition_study(1, 10, sopts.trials > 0 ? sopts.trials
                                                             : 1000, seed);
  } else if (sopts.which == "mse") {
    iftem::MseStudyConfig cfg;
    cfg.master_seed = seed;
    cfg.noiseless = sopts.noiseless;
    if (sopts.trials > 0) cfg.trials = sopts.trials;
    rep = iftem::run_mse_study(cfg);
  } else {
    throw iftem::config_error("study must be table1, cond, or mse");
  }
  rep.write(opts.out_dir);
  std::cout << rep.basename() << ": " << (rep.passed ? "pass" : "FAIL")
            << "\n";
  return rep.passed ? 0 : kExitNumeric;
}

int cmd_kernel_dump(const CommonOpts& opts, int points) {
  const json cfg = iftem::read_json_file(opts.config_path);
  reject_unknown_keys(cfg, {"kernel", "seed"});
  const auto spec = iftem::kernel_from_json(cfg.at("kernel"));
  std::filesystem::create_directories(opts.out_dir);
  iftem::write_text_file(opts.out_dir + "/kernel.csv",
                         iftem::kernel_samples_csv(spec, points));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IF-TEM sampling and FRI recovery toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  StudyOpts study;
  RecoverOpts recover;
  int kernel_points = 1024;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--seed", common.seed, "master RNG seed")
        ->each([&](const std::string&) { common.seed_set = true; });
  };

  auto* sim = app.add_subcommand("simulate",
                                 "encode a configured signal into firings");
  sim->add_option("--config", common.config_path, "JSON config")->required();
  add_common(sim);

  auto* rec = app.add_subcommand("recover",
                                 "recover FRI parameters from a firings file");
  rec->add_option("--firings", recover.firings_path,
                  "firings.json from simulate")
      ->required();
  rec->add_option("--method", recover.method, "with-dc | no-dc");
  rec->add_flag("--on-grid", recover.on_grid, "delays lie on a uniform grid");
  rec->add_option("--grid-resolution", recover.grid_resolution,
                  "delay grid step");
  rec->add_option("--L", recover.L, "model order override");
  add_common(rec);

  auto* stu = app.add_subcommand("study", "run an experiment study");
  stu->add_option("which", study.which, "table1 | cond | mse")->required();
  stu->add_option("--trials", study.trials, "trials per configuration");
  stu->add_flag("--noiseless", study.noiseless, "disable timing jitter");
  add_common(stu);

  auto* dump = app.add_subcommand("kernel-dump",
                                  "export kernel time-domain samples to CSV");
  dump->add_option("--config", common.config_path, "JSON config")->required();
  dump->add_option("--points", kernel_points, "sample count");
  add_common(dump);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(common);
    if (rec->parsed()) return cmd_recover(common, recover);
    if (stu->parsed()) return cmd_study(common, study);
    if (dump->parsed()) return cmd_kernel_dump(common, kernel_points);
  } catch (const iftem::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const iftem::precondition_error& e) {
    std::cerr << "precondition failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const iftem::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
