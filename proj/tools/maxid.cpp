// Command-line front end: batch simulation, extremal-coefficient tables,
// marginal KL diagnostics, and scaling benchmarks for max-id processes.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "maxid/config.hpp"
#include "maxid/diagnostics.hpp"
#include "maxid/engine.hpp"
#include "maxid/io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<long> replicates;
  std::optional<std::string> method;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  auto* cfg = cmd->add_option("--config", opts.config_path,
                              "Path to a JSON run configuration");
  auto* pre = cmd->add_option("--preset", opts.preset_name,
                              "Built-in preset name (see `maxid presets`)");
  cfg->excludes(pre);
  cmd->add_option("--seed", opts.seed, "Override run.seed");
  cmd->add_option("--replicates", opts.replicates, "Override run.replicates");
  cmd->add_option("--method", opts.method,
                  "Override run.method (exact-ars | exact-mh | naive:<n>)");
  cmd->add_option("--workers", opts.workers, "Override run.workers");
  cmd->add_option("--out", opts.out_dir, "Override output.dir");
}

maxid::RunConfig load_config(const CommonOpts& opts) {
  maxid::RunConfig cfg;
  if (!opts.preset_name.empty()) {
    cfg = maxid::preset(opts.preset_name);
  } else if (!opts.config_path.empty()) {
    cfg = maxid::config_from_json(maxid::read_json_file(opts.config_path));
  } else {
    throw maxid::ConfigError("give either --config <path> or --preset <name>");
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.replicates) cfg.replicates = *opts.replicates;
  if (opts.method) cfg.method = maxid::Method::parse(*opts.method);
  if (opts.workers) cfg.workers = *opts.workers;
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  return cfg;
}

maxid::MarginalLaw build_law(const maxid::ModelSpec& spec) {
  if (spec.mixture() == maxid::Mixture::scale) {
    return maxid::MarginalLaw(spec.scale_measure());
  }
  return maxid::MarginalLaw(spec.location_measure());
}

ordered_json base_metadata(const maxid::RunConfig& cfg,
                           const std::string& command) {
  ordered_json meta;
  meta["schema_version"] = maxid::kSchemaVersion;
  meta["library_version"] = maxid::kLibraryVersion;
  meta["command"] = command;
  meta["config"] = maxid::to_json(cfg);
  return meta;
}

std::vector<double> parse_levels(const std::string& csv) {
  std::vector<double> levels;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    levels.push_back(std::stod(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  for (double p : levels) {
    if (!(p > 0.0 && p < 1.0)) {
      throw maxid::ConfigError("levels must lie in (0,1)");
    }
  }
  if (levels.empty()) throw maxid::ConfigError("no levels given");
  return levels;
}

int run_simulate(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  const auto spec = cfg.build_model();
  const auto law = build_law(spec);
  maxid::Engine engine(spec, cfg.build_sites(), law);

  const int naive_n =
      cfg.method.kind == maxid::MethodKind::naive ? cfg.method.naive_n : 0;
  const auto batch = maxid::simulate_batch(engine, cfg.replicates, cfg.seed,
                                           cfg.workers, naive_n);

  fs::create_directories(cfg.out_dir);
  const fs::path data_path = fs::path(cfg.out_dir) / "samples.csv";
  maxid::write_matrix_csv(data_path, batch.samples);

  ordered_json meta = base_metadata(cfg, "simulate");
  meta["method"] = cfg.method.str();
  meta["seed"] = cfg.seed;
  meta["replicates"] = cfg.replicates;
  meta["sites"] = engine.sites().size();
  meta["profile_counts"] = batch.profile_counts;
  meta["level_counts"] = batch.level_counts;
  meta["ars_fallbacks"] = batch.ars_fallbacks;
  meta["timing"]["wall_seconds"] = batch.wall_seconds;
  maxid::write_json_file(maxid::sidecar_path(data_path), meta);

  double mean_profiles = 0.0;
  for (long c : batch.profile_counts) mean_profiles += double(c);
  mean_profiles /= double(cfg.replicates);
  std::printf("wrote %s (%ld x %d), mean profiles/replicate %.2f, %.2fs\n",
              data_path.string().c_str(), cfg.replicates,
              engine.sites().size(), mean_profiles, batch.wall_seconds);
  return 0;
}

int run_coeff(const CommonOpts& opts, const std::string& pairs_arg,
              const std::string& levels_arg, const std::string& samples_arg) {
  const auto cfg = load_config(opts);
  const auto spec = cfg.build_model();
  const auto law = build_law(spec);
  const auto sites = cfg.build_sites();
  const auto levels = parse_levels(levels_arg);

  std::vector<std::pair<int, int>> pairs;
  if (pairs_arg == "all") {
    for (int i = 0; i < sites.size(); ++i) {
      for (int j = i + 1; j < sites.size(); ++j) pairs.emplace_back(i, j);
    }
    if (sites.size() == 1) pairs.emplace_back(0, 0);
  } else {
    const auto comma = pairs_arg.find(',');
    if (comma == std::string::npos) {
      throw maxid::ConfigError("--pairs expects 'all' or 'i,j' (1-based)");
    }
    const int i = std::stoi(pairs_arg.substr(0, comma)) - 1;
    const int j = std::stoi(pairs_arg.substr(comma + 1)) - 1;
    if (i < 0 || j < 0 || i >= sites.size() || j >= sites.size()) {
      throw maxid::ConfigError("--pairs indices out of range");
    }
    pairs.emplace_back(i, j);
  }

  std::optional<Eigen::MatrixXd> samples;
  if (!samples_arg.empty()) {
    samples = maxid::read_matrix_csv(samples_arg);
    if (samples->cols() != sites.size()) {
      throw maxid::MissingSamples(
          "samples file column count does not match the configured sites");
    }
  }

  fs::create_directories(cfg.out_dir);
  const fs::path out_path = fs::path(cfg.out_dir) / "coeff.csv";
  std::ofstream out(out_path, std::ios::binary);
  out << "s1,s2,level,z0,theta_theoretical";
  if (samples) out << ",theta_empirical";
  out << '\n';
  for (double p : levels) {
    const double z0 = law.quantile(p);
    const double z0_emp =
        samples ? maxid::pooled_quantile(*samples, p) : 0.0;
    for (auto [i, j] : pairs) {
      const double th =
          maxid::theoretical_theta2(spec, law, sites[i], sites[j], z0);
      out << (i + 1) << ',' << (j + 1) << ',' << maxid::format_double(p)
          << ',' << maxid::format_double(z0) << ','
          << maxid::format_double(th);
      if (samples) {
        out << ','
            << maxid::format_double(
                   maxid::empirical_theta2_at(*samples, i, j, z0_emp));
      }
      out << '\n';
    }
  }
  out.close();

  ordered_json meta = base_metadata(cfg, "coeff");
  meta["levels"] = levels;
  meta["pairs"] = pairs.size();
  meta["samples"] = samples_arg;
  maxid::write_json_file(maxid::sidecar_path(out_path), meta);
  std::printf("wrote %s (%zu pairs x %zu levels)\n",
              out_path.string().c_str(), pairs.size(), levels.size());
  return 0;
}

int run_diagnose(const CommonOpts& opts,
                 const std::vector<std::string>& samples_paths,
                 bool paper_formula) {
  const auto cfg = load_config(opts);
  const auto spec = cfg.build_model();
  const auto law = build_law(spec);
  if (samples_paths.empty()) {
    throw maxid::MissingSamples("diagnose needs at least one --samples file");
  }

  fs::create_directories(cfg.out_dir);
  const fs::path out_path = fs::path(cfg.out_dir) / "kl.csv";
  std::ofstream out(out_path, std::ios::binary);
  out << "method,site,kl";
  if (paper_formula) out << ",kl_weighted";
  out << '\n';

  for (const auto& path : samples_paths) {
    const auto samples = maxid::read_matrix_csv(path);
    std::string label = fs::path(path).stem().string();
    const fs::path side = maxid::sidecar_path(fs::path(path));
    if (fs::exists(side)) {
      const auto meta = maxid::read_json_file(side);
      if (meta.contains("method")) label = meta["method"].get<std::string>();
    }
    std::vector<double> col(samples.rows());
    for (int s = 0; s < samples.cols(); ++s) {
      for (long r = 0; r < samples.rows(); ++r) col[r] = samples(r, s);
      const auto kl = maxid::kl_marginal(col, law);
      out << label << ',' << (s + 1) << ','
          << maxid::format_double(kl.divergence);
      if (paper_formula) {
        out << ',' << maxid::format_double(kl.weighted_sum);
      }
      out << '\n';
    }
  }
  out.close();

  ordered_json meta = base_metadata(cfg, "diagnose");
  meta["samples"] = samples_paths;
  meta["paper_formula"] = paper_formula;
  maxid::write_json_file(maxid::sidecar_path(out_path), meta);
  std::printf("wrote %s\n", out_path.string().c_str());
  return 0;
}

int run_bench(const CommonOpts& opts, const std::string& sizes_arg,
              long reps) {
  const auto cfg = load_config(opts);
  const auto spec = cfg.build_model();
  const auto law = build_law(spec);

  std::vector<int> sizes;
  {
    std::size_t pos = 0;
    while (pos < sizes_arg.size()) {
      std::size_t next = sizes_arg.find(',', pos);
      if (next == std::string::npos) next = sizes_arg.size();
      sizes.push_back(std::stoi(sizes_arg.substr(pos, next - pos)));
      pos = next + 1;
    }
  }
  if (sizes.empty()) throw maxid::ConfigError("--sizes is empty");

  fs::create_directories(cfg.out_dir);
  const fs::path out_path = fs::path(cfg.out_dir) / "bench.csv";
  std::ofstream out(out_path, std::ios::binary);
  out << "size,replicate,seconds,profiles\n";

  std::vector<double> log_size, log_time;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    maxid::RandomStream site_rng(cfg.seed, 0xFFFFFFFF00000100ull + si);
    maxid::SiteSet sites(maxid::random_unit_square(n, site_rng),
                         spec.ordering, cfg.seed);
    maxid::Engine engine(spec, sites, law);
    double mean_t = 0.0;
    for (long r = 0; r < reps; ++r) {
      maxid::RandomStream rng(cfg.seed, static_cast<std::uint64_t>(r));
      const auto rep = engine.simulate_replicate(rng);
      out << n << ',' << r << ',' << maxid::format_double(rep.wall_seconds)
          << ',' << rep.profiles_simulated << '\n';
      mean_t += rep.wall_seconds;
    }
    mean_t /= double(reps);
    log_size.push_back(std::log(double(n)));
    log_time.push_back(std::log(std::max(mean_t, 1e-9)));
    std::printf("|K|=%d: %.4fs/replicate\n", n, mean_t);
  }
  out.close();

  // log-log least squares slope of time vs size
  double slope = 0.0;
  if (sizes.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(log_size.size());
    for (std::size_t i = 0; i < log_size.size(); ++i) {
      sx += log_size[i];
      sy += log_time[i];
      sxx += log_size[i] * log_size[i];
      sxy += log_size[i] * log_time[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::printf("log-log time slope: %.2f\n", slope);
  }

  ordered_json meta = base_metadata(cfg, "bench");
  meta["sizes"] = sizes;
  meta["replicates_per_size"] = reps;
  meta["loglog_slope"] = slope;
  maxid::write_json_file(maxid::sidecar_path(out_path), meta);
  return 0;
}

int run_presets() {
  for (const auto& name : maxid::preset_names()) {
    std::cout << "# " << name << "\n"
              << maxid::to_json(maxid::preset(name)).dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation of max-infinitely divisible processes"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  auto* sim = app.add_subcommand("simulate",
                                 "Simulate replicates and write a sample "
                                 "matrix with a metadata sidecar");
  add_common(sim, sim_opts);

  CommonOpts coeff_opts;
  std::string pairs_arg = "all";
  std::string levels_arg = "0.05,0.25,0.5,0.75,0.95";
  std::string coeff_samples;
  auto* coeff = app.add_subcommand(
      "coeff", "Theoretical (and optionally empirical) level-dependent "
               "extremal coefficients");
  add_common(coeff, coeff_opts);
  coeff->add_option("--pairs", pairs_arg, "'all' or 'i,j' (1-based)");
  coeff->add_option("--levels", levels_arg, "comma-separated quantile levels");
  coeff->add_option("--samples", coeff_samples,
                    "simulation CSV for the empirical column");

  CommonOpts diag_opts;
  std::vector<std::string> diag_samples;
  bool paper_formula = false;
  auto* diag = app.add_subcommand(
      "diagnose", "Per-site KL divergence of sample files against the "
                  "numerical marginal law");
  add_common(diag, diag_opts);
  diag->add_option("--samples", diag_samples, "simulation CSV (repeatable)")
      ->expected(-1);
  diag->add_flag("--paper-formula", paper_formula,
                 "also emit the p-weighted ratio sum column");

  CommonOpts bench_opts;
  std::string sizes_arg = "25,100,225,400";
  long bench_reps = 3;
  auto* bench = app.add_subcommand(
      "bench", "Wall time and profile counts across site-set sizes");
  add_common(bench, bench_opts);
  bench->add_option("--sizes", sizes_arg, "comma-separated |K| values");
  bench->add_option("--bench-replicates", bench_reps,
                    "replicates per size");

  auto* presets = app.add_subcommand("presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_opts);
    if (coeff->parsed()) {
      return run_coeff(coeff_opts, pairs_arg, levels_arg, coeff_samples);
    }
    if (diag->parsed()) {
      return run_diagnose(diag_opts, diag_samples, paper_formula);
    }
    if (bench->parsed()) return run_bench(bench_opts, sizes_arg, bench_reps);
    if (presets->parsed()) return run_presets();
  } catch (const maxid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const maxid::MissingSamples& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const maxid::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
