#pragma once

// Command-line front end: simulate, discretize, fit, summarize.
//
// Exit codes: 0 success, 1 usage/configuration, 2 data, 3 internal invariant.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvpr/errors.hpp"
#include "mvpr/gibbs.hpp"
#include "mvpr/io.hpp"
#include "mvpr/model.hpp"
#include "mvpr/simulation.hpp"
#include "mvpr/summaries.hpp"

namespace mvpr {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInvariant = 3 };

namespace cli {

inline SimulationConfig simulation_config_from_json(const nlohmann::json& j) {
  SimulationConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") cfg.n = value.get<int>();
      else if (key == "p") cfg.p = value.get<int>();
      else if (key == "q") cfg.q = value.get<int>();
      else if (key == "categories") cfg.categories = value.get<int>();
      else if (key == "clusters_per_view") cfg.clusters_per_view = value.get<std::vector<int>>();
      else if (key == "theta") cfg.theta = value.get<std::vector<double>>();
      else if (key == "baseline_rate") cfg.baseline_rate = value.get<double>();
      else if (key == "w") cfg.w = value.get<double>();
      else if (key == "dirichlet_param") cfg.dirichlet_param = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else throw ConfigError("unknown simulation field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simulation configuration type error: ") + e.what());
  }
  return cfg;
}

inline nlohmann::json to_json(const SimulationConfig& cfg) {
  return {{"n", cfg.n},
          {"p", cfg.p},
          {"q", cfg.q},
          {"categories", cfg.categories},
          {"clusters_per_view", cfg.clusters_per_view},
          {"theta", cfg.theta},
          {"baseline_rate", cfg.baseline_rate},
          {"w", cfg.w},
          {"dirichlet_param", cfg.dirichlet_param},
          {"seed", cfg.seed}};
}

inline std::string chain_trace_path(const std::string& dir, int chain, int chains) {
  const std::string name = chains == 1 ? "trace.txt" : "trace_chain" + std::to_string(chain) + ".txt";
  return (std::filesystem::path(dir) / name).string();
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Runs `chains` independent chains (seed, seed+1, ...) on separate threads.
inline std::vector<PosteriorTrace> fit_chains(const RunConfig& cfg, const CategoricalDataset& data, int chains) {
  const std::string digest = config_digest(cfg);
  const std::string json = provenance_json(cfg).dump();
  std::vector<PosteriorTrace> traces(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  auto run_one = [&](int c) {
    try {
      RunConfig chain_cfg = cfg;
      chain_cfg.seed = cfg.seed + static_cast<std::uint64_t>(c);
      const Hyperparameters hp = build_hyperparameters(chain_cfg, data);
      PosteriorTrace trace = run_chain(data, hp, cfg.sweeps);
      trace.config_digest = digest;
      trace.config_json = json;
      traces[static_cast<std::size_t>(c)] = std::move(trace);
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };
  if (chains == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> pool;
    for (int c = 0; c < chains; ++c) pool.emplace_back(run_one, c);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

struct SimulateOptions {
  std::string config_path;
  std::string out_dir = "sim";
  std::optional<int> n, p, q, categories;
  std::optional<double> w;
  std::optional<std::uint64_t> seed;
};

inline void run_simulate(const SimulateOptions& opt, std::ostream& log) {
  SimulationConfig cfg;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot open simulation configuration '" + opt.config_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(opt.config_path + ": " + e.what());
    }
    cfg = simulation_config_from_json(j);
  }
  if (opt.n) cfg.n = *opt.n;
  if (opt.p) cfg.p = *opt.p;
  if (opt.q) cfg.q = *opt.q;
  if (opt.categories) cfg.categories = *opt.categories;
  if (opt.w) cfg.w = *opt.w;
  if (opt.seed) cfg.seed = *opt.seed;

  const auto [data, truth] = simulate_dataset(cfg);
  const std::filesystem::path dir(opt.out_dir);
  write_dataset((dir / "data.csv").string(), data);
  write_truth((dir / "truth.csv").string(), truth);
  write_truth_views((dir / "truth_views.csv").string(), truth, data.variable_names);
  write_truth_profiles((dir / "truth_profiles.csv").string(), truth);
  std::ofstream meta = detail::open_output((dir / "simulation.json").string());
  meta << to_json(cfg).dump(2) << '\n';
  log << "wrote " << data.n << " x " << data.P << " dataset to " << (dir / "data.csv").string() << '\n';
}

struct FitOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> data_path;
  std::optional<std::string> response;
  int chains = 1;
};

inline void run_fit(const FitOptions& opt, std::ostream& log) {
  RunConfig cfg = load_run_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.data_path) cfg.data_path = *opt.data_path;
  if (opt.response) cfg.response_column = *opt.response;
  if (opt.chains < 1) throw ConfigError("--chains must be at least 1");
  if (cfg.data_path.empty()) throw ConfigError("configuration does not name a data file");
  if (!cfg.data_path.empty() && std::filesystem::path(cfg.data_path).is_relative() && !opt.data_path) {
    const auto base = std::filesystem::path(opt.config_path).parent_path();
    if (!std::filesystem::exists(cfg.data_path) && std::filesystem::exists(base / cfg.data_path)) {
      cfg.data_path = (base / cfg.data_path).string();
    }
  }
  cfg.sweeps.validate();
  const CategoricalDataset data = load_dataset(cfg.data_path, cfg.response_column);
  const auto traces = fit_chains(cfg, data, opt.chains);
  for (int c = 0; c < opt.chains; ++c) {
    const std::string path = chain_trace_path(cfg.output_dir, c + 1, opt.chains);
    write_trace(traces[static_cast<std::size_t>(c)], path);
    log << "wrote " << traces[static_cast<std::size_t>(c)].records.size() << " retained sweeps to " << path << '\n';
  }
}

struct SummarizeOptions {
  std::string trace_path;
  std::optional<std::string> data_path;
  std::optional<std::string> response;
  std::optional<std::string> truth_path;
  double threshold = 0.90;
  std::string out_dir = "summary";
};

inline void run_summarize(const SummarizeOptions& opt, std::ostream& log) {
  const PosteriorTrace trace = read_trace(opt.trace_path);
  std::vector<std::string> names;
  for (int j = 0; j < trace.P; ++j) names.push_back("x" + std::to_string(j + 1));
  if (opt.data_path) {
    const CategoricalDataset data = load_dataset(*opt.data_path, opt.response);
    if (data.n != trace.n || data.P != trace.P) {
      throw DataError("trace dimensions (n=" + std::to_string(trace.n) + ", P=" + std::to_string(trace.P) +
                      ") do not match dataset (n=" + std::to_string(data.n) + ", P=" + std::to_string(data.P) + ")");
    }
    names = data.variable_names;
  }
  if (!(opt.threshold >= 0.0 && opt.threshold <= 1.0)) throw ConfigError("--threshold must lie in [0, 1]");
  const std::filesystem::path dir(opt.out_dir);

  nlohmann::json report;
  report["trace"] = opt.trace_path;
  report["seed"] = trace.seed;
  report["n"] = trace.n;
  report["P"] = trace.P;
  report["L"] = trace.L;
  report["retained_sweeps"] = trace.records.size();
  report["sweeps"] = {{"iterations", trace.config.iterations},
                      {"burn_in", trace.config.burn_in},
                      {"thin", trace.config.thin},
                      {"update_view_prior", trace.config.update_view_prior},
                      {"audit_interval", trace.config.audit_interval}};
  report["config_digest"] = trace.config_digest;
  report["config"] = trace.config_json.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(trace.config_json);
  report["threshold"] = opt.threshold;

  for (int view = 1; view < trace.L; ++view) {
    write_matrix((dir / ("psm_view" + std::to_string(view) + ".csv")).string(),
                 posterior_similarity_matrix(trace, view));
  }

  const DenseMatrix probs = view_selection_probabilities(trace);
  const std::vector<double> relevant = relevant_view_selection(trace);
  {
    std::ofstream out = detail::open_output((dir / "selection_probabilities.csv").string());
    out << "variable";
    for (int l = 0; l < trace.L; ++l) out << ",view" << l;
    out << ",relevant\n";
    for (int j = 0; j < trace.P; ++j) {
      out << names[static_cast<std::size_t>(j)];
      for (int l = 0; l < trace.L; ++l) out << ',' << detail::format_real(probs(j, l));
      out << ',' << detail::format_real(relevant[static_cast<std::size_t>(j)]) << '\n';
    }
  }
  nlohmann::json selected = nlohmann::json::object();
  for (int l = 0; l < trace.L; ++l) {
    nlohmann::json list = nlohmann::json::array();
    for (int j : threshold_selected_variables(probs, l, opt.threshold)) list.push_back(names[static_cast<std::size_t>(j)]);
    selected["view" + std::to_string(l)] = list;
  }
  report["selected_variables"] = selected;
  {
    nlohmann::json list = nlohmann::json::array();
    for (int j = 0; j < trace.P; ++j) {
      if (relevant[static_cast<std::size_t>(j)] >= opt.threshold) list.push_back(names[static_cast<std::size_t>(j)]);
    }
    report["selected_relevant"] = list;
  }

  std::map<int, std::size_t> nu_counts;
  std::vector<double> alpha_mean(static_cast<std::size_t>(trace.L - 1), 0.0);
  for (const auto& rec : trace.records) {
    ++nu_counts[rec.nu];
    for (std::size_t v = 0; v < alpha_mean.size(); ++v) alpha_mean[v] += rec.alpha[v];
  }
  nlohmann::json nu_freq = nlohmann::json::object();
  for (const auto& [view, count] : nu_counts) {
    nu_freq["view" + std::to_string(view)] = static_cast<double>(count) / static_cast<double>(trace.records.size());
  }
  for (double& a : alpha_mean) a /= static_cast<double>(trace.records.size());
  report["relevant_view_frequency"] = nu_freq;
  report["alpha_mean"] = alpha_mean;

  if (opt.truth_path) {
    const TruthTable truth = read_truth(*opt.truth_path);
    for (const auto& p : truth.partitions) {
      if (static_cast<int>(p.size()) != trace.n) {
        throw DataError("truth file has " + std::to_string(p.size()) + " individuals, trace has " +
                        std::to_string(trace.n));
      }
    }
    std::vector<std::string> columns;
    std::vector<std::vector<double>> series;
    nlohmann::json medians = nlohmann::json::object();
    for (std::size_t t = 0; t < truth.partitions.size(); ++t) {
      const std::string name = "relevant_vs_" + truth.names[t];
      columns.push_back(name);
      series.push_back(relevant_ari_distribution(trace, truth.partitions[t]));
      medians[name] = median(series.back());
    }
    for (int view = 1; view < trace.L; ++view) {
      for (std::size_t t = 0; t < truth.partitions.size(); ++t) {
        const std::string name = "view" + std::to_string(view) + "_vs_" + truth.names[t];
        columns.push_back(name);
        series.push_back(ari_distribution(trace, truth.partitions[t], view));
        medians[name] = median(series.back());
      }
    }
    std::ofstream out = detail::open_output((dir / "ari.csv").string());
    out << "iteration";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < trace.records.size(); ++r) {
      out << trace.records[r].iteration;
      for (const auto& s : series) out << ',' << detail::format_real(s[r]);
      out << '\n';
    }
    report["ari_median"] = medians;
  }

  std::ofstream rep = detail::open_output((dir / "report.json").string());
  rep << report.dump(2) << '\n';
  log << "wrote summaries for " << trace.records.size() << " sweeps to " << dir.string() << '\n';
}

}  // namespace cli

/// Entry point shared by the `mvpr` executable and the tests.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Outcome-guided multi-view mixture modelling for categorical data"};
  app.require_subcommand(1);

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a two-view synthetic dataset with ground truth");
  simulate->add_option("--config", sim.config_path, "Simulation configuration (JSON)");
  simulate->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--n", sim.n, "Number of individuals");
  simulate->add_option("--p", sim.p, "Number of variables");
  simulate->add_option("--q", sim.q, "Number of relevant-view variables");
  simulate->add_option("--categories", sim.categories, "Categories per variable");
  simulate->add_option("--w", sim.w, "Cluster separability in [0, 1]");

  std::string disc_in, disc_out;
  std::vector<std::string> disc_keep;
  auto* discretize = app.add_subcommand("discretize", "Tertile-discretise each row of a real-valued table");
  discretize->add_option("--in", disc_in, "Input table (CSV with header)")->required();
  discretize->add_option("--out", disc_out, "Output table of codes 1..3")->required();
  discretize->add_option("--keep", disc_keep, "Columns copied unchanged (e.g. labels)");

  cli::FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Run the Gibbs sampler and write trace files");
  fit_cmd->add_option("--config", fit.config_path, "Run configuration (JSON)")->required();
  fit_cmd->add_option("--seed", fit.seed, "Override the configured seed");
  fit_cmd->add_option("--out", fit.out_dir, "Override the output directory");
  fit_cmd->add_option("--data", fit.data_path, "Override the data file");
  fit_cmd->add_option("--response", fit.response, "Override the response column");
  fit_cmd->add_option("--chains", fit.chains, "Independent chains run in parallel (seeds seed, seed+1, ...)")
      ->capture_default_str();

  cli::SummarizeOptions sum;
  auto* summarize = app.add_subcommand("summarize", "Similarity matrices, selection probabilities and ARI");
  summarize->add_option("--trace", sum.trace_path, "Trace file written by fit")->required();
  summarize->add_option("--data", sum.data_path, "Dataset, for variable names and a dimension check");
  summarize->add_option("--response", sum.response, "Response column of --data");
  summarize->add_option("--truth", sum.truth_path, "Ground-truth partitions (individual,view1,...)");
  summarize->add_option("--threshold", sum.threshold, "Selection threshold")->capture_default_str();
  summarize->add_option("--out", sum.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) cli::run_simulate(sim, out);
    else if (*discretize) {
      discretize_file(disc_in, disc_out, disc_keep);
      out << "wrote " << disc_out << '\n';
    } else if (*fit_cmd) cli::run_fit(fit, out);
    else if (*summarize) cli::run_summarize(sum, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvariantError& e) {
    err << "internal invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace mvpr
