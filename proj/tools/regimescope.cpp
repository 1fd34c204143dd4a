#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "regimescope/io.hpp"

int main(int argc, char** argv) {
  regimescope::io::RunManifest m;
  std::string metric = "euclidean";

  CLI::App app{
      "regimescope: swarm-model simulation, persistent-homology landscape summaries, and "
      "permutation-tested regime-transition detection"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", m.output_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", m.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--threads", m.threads,
                    "Worker threads; 0 = all cores. REGIMESCOPE_THREADS overrides.")
        ->capture_default_str();
    cmd->add_option("--log-level", m.log_level, "quiet | info")->capture_default_str();
  };
  auto add_filtration = [&](CLI::App* cmd) {
    cmd->add_option("--eps-max", m.eps_max, "Filtration scale cutoff")->capture_default_str();
    cmd->add_option("--metric", metric, "euclidean | toroidal")->capture_default_str();
  };
  auto add_landscape = [&](CLI::App* cmd) {
    cmd->add_option("--grid", m.grid_samples, "Evaluation grid size")->capture_default_str();
    cmd->add_option("--dim", m.dim, "Homology dimension (0 or 1)")->capture_default_str();
    cmd->add_option("--m-prime", m.m_prime, "Envelopes averaged into the contour")
        ->capture_default_str();
    cmd->add_option("--noise-floor", m.noise_floor, "Drop features with persistence below this")
        ->capture_default_str();
  };

  auto* simulate = app.add_subcommand("simulate", "Run the particle model, write snapshot CSV");
  simulate->add_option("--config", m.config_path, "Key=value simulation config file")->required();
  add_common(simulate);

  auto* ph = app.add_subcommand("ph", "Persistence diagrams of snapshot or frames CSV");
  ph->add_option("--in", m.input_a, "Snapshot or frames CSV")->required()->expected(1);
  add_filtration(ph);
  add_common(ph);

  auto* landscape = app.add_subcommand("landscape", "Landscape contours of a diagram CSV");
  landscape->add_option("--in", m.input_a, "Diagram CSV")->required()->expected(1);
  landscape->add_option("--eps-max", m.eps_max, "Grid upper end")->capture_default_str();
  add_landscape(landscape);
  add_common(landscape);

  auto* test = app.add_subcommand("test", "Two-group pointwise rank test with min-P adjustment");
  test->add_option("--a", m.input_a, "Contour CSVs of group A")->required();
  test->add_option("--b", m.input_b, "Contour CSVs of group B")->required();
  test->add_option("--perms", m.num_perms, "Permutation count")->capture_default_str();
  test->add_option("--time", m.time_index, "Time index to test (default: the only one present)");
  add_common(test);

  auto* detect = app.add_subcommand("detect", "Per-time comparison and transition inference");
  detect->add_option("--a", m.input_a, "Snapshot CSVs of series A (one per run)");
  detect->add_option("--b", m.input_b, "Snapshot CSVs of series B (one per run)");
  detect->add_option("--frames", m.frames, "Experimental frames CSVs (compared to a matched null)");
  detect->add_option("--null-runs", m.null_runs, "Null-model runs for --frames mode")
      ->capture_default_str();
  detect->add_option("--density", m.target_density, "Normalization density for --frames mode")
      ->capture_default_str();
  detect->add_option("--config", m.config_path, "Null-model config overrides for --frames mode");
  detect->add_option("--perms", m.num_perms, "Permutation count")->capture_default_str();
  detect->add_option("--alpha-level", m.alpha_level, "Significance level")->capture_default_str();
  detect->add_option("--window", m.window, "Consecutive significant times required")
      ->capture_default_str();
  add_filtration(detect);
  add_landscape(detect);
  add_common(detect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  m.command = sub->get_name();
  m.seed_given = sub->count("--seed") > 0;
  try {
    m.metric = regimescope::parse_metric(metric);
  } catch (const regimescope::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return regimescope::io::run_pipeline(m);
}
