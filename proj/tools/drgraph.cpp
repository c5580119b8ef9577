// drgraph: lay out an undirected graph and optionally score the drawing.
//
//   drgraph --input g.mtx --output g.coords [--metrics] [flags]
//   drgraph bench a.txt b.mtx [flags]   > timings.csv

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drgraph/cli.hpp"

namespace {

// Loads --config first so explicit flags can override file values.
drgraph::RunConfig initial_config(int argc, char** argv) {
  CLI::App pre;
  pre.allow_extras();
  pre.set_help_flag();
  std::string path;
  pre.add_option("--config", path);
  try {
    pre.parse(argc, argv);
  } catch (const CLI::ParseError&) {
    return {};
  }
  drgraph::RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw drgraph::IoError("cannot open config " + path);
  cfg.apply_text(in);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  drgraph::RunConfig cfg;
  try {
    cfg = initial_config(argc, argv);
  } catch (const drgraph::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(drgraph::ExitCode::io);
  } catch (const drgraph::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(drgraph::ExitCode::usage);
  }

  CLI::App app{"Multilevel negative-sampling graph layout.\n"
               "Bench timings cover layout only; reading the input is not timed."};
  std::string config_path, format = cfg.format, perplexity;
  app.add_option("--config", config_path, "key = value file; flags override its values");
  app.add_option("--input", cfg.input, "graph file (edge list or MatrixMarket)");
  app.add_option("--format", format, "input format: auto|edgelist|mtx (svg|coords|both select the output format)")
      ->check(CLI::IsMember({"auto", "edgelist", "mtx", "svg", "coords", "both"}));
  app.add_option("--output", cfg.output, "output path");
  app.add_option("--out-format", cfg.out_format, "coords|svg|both (both writes <output>.svg too)")
      ->check(CLI::IsMember({"coords", "svg", "both"}));
  app.add_option("--k", cfg.similarity.k, "hop bound of the similarity neighborhoods")->check(CLI::Range(1, 6));
  app.add_option("--perplexity", perplexity, "target perplexity for k >= 2, or 'auto'");
  app.add_option("--neg-samples", cfg.optimizer.negative_samples, "negative samples per positive (M)");
  app.add_option("--gamma", cfg.optimizer.gamma, "repulsion weight (coarsest level uses 0.01)");
  app.add_option("--b", cfg.optimizer.b, "kernel exponent: 1 social/manifold, 2 general, 3 grid-like");
  app.add_option("--iters", cfg.optimizer.iterations, "epochs per level (T)");
  app.add_option("--rho", cfg.optimizer.rho, "coarsening stops when a level keeps more than rho of the nodes");
  app.add_option("--min-size", cfg.optimizer.min_size, "do not coarsen graphs this small");
  app.add_option("--lr", cfg.optimizer.lr0, "initial learning rate");
  app.add_option("--seed", cfg.optimizer.seed, "random seed");
  app.add_option("--threads", cfg.optimizer.threads, "optimizer threads (deterministic only with 1)")
      ->envname("DRGRAPH_THREADS");
  app.add_flag("--metrics", cfg.metrics, "print NP, stress, crosslessness and minimum angle");
  app.add_option("--k-eval", cfg.k_eval, "hop bound for neighborhood preservation");
  app.add_option("--svg-edge-cap", cfg.svg_edge_cap, "draw a random subset of this many edges when larger");

  auto* bench_cmd = app.add_subcommand("bench", "CSV of layout wall time and storage per input");
  std::vector<std::string> bench_inputs;
  bench_cmd->add_option("inputs", bench_inputs, "graph files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(drgraph::ExitCode::usage);
  }

  try {
    if (format == "svg" || format == "coords" || format == "both")
      cfg.out_format = format;
    else
      cfg.format = format;
    if (!perplexity.empty()) cfg.set("perplexity", perplexity);
  } catch (const drgraph::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(drgraph::ExitCode::usage);
  }

  if (*bench_cmd) return static_cast<int>(drgraph::bench(bench_inputs, cfg, std::cout, std::cerr));
  return static_cast<int>(drgraph::run(cfg, std::cout, std::cerr));
}
