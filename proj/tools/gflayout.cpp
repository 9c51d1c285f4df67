#include <iostream>

#include <CLI11.hpp>

#include "fzlayout/cli.hpp"

int main(int argc, char** argv) {
  fzlayout::RunConfig rc;
  CLI::App app{"Force-directed graph layout with multilevel coarsening"};
  app.add_option("input", rc.input, "edge-list file (u v [w] per line)")->required();
  app.add_option("-m,--model", rc.model,
                 "comma-separated rules with optional :weight "
                 "(spring, attraction, repulsion, node-edge, stress, linlog, binary-stress)")
      ->capture_default_str();
  app.add_option("--multilevel", rc.pipeline, "none, ec, mivs, partition or fuzzy")->capture_default_str();
  app.add_option("-i,--iterations", rc.iterations, "optimizer iterations per level")->capture_default_str();
  app.add_option("--phase-split", rc.phase_split, "fraction of iterations in steepest descent")
      ->capture_default_str();
  app.add_option("--cooling", rc.cooling, "temperature cooling factor")->capture_default_str();
  app.add_option("-s,--seed", rc.seed, "random seed")->capture_default_str();
  app.add_option("-f,--format", rc.format, "svg, json or both")->capture_default_str();
  app.add_option("-o,--output", rc.output, "output path prefix (stdout when omitted)");
  app.add_option("--trace", rc.trace, "write the per-iteration energy trace as CSV");
  app.add_option("--init-layout", rc.init_layout, "start from positions in a layout JSON file");
  app.add_option("--dump-levels", rc.dump_levels, "directory for coarse graphs and fuzzy memberships");
  app.add_option("-K,--edge-length", rc.K, "desired edge length")->capture_default_str();
  app.add_option("--omega-exponent", rc.omega_exponent, "stress weight exponent")->capture_default_str();
  app.add_option("--binary-alpha", rc.binary_alpha, "binary stress spreading weight")->capture_default_str();
  app.add_flag("--hops", rc.hops, "use hop counts instead of weighted distances");
  app.add_option("--threshold", rc.threshold, "stop coarsening below this many nodes")->capture_default_str();
  app.add_option("--match", rc.match, "matching priority: first, random, heavy, lowweight, commonneighbors")
      ->capture_default_str();
  app.add_option("--rescale", rc.rescale, "level rescale: avg, diameter, walshaw")->capture_default_str();
  app.add_option("--fuzzy-hop-limit", rc.fuzzy_hop_limit, "walk length for fuzzy memberships")
      ->capture_default_str();
  app.add_option("--fuzzy-prune-tau", rc.fuzzy_prune_tau, "coarse edge pruning fraction")->capture_default_str();
  app.add_option("--constrained-passes", rc.constrained_passes, "confined passes after each expansion")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fzlayout::kExitConfig;
  }
  return fzlayout::run(rc, std::cout, std::cerr);
}
