#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "qcayley/experiments.hpp"
#include "qcayley/types.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qcayley: Cayley-path reduction experiments"};
  app.require_subcommand(0, 0);

  qcayley::ExperimentConfig cfg;
  std::string config_path;

  app.add_option("experiment", cfg.experiment,
                 "one of: bounds-sweep, strong-reduction, weak-reduction, chebyshev-saturation, "
                 "sharp-p, concentration, tvd-proxy, degree-check")
      ->required();
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--seed", cfg.seed, "base RNG seed");
  app.add_option("--jobs", cfg.jobs, "worker threads for trial fan-out");
  app.add_option("--precision-bits", cfg.precision_bits, "53, 256, or 512");
  app.add_option("--out", cfg.out_dir, "output directory for results.json and sweep.csv");
  app.add_option("--arch", cfg.arch, "architecture preset: line-brickwork or grid");
  app.add_option("--n", cfg.n, "qubit count");
  app.add_option("--depth", cfg.depth, "layer count for the architecture preset");
  app.add_option("--Delta", cfg.Delta, "extrapolation half-width");
  app.add_option("--delta", cfg.delta, "robust-decoding margin");
  app.add_option("--epsilon", cfg.epsilon, "oracle noise amplitude / tolerance");
  app.add_option("--mu", cfg.mu, "padding exponent for sharp-p");
  app.add_option("--noise", cfg.noise, "exact, uniform, chebyshev, or bernoulli");
  app.add_option("--noise-q", cfg.noise_q, "Bernoulli corruption probability");
  app.add_flag("--noise-correlated", cfg.noise_correlated, "one corruption coin per oracle");
  app.add_option("--trials", cfg.trials, "trial count");
  app.add_option("--d", cfg.d, "polynomial degree override (0 = 8m)");
  app.add_option("--L", cfg.L, "grid size override (0 = ceil((d+1)/delta))");
  app.add_option("--binary-iters", cfg.binary_iters, "binary search iterations");
  app.add_option("--w-impl", cfg.w_impl, "W oracle implementation: exact or ransac");
  app.add_option("--p", cfg.p, "witness bits for sharp-p");
  app.add_option("--table-file", cfg.table_file, "truth table file for sharp-p");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      const qcayley::ExperimentConfig from_file = qcayley::load_config_file(config_path);
      // flags beat the file: copy file values only for options argv left untouched
      auto keep = [&](const std::string& name) {
        const CLI::Option* opt = app.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
      };
      if (!keep("--seed")) cfg.seed = from_file.seed;
      if (!keep("--jobs")) cfg.jobs = from_file.jobs;
      if (!keep("--precision-bits")) cfg.precision_bits = from_file.precision_bits;
      if (!keep("--out")) cfg.out_dir = from_file.out_dir;
      if (!keep("--arch")) cfg.arch = from_file.arch;
      if (!keep("--n")) cfg.n = from_file.n;
      if (!keep("--depth")) cfg.depth = from_file.depth;
      if (!keep("--Delta")) cfg.Delta = from_file.Delta;
      if (!keep("--delta")) cfg.delta = from_file.delta;
      if (!keep("--epsilon")) cfg.epsilon = from_file.epsilon;
      if (!keep("--mu")) cfg.mu = from_file.mu;
      if (!keep("--noise")) cfg.noise = from_file.noise;
      if (!keep("--noise-q")) cfg.noise_q = from_file.noise_q;
      if (!keep("--noise-correlated")) cfg.noise_correlated = from_file.noise_correlated;
      if (!keep("--trials")) cfg.trials = from_file.trials;
      if (!keep("--d")) cfg.d = from_file.d;
      if (!keep("--L")) cfg.L = from_file.L;
      if (!keep("--binary-iters")) cfg.binary_iters = from_file.binary_iters;
      if (!keep("--w-impl")) cfg.w_impl = from_file.w_impl;
      if (!keep("--p")) cfg.p = from_file.p;
      if (!keep("--table-file")) cfg.table_file = from_file.table_file;
    }
    const int code = qcayley::run(cfg);
    std::fprintf(stderr, "%s: %s\n", cfg.experiment.c_str(), code == 0 ? "PASS" : "FAIL");
    return code;
  } catch (const qcayley::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qcayley::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qcayley::BadShape& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qcayley::TooLarge& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qcayley::TooManyWitnessBits& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qcayley::TooManyQubits& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
