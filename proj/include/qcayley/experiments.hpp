#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qcayley {

// Flat experiment configuration. A JSON config file carries the same keys as
// the CLI flags; flags override file values.
struct ExperimentConfig {
  std::string experiment;

  std::string arch = "line-brickwork";
  int n = 2;
  int depth = 1;

  double Delta = 0.1;
  double delta = 0.2;
  double epsilon = 1e-9;
  double mu = 1.0;

  std::string noise = "exact";  // exact | uniform | chebyshev | bernoulli
  double noise_q = 0.0;         // bernoulli failure probability
  bool noise_correlated = false;

  int trials = 20;
  std::uint64_t seed = 1;
  int precision_bits = 53;
  int jobs = 1;

  int d = 0;  // 0 means 8m
  int L = 0;  // 0 means ceil((d+1)/delta)
  int binary_iters = 128;
  std::string w_impl = "ransac";  // exact | ransac

  int p = 3;               // sharp-p witness bits
  std::string table_file;  // sharp-p explicit truth table

  std::string out_dir = ".";
};

struct ExperimentOutcome {
  bool pass = false;
  nlohmann::json records = nlohmann::json::array();
  std::string csv;  // sweep table, header line included
};

// Merge a JSON config document into cfg; unknown keys are an error.
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& doc);
ExperimentConfig load_config_file(const std::string& path);

// Appendix B floor: 1/2 + (3/2) delta/(1-delta) - c_tvd * m * Delta.
double markov_floor(double delta, double c_tvd, int m, double Delta);

// Upper tail Pr[Bin(L, p) >= threshold], exact to double roundoff.
double binomial_tail(int L, double p, int threshold);

ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// Dispatch + result emission. Returns the process exit code: 0 pass,
// 1 assertion failure, 2 config/usage error (also thrown as exceptions by
// the pieces above; main translates).
int run(const ExperimentConfig& cfg);

}  // namespace qcayley
