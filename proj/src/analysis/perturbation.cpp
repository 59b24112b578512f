#include "analysis/perturbation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace regpomdp::analysis {

PerturbationReport perturbation_probe(const models::GptConfig& gpt_config,
                                      const models::EmbeddingConfig& embed_config, std::span<const int> n_grid,
                                      int trials, Rng& rng) {
  for (size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("perturbation_probe: n grid must be increasing");
  }
  for (int n : n_grid) {
    if (n > gpt_config.max_positions) {
      throw std::invalid_argument("perturbation_probe: n " + std::to_string(n) + " exceeds position table of " +
                                  std::to_string(gpt_config.max_positions));
    }
    if (n < 2) throw std::invalid_argument("perturbation_probe: n must be at least 2");
  }

  // Tokens are the binary symbols one-hot over the language observation space.
  const int obs_dim = 3;
  Rng init_rng = rng.fork(0);
  models::Embedding embed(embed_config, obs_dim, 2, init_rng);
  models::Gpt gpt(gpt_config, embed_config.width(), init_rng);

  PerturbationReport report;
  report.embed_distance = embed.obs_embedding_distance(0, 1);

  Rng trial_rng = rng.fork(1);
  const int h = gpt.hidden_size();
  for (int n : n_grid) {
    PerturbationRow row;
    row.n = n;
    double max_delta = 0.0;
    double sum_delta = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<int> tokens(static_cast<size_t>(n));
      for (int t = 0; t < n; ++t) tokens[static_cast<size_t>(t)] = trial_rng.uniform_int(2);
      const int flip = trial_rng.uniform_int(n - 1);  // never the final position

      Tensor obs = Tensor::zeros({n, obs_dim});
      for (int t = 0; t < n; ++t) obs.data()[t * obs_dim + tokens[static_cast<size_t>(t)]] = 1.0;
      Tensor u = embed.forward(nullptr, obs, Tensor(), Tensor());
      Tensor x = gpt.forward(nullptr, u, 1, n, nullptr);

      obs.data()[flip * obs_dim + tokens[static_cast<size_t>(flip)]] = 0.0;
      obs.data()[flip * obs_dim + (1 - tokens[static_cast<size_t>(flip)])] = 1.0;
      Tensor u2 = embed.forward(nullptr, obs, Tensor(), Tensor());
      Tensor x2 = gpt.forward(nullptr, u2, 1, n, nullptr);

      double sq = 0.0;
      const double* a = x.data() + static_cast<int64_t>(n - 1) * h;
      const double* b = x2.data() + static_cast<int64_t>(n - 1) * h;
      for (int c = 0; c < h; ++c) {
        const double d = a[c] - b[c];
        sq += d * d;
      }
      const double delta = std::sqrt(sq);
      max_delta = std::max(max_delta, delta);
      sum_delta += delta;
    }
    row.max_delta = max_delta;
    row.mean_delta = sum_delta / static_cast<double>(trials);
    report.rows.push_back(row);
  }

  // Least squares on (log n, log max_delta).
  const size_t m = report.rows.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const PerturbationRow& row : report.rows) {
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.max_delta);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  report.slope = denom != 0.0 ? (static_cast<double>(m) * sxy - sx * sy) / denom : 0.0;
  return report;
}

void write_perturbation_csv(const std::string& path, const PerturbationReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "n,max_delta,mean_delta\n";
  char buf[64];
  for (const PerturbationRow& row : report.rows) {
    out << row.n << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", row.max_delta);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", row.mean_delta);
    out << buf << "\n";
  }
}

}  // namespace regpomdp::analysis
