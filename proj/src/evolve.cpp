#include "veploop/evolve.hpp"

#include <stdexcept>

namespace veploop::evolve {

void EvolveConfig::validate() const {
  if (n_mutants < 0) throw std::invalid_argument("evolve.n_mutants: must be >= 0");
  if (n_interp < 0) throw std::invalid_argument("evolve.n_interp: must be >= 0");
  if (sigma_max < 0.0) throw std::invalid_argument("evolve.sigma_max: must be >= 0");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw std::invalid_argument("evolve.mutation_rate: must be in [0, 1]");
  if (generation_size() < 2)
    throw std::invalid_argument("evolve: generation size must be >= 2");
}

LatentVector combine(const LatentVector& a, const LatentVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("combine: latent length mismatch");
  LatentVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
  return out;
}

LatentVector mutate(const LatentVector& z, double sigma, double p, RngStream& rng) {
  if (sigma < 0.0) throw std::invalid_argument("mutate: sigma must be >= 0");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("mutate: p must be in [0, 1]");
  LatentVector out = z;
  for (double& v : out) {
    if (rng.uniform() < p) v += sigma * rng.normal();
  }
  return out;
}

LatentVector interpolate(const LatentVector& a, const LatentVector& b, double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("interpolate: latent length mismatch");
  LatentVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - alpha) * a[i] + alpha * b[i];
  return out;
}

std::vector<LatentVector> next_generation(const LatentVector& best_fft,
                                          const LatentVector& best_snr, const EvolveConfig& cfg,
                                          const RngStream& rng) {
  cfg.validate();
  if (best_fft.size() != best_snr.size())
    throw std::invalid_argument("next_generation: parent length mismatch");

  std::vector<LatentVector> out;
  out.reserve(static_cast<std::size_t>(cfg.generation_size()));
  if (cfg.elitism) {
    out.push_back(best_fft);
    out.push_back(best_snr);
  }
  const LatentVector seed = combine(best_fft, best_snr);
  for (int j = 1; j <= cfg.n_mutants; ++j) {
    const double sigma = static_cast<double>(j) * cfg.sigma_max / cfg.n_mutants;
    RngStream sub = rng.substream({stream::kMutant, static_cast<std::uint64_t>(j)});
    out.push_back(mutate(seed, sigma, cfg.mutation_rate, sub));
  }
  for (int j = 1; j <= cfg.n_interp; ++j) {
    const double alpha = static_cast<double>(j) / (cfg.n_interp + 1);
    out.push_back(interpolate(best_fft, best_snr, alpha));
  }
  return out;
}

}  // namespace veploop::evolve
