#pragma once

#include <vector>

#include "veploop/rng.hpp"
#include "veploop/stimgen.hpp"

namespace veploop::evolve {

struct EvolveConfig {
  int n_mutants = 8;
  int n_interp = 10;
  double sigma_max = 0.8;      // top of the mutation std ladder, latent units
  double mutation_rate = 0.5;  // per-element probability
  bool elitism = true;         // carry both parents forward unchanged

  int generation_size() const { return n_mutants + n_interp + (elitism ? 2 : 0); }
  void validate() const;
};

/// Element-wise arithmetic mean.
LatentVector combine(const LatentVector& a, const LatentVector& b);

/// Each element gains N(0, sigma^2) noise with probability p.
LatentVector mutate(const LatentVector& z, double sigma, double p, RngStream& rng);

/// (1 - alpha) * a + alpha * b.
LatentVector interpolate(const LatentVector& a, const LatentVector& b, double alpha);

/// Offspring, in fixed order: the two parents (under elitism), then n_mutants
/// mutants of combine(best_fft, best_snr) on the std ladder sigma_j =
/// j * sigma_max / n_mutants, then n_interp interpolants at alpha =
/// j / (n_interp + 1). Mutant j draws from its own substream, so the output
/// is one fixed function of (parents, cfg, rng seed).
std::vector<LatentVector> next_generation(const LatentVector& best_fft,
                                          const LatentVector& best_snr, const EvolveConfig& cfg,
                                          const RngStream& rng);

}  // namespace veploop::evolve
