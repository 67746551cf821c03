#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veploop/evolve.hpp"
#include "veploop/imfeat.hpp"
#include "veploop/sigproc.hpp"
#include "veploop/stimgen.hpp"
#include "veploop/subject.hpp"

namespace veploop::loop {

struct ProtocolConfig {
  int n_iterations = 8;
  int images_per_iter = 5;
  int trials_per_image = 30;
  int initial_pool = 50;
  // Presentation timing, bookkept for the record; simulated time is not
  // waited and the flicker drive is folded into the evoked harmonic stack.
  double flicker_hz = 4.0;
  double flicker_on_ms = 125.0;
  double flicker_off_ms = 125.0;
  double trial_len = 2.0;  // s, must match subject.trial_len
  double inter_trial_gap_ms = 30.0;
  double rest_after_image_s = 30.0;

  void validate() const;
};

struct FullConfig {
  stimgen::GeneratorConfig generator;
  subject::SubjectConfig subject;
  sigproc::DecoderConfig decoder;
  evolve::EvolveConfig evolve;
  ProtocolConfig protocol;

  /// Validates every section plus the cross-module invariants (exact-bin
  /// target frequency, epoch divisibility, pool sizes, matching trial
  /// lengths). Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct TrialRecord {
  double fft_amp = 0.0;
  double snr = 0.0;
};

struct ImageRecord {
  LatentVector latent;  // empty in the user-image baseline mode
  stimgen::StimulusParams params;
  std::vector<TrialRecord> trials;
  double fft_amp = 0.0;  // means over trials
  double snr = 0.0;
  double score = 0.0;  // within-iteration normalized
  double l_eeg = 0.0;
  double weighted_l_eeg = 0.0;
};

struct IterationRecord {
  int iteration = 0;                    // 1-based
  std::vector<LatentVector> candidates; // pool the selection ran over
  std::vector<int> selected;            // indices into candidates
  std::vector<ImageRecord> images;
  int parent_fft = -1;  // indices into images
  int parent_snr = -1;
};

struct ExperimentLog {
  FullConfig config;
  std::uint64_t master_seed = 0;
  std::string mode;  // "boosted" or "baseline"
  std::vector<IterationRecord> iterations;
};

/// Simulate and decode every (image, trial) pair of one iteration. Each trial
/// draws from its own (iteration, image, trial) substream and lands in a
/// preassigned output slot, so the parallel kernel matches the serial
/// reference bit for bit at any worker count.
std::vector<TrialRecord> simulate_and_decode_serial(
    const std::vector<imfeat::SubjectFeatures>& features, int iteration, const FullConfig& cfg,
    const RngStream& master);
std::vector<TrialRecord> simulate_and_decode_parallel(
    const std::vector<imfeat::SubjectFeatures>& features, int iteration, const FullConfig& cfg,
    const RngStream& master, int workers);

/// Closed loop: seed a pool of initial_pool latents, present the most diverse
/// images_per_iter of them, decode, pick the amplitude-best and SNR-best
/// parents, breed the next generation, and repeat for n_iterations.
ExperimentLog run_experiment(const FullConfig& cfg, std::uint64_t master_seed, int workers = 1);

/// Identical protocol with the first iteration's images frozen and
/// re-presented every iteration (no evolution). When user_images is given it
/// must hold exactly images_per_iter grayscale images, which replace the
/// procedurally selected set.
ExperimentLog run_baseline(const FullConfig& cfg, std::uint64_t master_seed, int workers = 1,
                           const std::vector<stimgen::StimulusImage>* user_images = nullptr);

double iteration_mean_amp(const ExperimentLog& log, int iteration_index);
double iteration_mean_snr(const ExperimentLog& log, int iteration_index);
double iteration_mean_score(const ExperimentLog& log, int iteration_index);

/// 100 * (last - first) / first; throws on a zero first value.
double improvement_pct(double first, double last);

struct ImprovementReport {
  double boosted_amp_pct = 0.0;
  double boosted_snr_pct = 0.0;
  double baseline_amp_pct = 0.0;
  double baseline_snr_pct = 0.0;
  double final_amp_ratio = 0.0;  // boosted / baseline at the last iteration
  double final_snr_ratio = 0.0;
};

ImprovementReport improvement_report(const ExperimentLog& boosted, const ExperimentLog& baseline);

/// rows = iterations, cols = images * trials. Cell = per-trial amplitude and
/// SNR, each min-max normalized over the whole log, summed.
std::vector<std::vector<double>> heatmap_matrix(const ExperimentLog& log);

}  // namespace veploop::loop
