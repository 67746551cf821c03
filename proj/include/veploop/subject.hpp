#pragma once

#include <string>
#include <vector>

#include "veploop/imfeat.hpp"
#include "veploop/rng.hpp"

namespace veploop::subject {

using imfeat::SubjectFeatures;

struct ChannelSpec {
  std::string label;
  double gain = 1.0;
};

/// O1, O2, T5, P3, P4, T6, Pz with occipital 1.0, parietal 0.8, temporal 0.6.
std::vector<ChannelSpec> default_montage();

struct SubjectConfig {
  double f_target = 4.0;  // Hz
  double fs = 250.0;      // Hz
  double trial_len = 2.0; // s; fs * trial_len must be an integer sample count
  std::vector<ChannelSpec> channels = default_montage();
  double a_base = 80.0;   // uV, evoked floor
  double a_gain = 400.0;  // uV per unit of weighted (L, C)
  double w_luminance = 0.4;
  double w_complexity = 0.6;
  std::vector<double> harmonics = {1.0, 0.5, 0.25};  // relative amps at f, 2f, 3f
  double noise_sigma = 40.0;  // uV RMS of the 1/f background
  double bg4_amp = 60.0;      // uV, non-phase-locked oscillation at f_target
  double adapt_gain = 0.0;    // first-iteration transient boost
  double fatigue_slope = 0.0; // decline per iteration past the plateau
  int plateau_iter = 8;

  int n_samples() const;
  /// g(iteration) * (a_base + a_gain * (w_L * L + w_C * C)); g models the
  /// initial adaptation transient and late-session fatigue.
  double evoked_amplitude(const SubjectFeatures& feat, int iteration) const;
  void validate() const;
};

struct EegRecording {
  double fs = 0.0;
  std::vector<std::string> channel_labels;
  std::vector<std::vector<double>> samples;  // channels x n, uV
};

/// Zero-mean noise with power spectral density ~ 1/f between 1 Hz and fs/2,
/// rescaled to RMS sigma. Spectral synthesis: shape a flat spectrum by
/// f^(-1/2), randomize phases, inverse transform.
std::vector<double> pink_noise(int n, double fs, double sigma, RngStream& rng);

/// One trial: per channel, gain * evoked harmonic stack (phase-locked to
/// onset) + pink noise (independent per channel) + a background sinusoid at
/// f_target whose phase is uniform per trial and shared across channels.
EegRecording simulate_trial(const SubjectFeatures& feat, int iteration, const SubjectConfig& cfg,
                            RngStream& rng);

}  // namespace veploop::subject
