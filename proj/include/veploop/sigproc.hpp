#pragma once

#include <vector>

#include "veploop/subject.hpp"

namespace veploop::sigproc {

struct DecoderConfig {
  double f_target = 4.0;  // Hz, must land on an exact spectral bin
  double notch_f0 = 50.0; // Hz, mains band-stop
  double notch_q = 30.0;
  int snr_neighbors = 5;  // bins per side, target excluded
  double snr_cap = 100.0;
  int epochs_per_trial = 1;
  double eeg_loss_lambda = 0.05;  // diagnostic loss weight, [0.01, 0.1]

  void validate() const;
};

/// Single-sided amplitude spectrum; bin k holds the amplitude at k*fs/n Hz.
/// Interior bins carry 2|X_k|/n, DC and (for even n) Nyquist carry |X_k|/n.
std::vector<double> amplitude_spectrum(const std::vector<double>& x);

/// Bin index of frequency f, rejecting anything off the exact grid.
int exact_bin(double f, double fs, int n);

/// Second-order recursive band-stop at notch_f0 applied forward then backward
/// (zero phase distortion).
std::vector<double> notch_filter(const std::vector<double>& x, double fs,
                                 const DecoderConfig& cfg);

/// Contiguous, non-overlapping, equal segments ordered from the first sample.
std::vector<std::vector<double>> epoch(const std::vector<double>& x, int n_epochs);

double amplitude_at(const std::vector<double>& x, double fs, double f);

/// Target-bin amplitude over the mean of the m nearest bins on each side.
/// Denominator floored at 1e-12 of the largest bin; result capped at snr_cap.
double snr_at(const std::vector<double>& x, double fs, double f, const DecoderConfig& cfg);

struct TrialMetrics {
  double fft_amp = 0.0;  // uV
  double snr = 0.0;
};

/// Full decode of one trial: notch -> epoch -> per-epoch amplitude and SNR ->
/// mean across epochs and channels.
TrialMetrics decode_recording(const subject::EegRecording& rec, const DecoderConfig& cfg);

/// Min-max normalization of fft_amp and snr across the images of one
/// iteration, independently per feature; a degenerate feature (max == min)
/// contributes 0.5. Scores land in [0, 2].
std::vector<double> score_iteration(const std::vector<TrialMetrics>& per_image);

struct EegFeaturePair {
  double f = 0.0;        // normalized waveform amplitude + frequency
  double f_prime = 0.0;  // normalized image luminance + complexity
  double lambda = 0.05;  // [0.01, 0.1]
};

struct FeatureLoss {
  double l_eeg = 0.0;
  double weighted = 0.0;
};

/// Squared discrepancy between subject-side and image-side features, reported
/// as a per-image diagnostic (nothing is trained against it).
FeatureLoss eeg_feature_loss(const EegFeaturePair& pair);

}  // namespace veploop::sigproc
