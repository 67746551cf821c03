#include "veploop/subject.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "veploop/fft.hpp"

namespace veploop::subject {
namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559005768;
}

std::vector<ChannelSpec> default_montage() {
  return {{"O1", 1.0}, {"O2", 1.0}, {"T5", 0.6}, {"P3", 0.8},
          {"P4", 0.8}, {"T6", 0.6}, {"Pz", 0.8}};
}

int SubjectConfig::n_samples() const {
  return static_cast<int>(std::llround(fs * trial_len));
}

double SubjectConfig::evoked_amplitude(const SubjectFeatures& feat, int iteration) const {
  const double g = iteration == 1
                       ? 1.0 + adapt_gain
                       : 1.0 - fatigue_slope * std::max(0, iteration - plateau_iter);
  return g * (a_base + a_gain * (w_luminance * feat.luminance + w_complexity * feat.complexity));
}

void SubjectConfig::validate() const {
  if (!(f_target > 0.0)) throw std::invalid_argument("subject.f_target: must be > 0");
  if (!(fs > 0.0)) throw std::invalid_argument("subject.fs: must be > 0");
  if (!(trial_len > 0.0)) throw std::invalid_argument("subject.trial_len: must be > 0");
  const double exact = fs * trial_len;
  if (std::abs(exact - std::llround(exact)) > 1e-9 || exact < 2.0)
    throw std::invalid_argument("subject.trial_len: fs * trial_len must be an integer >= 2");
  if (channels.empty()) throw std::invalid_argument("subject.channels: must not be empty");
  if (harmonics.empty()) throw std::invalid_argument("subject.harmonics: must not be empty");
  const double highest = static_cast<double>(harmonics.size()) * f_target;
  if (!(fs > 2.0 * highest))
    throw std::invalid_argument("subject.fs: must exceed twice the highest harmonic frequency");
  for (double h : harmonics)
    if (h < 0.0) throw std::invalid_argument("subject.harmonics: must be >= 0");
  if (a_base < 0.0) throw std::invalid_argument("subject.a_base: must be >= 0");
  if (a_gain < 0.0) throw std::invalid_argument("subject.a_gain: must be >= 0");
  if (noise_sigma < 0.0) throw std::invalid_argument("subject.noise_sigma: must be >= 0");
  if (bg4_amp < 0.0) throw std::invalid_argument("subject.bg4_amp: must be >= 0");
}

std::vector<double> pink_noise(int n, double fs, double sigma, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("pink_noise: need n >= 2");
  const int bins = n / 2 + 1;
  std::vector<std::complex<double>> half(static_cast<std::size_t>(bins), {0.0, 0.0});
  for (int k = 1; k < bins; ++k) {
    const double f = static_cast<double>(k) * fs / n;
    const double amp = 1.0 / std::sqrt(std::max(f, 1.0));  // flat below 1 Hz
    const double phi = kTwoPi * rng.uniform();
    if (n % 2 == 0 && k == n / 2) {
      half[static_cast<std::size_t>(k)] = {amp * std::cos(phi), 0.0};  // Nyquist must be real
    } else {
      half[static_cast<std::size_t>(k)] = {amp * std::cos(phi), amp * std::sin(phi)};
    }
  }
  std::vector<double> x = fft::irfft(half, n);
  double ms = 0.0;
  for (double v : x) ms += v * v;
  ms /= static_cast<double>(n);
  const double scale = ms > 0.0 ? sigma / std::sqrt(ms) : 0.0;
  for (double& v : x) v *= scale;
  return x;
}

EegRecording simulate_trial(const SubjectFeatures& feat, int iteration, const SubjectConfig& cfg,
                            RngStream& rng) {
  cfg.validate();
  if (iteration < 1) throw std::invalid_argument("simulate_trial: iteration must be >= 1");

  const int n = cfg.n_samples();
  const double amp = cfg.evoked_amplitude(feat, iteration);
  const double phi_trial = kTwoPi * rng.uniform();

  // Evoked waveform and background are identical across channels up to gain;
  // computed once so a trial costs one noise synthesis per channel.
  std::vector<double> evoked(static_cast<std::size_t>(n), 0.0);
  std::vector<double> background(static_cast<std::size_t>(n), 0.0);
  for (int t = 0; t < n; ++t) {
    const double ts = static_cast<double>(t) / cfg.fs;
    double e = 0.0;
    for (std::size_t h = 0; h < cfg.harmonics.size(); ++h)
      e += cfg.harmonics[h] * amp *
           std::sin(kTwoPi * static_cast<double>(h + 1) * cfg.f_target * ts);
    evoked[static_cast<std::size_t>(t)] = e;
    background[static_cast<std::size_t>(t)] =
        cfg.bg4_amp * std::sin(kTwoPi * cfg.f_target * ts + phi_trial);
  }

  EegRecording rec;
  rec.fs = cfg.fs;
  rec.channel_labels.reserve(cfg.channels.size());
  rec.samples.reserve(cfg.channels.size());
  for (const ChannelSpec& ch : cfg.channels) {
    rec.channel_labels.push_back(ch.label);
    std::vector<double> noise = pink_noise(n, cfg.fs, cfg.noise_sigma, rng);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
      const std::size_t i = static_cast<std::size_t>(t);
      s[i] = ch.gain * evoked[i] + noise[i] + background[i];
    }
    rec.samples.push_back(std::move(s));
  }
  return rec;
}

}  // namespace veploop::subject
