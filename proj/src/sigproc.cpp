#include "veploop/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "veploop/fft.hpp"

namespace veploop::sigproc {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559005768;

struct Biquad {
  double b0, b1, b2, a1, a2;  // a0 normalized to 1
};

Biquad design_notch(double f0, double fs, double q) {
  const double w0 = kTwoPi * f0 / fs;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad bq;
  bq.b0 = 1.0 / a0;
  bq.b1 = -2.0 * std::cos(w0) / a0;
  bq.b2 = 1.0 / a0;
  bq.a1 = -2.0 * std::cos(w0) / a0;
  bq.a2 = (1.0 - alpha) / a0;
  return bq;
}

// Direct form II transposed, zero initial state.
void filter_in_place(const Biquad& bq, std::vector<double>& x) {
  double s1 = 0.0, s2 = 0.0;
  for (double& v : x) {
    const double in = v;
    const double out = bq.b0 * in + s1;
    s1 = bq.b1 * in - bq.a1 * out + s2;
    s2 = bq.b2 * in - bq.a2 * out;
    v = out;
  }
}

double snr_from_spectrum(const std::vector<double>& amps, int bin, const DecoderConfig& cfg) {
  const int last = static_cast<int>(amps.size()) - 1;
  const int m = cfg.snr_neighbors;
  if (bin - m < 1 || bin + m > last)
    throw std::invalid_argument("snr_at: fewer than " + std::to_string(m) +
                                " valid neighbor bins on a side of the target");
  double acc = 0.0;
  for (int j = 1; j <= m; ++j)
    acc += amps[static_cast<std::size_t>(bin - j)] + amps[static_cast<std::size_t>(bin + j)];
  const double mean = acc / (2.0 * m);
  const double max_amp = *std::max_element(amps.begin(), amps.end());
  if (max_amp <= 0.0) return 0.0;  // all-zero signal
  const double denom = std::max(mean, 1e-12 * max_amp);
  return std::min(amps[static_cast<std::size_t>(bin)] / denom, cfg.snr_cap);
}

}  // namespace

void DecoderConfig::validate() const {
  if (!(f_target > 0.0)) throw std::invalid_argument("decoder.f_target: must be > 0");
  if (!(notch_f0 > 0.0)) throw std::invalid_argument("decoder.notch_f0: must be > 0");
  if (!(notch_q > 0.0)) throw std::invalid_argument("decoder.notch_q: must be > 0");
  if (snr_neighbors < 1) throw std::invalid_argument("decoder.snr_neighbors: must be >= 1");
  if (!(snr_cap > 0.0)) throw std::invalid_argument("decoder.snr_cap: must be > 0");
  if (epochs_per_trial < 1) throw std::invalid_argument("decoder.epochs_per_trial: must be >= 1");
  if (eeg_loss_lambda < 0.01 || eeg_loss_lambda > 0.1)
    throw std::invalid_argument("decoder.eeg_loss_lambda: must be in [0.01, 0.1]");
}

std::vector<double> amplitude_spectrum(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  const auto spec = fft::rfft(x);
  std::vector<double> amps(spec.size());
  amps[0] = std::abs(spec[0]) / n;
  for (std::size_t k = 1; k < spec.size(); ++k) amps[k] = 2.0 * std::abs(spec[k]) / n;
  if (n % 2 == 0) amps.back() = std::abs(spec.back()) / n;
  return amps;
}

int exact_bin(double f, double fs, int n) {
  const double kf = f * n / fs;
  const long long k = std::llround(kf);
  if (std::abs(kf - static_cast<double>(k)) > 1e-9)
    throw std::invalid_argument("frequency " + std::to_string(f) +
                                " Hz is not an exact spectral bin (resolution " +
                                std::to_string(fs / n) + " Hz)");
  if (k < 0 || k > n / 2)
    throw std::invalid_argument("frequency " + std::to_string(f) + " Hz is outside [0, fs/2]");
  return static_cast<int>(k);
}

std::vector<double> notch_filter(const std::vector<double>& x, double fs,
                                 const DecoderConfig& cfg) {
  if (!(fs > 2.0 * cfg.notch_f0))
    throw std::invalid_argument("decoder.notch_f0: must be below fs/2");
  const Biquad bq = design_notch(cfg.notch_f0, fs, cfg.notch_q);
  std::vector<double> y = x;
  filter_in_place(bq, y);
  std::reverse(y.begin(), y.end());
  filter_in_place(bq, y);
  std::reverse(y.begin(), y.end());
  return y;
}

std::vector<std::vector<double>> epoch(const std::vector<double>& x, int n_epochs) {
  if (n_epochs < 1) throw std::invalid_argument("epoch: n_epochs must be >= 1");
  const int n = static_cast<int>(x.size());
  if (n % n_epochs != 0)
    throw std::invalid_argument("epoch: " + std::to_string(n) + " samples not divisible into " +
                                std::to_string(n_epochs) + " equal epochs");
  const int len = n / n_epochs;
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n_epochs));
  for (int e = 0; e < n_epochs; ++e)
    out.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(e) * len,
                     x.begin() + static_cast<std::ptrdiff_t>(e + 1) * len);
  return out;
}

double amplitude_at(const std::vector<double>& x, double fs, double f) {
  const int bin = exact_bin(f, fs, static_cast<int>(x.size()));
  return amplitude_spectrum(x)[static_cast<std::size_t>(bin)];
}

double snr_at(const std::vector<double>& x, double fs, double f, const DecoderConfig& cfg) {
  const int bin = exact_bin(f, fs, static_cast<int>(x.size()));
  return snr_from_spectrum(amplitude_spectrum(x), bin, cfg);
}

TrialMetrics decode_recording(const subject::EegRecording& rec, const DecoderConfig& cfg) {
  cfg.validate();
  if (rec.samples.empty()) throw std::invalid_argument("decode_recording: no channels");
  double amp_acc = 0.0, snr_acc = 0.0;
  long count = 0;
  for (const auto& channel : rec.samples) {
    const std::vector<double> filtered = notch_filter(channel, rec.fs, cfg);
    for (const auto& seg : epoch(filtered, cfg.epochs_per_trial)) {
      const int bin = exact_bin(cfg.f_target, rec.fs, static_cast<int>(seg.size()));
      const auto amps = amplitude_spectrum(seg);
      amp_acc += amps[static_cast<std::size_t>(bin)];
      snr_acc += snr_from_spectrum(amps, bin, cfg);
      ++count;
    }
  }
  return {amp_acc / static_cast<double>(count), snr_acc / static_cast<double>(count)};
}

std::vector<double> score_iteration(const std::vector<TrialMetrics>& per_image) {
  const std::size_t k = per_image.size();
  if (k < 2) throw std::invalid_argument("score_iteration: need at least 2 images");
  double amp_min = per_image[0].fft_amp, amp_max = per_image[0].fft_amp;
  double snr_min = per_image[0].snr, snr_max = per_image[0].snr;
  for (const TrialMetrics& m : per_image) {
    amp_min = std::min(amp_min, m.fft_amp);
    amp_max = std::max(amp_max, m.fft_amp);
    snr_min = std::min(snr_min, m.snr);
    snr_max = std::max(snr_max, m.snr);
  }
  const double amp_span = amp_max - amp_min;
  const double snr_span = snr_max - snr_min;
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double na = amp_span > 0.0 ? (per_image[i].fft_amp - amp_min) / amp_span : 0.5;
    const double ns = snr_span > 0.0 ? (per_image[i].snr - snr_min) / snr_span : 0.5;
    scores[i] = na + ns;
  }
  return scores;
}

FeatureLoss eeg_feature_loss(const EegFeaturePair& pair) {
  if (pair.lambda < 0.01 || pair.lambda > 0.1)
    throw std::invalid_argument("eeg_feature_loss: lambda must be in [0.01, 0.1]");
  const double d = pair.f - pair.f_prime;
  FeatureLoss loss;
  loss.l_eeg = d * d;
  loss.weighted = pair.lambda * loss.l_eeg;
  return loss;
}

}  // namespace veploop::sigproc
