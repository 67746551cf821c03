#include "veploop/looprunner.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace veploop::loop {
namespace {

struct TrialTask {
  int image = 0;
  int trial = 0;
};

TrialRecord run_one_trial(const imfeat::SubjectFeatures& feat, int iteration, int image, int trial,
                          const FullConfig& cfg, const RngStream& master) {
  try {
    RngStream s = master.substream({stream::kTrial, static_cast<std::uint64_t>(iteration),
                                    static_cast<std::uint64_t>(image),
                                    static_cast<std::uint64_t>(trial)});
    const subject::EegRecording rec = subject::simulate_trial(feat, iteration, cfg.subject, s);
    const sigproc::TrialMetrics m = sigproc::decode_recording(rec, cfg.decoder);
    return {m.fft_amp, m.snr};
  } catch (const std::exception& e) {
    throw std::runtime_error("iteration " + std::to_string(iteration) + ", image " +
                             std::to_string(image + 1) + ", trial " + std::to_string(trial + 1) +
                             ": " + e.what());
  }
}

std::vector<imfeat::FeatureVector> precheck_all(const std::vector<stimgen::StimulusImage>& imgs) {
  std::vector<imfeat::FeatureVector> out;
  out.reserve(imgs.size());
  for (const auto& img : imgs) out.push_back(imfeat::precheck_features(img));
  return out;
}

// Amplitude-best and SNR-best image indices; ties go to the smaller index.
// When one image tops both features, the second parent falls back to the
// runner-up on the combined score.
std::pair<int, int> choose_parents(const std::vector<ImageRecord>& images) {
  int best_fft = 0, best_snr = 0;
  for (int i = 1; i < static_cast<int>(images.size()); ++i) {
    if (images[static_cast<std::size_t>(i)].fft_amp >
        images[static_cast<std::size_t>(best_fft)].fft_amp)
      best_fft = i;
    if (images[static_cast<std::size_t>(i)].snr > images[static_cast<std::size_t>(best_snr)].snr)
      best_snr = i;
  }
  if (best_fft == best_snr) {
    int runner = -1;
    for (int i = 0; i < static_cast<int>(images.size()); ++i) {
      if (i == best_fft) continue;
      if (runner < 0 ||
          images[static_cast<std::size_t>(i)].score > images[static_cast<std::size_t>(runner)].score)
        runner = i;
    }
    best_snr = runner;
  }
  return {best_fft, best_snr};
}

// Subject-side vs image-side feature discrepancy for the diagnostic loss.
sigproc::FeatureLoss image_diagnostic(const imfeat::SubjectFeatures& feat, int iteration,
                                      const FullConfig& cfg) {
  const double amp = cfg.subject.evoked_amplitude(feat, iteration);
  const double amp_norm =
      std::clamp(amp / (cfg.subject.a_base + cfg.subject.a_gain), 0.0, 1.0);
  const double freq_norm = cfg.subject.f_target / (cfg.subject.fs / 2.0);
  sigproc::EegFeaturePair pair;
  pair.f = 0.5 * (amp_norm + freq_norm);
  pair.f_prime = 0.5 * (feat.luminance + feat.complexity);
  pair.lambda = cfg.decoder.eeg_loss_lambda;
  return sigproc::eeg_feature_loss(pair);
}

// Shared body of run_experiment and run_baseline. `frozen` re-presents the
// first iteration's images without evolving; `user_images` replaces the
// initial selection entirely.
ExperimentLog run_loop(const FullConfig& cfg, std::uint64_t master_seed, int workers, bool frozen,
                       const std::vector<stimgen::StimulusImage>* user_images) {
  cfg.validate();
  const stimgen::Generator gen(cfg.generator);
  const RngStream master(master_seed);
  const int k = cfg.protocol.images_per_iter;

  ExperimentLog log;
  log.config = cfg;
  log.master_seed = master_seed;
  log.mode = frozen ? "baseline" : "boosted";

  // Current candidate pool and the presented subset drawn from it.
  std::vector<LatentVector> pool;
  std::vector<int> selected;
  std::vector<stimgen::StimulusImage> presented;
  std::vector<LatentVector> presented_latents;
  std::vector<stimgen::StimulusParams> presented_params;

  if (user_images != nullptr) {
    if (static_cast<int>(user_images->size()) != k)
      throw std::invalid_argument("baseline: need exactly " + std::to_string(k) +
                                  " user images, got " + std::to_string(user_images->size()));
    presented = *user_images;
    presented_latents.assign(static_cast<std::size_t>(k), LatentVector{});
    presented_params.assign(static_cast<std::size_t>(k), stimgen::StimulusParams{});
    selected.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) selected[static_cast<std::size_t>(i)] = i;
  } else {
    pool.resize(static_cast<std::size_t>(cfg.protocol.initial_pool));
    for (int j = 0; j < cfg.protocol.initial_pool; ++j) {
      RngStream s = master.substream({stream::kInitialPool, static_cast<std::uint64_t>(j)});
      pool[static_cast<std::size_t>(j)] = gen.sample_latent(s);
    }
  }

  for (int it = 1; it <= cfg.protocol.n_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;

    const bool reselect = user_images == nullptr && (!frozen || it == 1);
    if (reselect) {
      std::vector<stimgen::StimulusImage> pool_images;
      pool_images.reserve(pool.size());
      for (const auto& z : pool) pool_images.push_back(gen.render_latent(z));
      selected = imfeat::select_diverse(precheck_all(pool_images), k, imfeat::SelectMode::kAuto);
      presented.clear();
      presented_latents.clear();
      presented_params.clear();
      for (int idx : selected) {
        presented_latents.push_back(pool[static_cast<std::size_t>(idx)]);
        presented_params.push_back(gen.decode_params(pool[static_cast<std::size_t>(idx)]));
        presented.push_back(std::move(pool_images[static_cast<std::size_t>(idx)]));
      }
    }
    rec.candidates = pool;
    rec.selected = selected;

    std::vector<imfeat::SubjectFeatures> feats;
    feats.reserve(presented.size());
    for (const auto& img : presented) feats.push_back(imfeat::subject_features(img));

    const std::vector<TrialRecord> trials =
        workers > 1 ? simulate_and_decode_parallel(feats, it, cfg, master, workers)
                    : simulate_and_decode_serial(feats, it, cfg, master);

    const int t_per = cfg.protocol.trials_per_image;
    std::vector<sigproc::TrialMetrics> per_image(static_cast<std::size_t>(k));
    rec.images.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      ImageRecord& im = rec.images[static_cast<std::size_t>(i)];
      im.latent = presented_latents[static_cast<std::size_t>(i)];
      im.params = presented_params[static_cast<std::size_t>(i)];
      im.trials.assign(trials.begin() + static_cast<std::ptrdiff_t>(i) * t_per,
                       trials.begin() + static_cast<std::ptrdiff_t>(i + 1) * t_per);
      double amp_acc = 0.0, snr_acc = 0.0;
      for (const TrialRecord& t : im.trials) {
        amp_acc += t.fft_amp;
        snr_acc += t.snr;
      }
      im.fft_amp = amp_acc / t_per;
      im.snr = snr_acc / t_per;
      per_image[static_cast<std::size_t>(i)] = {im.fft_amp, im.snr};
      const sigproc::FeatureLoss loss = image_diagnostic(feats[static_cast<std::size_t>(i)], it, cfg);
      im.l_eeg = loss.l_eeg;
      im.weighted_l_eeg = loss.weighted;
    }
    const std::vector<double> scores = sigproc::score_iteration(per_image);
    for (int i = 0; i < k; ++i) rec.images[static_cast<std::size_t>(i)].score = scores[static_cast<std::size_t>(i)];

    const auto [p_fft, p_snr] = choose_parents(rec.images);
    rec.parent_fft = p_fft;
    rec.parent_snr = p_snr;

    if (!frozen && it < cfg.protocol.n_iterations) {
      const RngStream ev = master.substream({stream::kEvolve, static_cast<std::uint64_t>(it)});
      pool = evolve::next_generation(rec.images[static_cast<std::size_t>(p_fft)].latent,
                                     rec.images[static_cast<std::size_t>(p_snr)].latent,
                                     cfg.evolve, ev);
    } else if (frozen && user_images == nullptr && it == 1) {
      // Freeze: later iterations re-present this selection.
      pool = presented_latents;
      selected.resize(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) selected[static_cast<std::size_t>(i)] = i;
    }

    log.iterations.push_back(std::move(rec));
  }
  return log;
}

double checked_iteration_mean(const ExperimentLog& log, int index, double ImageRecord::* field) {
  if (index < 0 || index >= static_cast<int>(log.iterations.size()))
    throw std::out_of_range("iteration index out of range");
  const IterationRecord& rec = log.iterations[static_cast<std::size_t>(index)];
  double acc = 0.0;
  for (const ImageRecord& im : rec.images) acc += im.*field;
  return acc / static_cast<double>(rec.images.size());
}

}  // namespace

void ProtocolConfig::validate() const {
  if (n_iterations < 1) throw std::invalid_argument("protocol.n_iterations: must be >= 1");
  if (images_per_iter < 2) throw std::invalid_argument("protocol.images_per_iter: must be >= 2");
  if (trials_per_image < 1) throw std::invalid_argument("protocol.trials_per_image: must be >= 1");
  if (initial_pool < images_per_iter)
    throw std::invalid_argument("protocol.initial_pool: must be >= images_per_iter");
  if (!(flicker_hz > 0.0)) throw std::invalid_argument("protocol.flicker_hz: must be > 0");
  if (!(flicker_on_ms > 0.0) || !(flicker_off_ms > 0.0))
    throw std::invalid_argument("protocol.flicker_on_ms/off_ms: must be > 0");
  if (!(trial_len > 0.0)) throw std::invalid_argument("protocol.trial_len: must be > 0");
  if (inter_trial_gap_ms < 0.0)
    throw std::invalid_argument("protocol.inter_trial_gap_ms: must be >= 0");
  if (rest_after_image_s < 0.0)
    throw std::invalid_argument("protocol.rest_after_image_s: must be >= 0");
}

void FullConfig::validate() const {
  generator.validate();
  subject.validate();
  decoder.validate();
  evolve.validate();
  protocol.validate();

  if (std::abs(protocol.trial_len - subject.trial_len) > 1e-9)
    throw std::invalid_argument("protocol.trial_len: must match subject.trial_len");
  if (protocol.images_per_iter > evolve.generation_size())
    throw std::invalid_argument(
        "protocol.images_per_iter: exceeds the evolve generation size");

  const int n = subject.n_samples();
  if (n % decoder.epochs_per_trial != 0)
    throw std::invalid_argument("decoder.epochs_per_trial: trial of " + std::to_string(n) +
                                " samples is not divisible into equal epochs");
  const int epoch_len = n / decoder.epochs_per_trial;
  int bin = 0;
  try {
    bin = sigproc::exact_bin(decoder.f_target, subject.fs, epoch_len);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("decoder.f_target: ") + e.what());
  }
  if (bin - decoder.snr_neighbors < 1 || bin + decoder.snr_neighbors > epoch_len / 2)
    throw std::invalid_argument(
        "decoder.snr_neighbors: target bin lacks enough neighbor bins on a side");
  if (!(subject.fs > 2.0 * decoder.notch_f0))
    throw std::invalid_argument("decoder.notch_f0: must be below fs/2");
}

std::vector<TrialRecord> simulate_and_decode_serial(
    const std::vector<imfeat::SubjectFeatures>& features, int iteration, const FullConfig& cfg,
    const RngStream& master) {
  const int n_images = static_cast<int>(features.size());
  const int t_per = cfg.protocol.trials_per_image;
  std::vector<TrialRecord> out(static_cast<std::size_t>(n_images) * t_per);
  for (int flat = 0; flat < n_images * t_per; ++flat) {
    const int i = flat / t_per;
    const int t = flat % t_per;
    out[static_cast<std::size_t>(flat)] =
        run_one_trial(features[static_cast<std::size_t>(i)], iteration, i, t, cfg, master);
  }
  return out;
}

std::vector<TrialRecord> simulate_and_decode_parallel(
    const std::vector<imfeat::SubjectFeatures>& features, int iteration, const FullConfig& cfg,
    const RngStream& master, int workers) {
  const int n_images = static_cast<int>(features.size());
  const int t_per = cfg.protocol.trials_per_image;
  const int total = n_images * t_per;
  std::vector<TrialRecord> out(static_cast<std::size_t>(total));

  // Exceptions cannot unwind across the parallel region; the first one is
  // captured and rethrown after the join.
  std::string error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(static) num_threads(workers)
  for (int flat = 0; flat < total; ++flat) {
    try {
      const int i = flat / t_per;
      const int t = flat % t_per;
      out[static_cast<std::size_t>(flat)] =
          run_one_trial(features[static_cast<std::size_t>(i)], iteration, i, t, cfg, master);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  return out;
}

ExperimentLog run_experiment(const FullConfig& cfg, std::uint64_t master_seed, int workers) {
  return run_loop(cfg, master_seed, workers, /*frozen=*/false, nullptr);
}

ExperimentLog run_baseline(const FullConfig& cfg, std::uint64_t master_seed, int workers,
                           const std::vector<stimgen::StimulusImage>* user_images) {
  return run_loop(cfg, master_seed, workers, /*frozen=*/true, user_images);
}

double iteration_mean_amp(const ExperimentLog& log, int iteration_index) {
  return checked_iteration_mean(log, iteration_index, &ImageRecord::fft_amp);
}

double iteration_mean_snr(const ExperimentLog& log, int iteration_index) {
  return checked_iteration_mean(log, iteration_index, &ImageRecord::snr);
}

double iteration_mean_score(const ExperimentLog& log, int iteration_index) {
  return checked_iteration_mean(log, iteration_index, &ImageRecord::score);
}

double improvement_pct(double first, double last) {
  if (first == 0.0)
    throw std::domain_error("improvement undefined: first-iteration value is zero");
  return 100.0 * (last - first) / first;
}

ImprovementReport improvement_report(const ExperimentLog& boosted, const ExperimentLog& baseline) {
  const auto shape = [](const ExperimentLog& log) {
    if (log.iterations.empty()) throw std::invalid_argument("improvement_report: empty log");
    return std::make_tuple(log.iterations.size(), log.iterations.front().images.size(),
                           log.iterations.front().images.front().trials.size());
  };
  if (shape(boosted) != shape(baseline))
    throw std::invalid_argument("improvement_report: protocol shapes do not match");

  const int last = static_cast<int>(boosted.iterations.size()) - 1;
  ImprovementReport r;
  r.boosted_amp_pct =
      improvement_pct(iteration_mean_amp(boosted, 0), iteration_mean_amp(boosted, last));
  r.boosted_snr_pct =
      improvement_pct(iteration_mean_snr(boosted, 0), iteration_mean_snr(boosted, last));
  r.baseline_amp_pct =
      improvement_pct(iteration_mean_amp(baseline, 0), iteration_mean_amp(baseline, last));
  r.baseline_snr_pct =
      improvement_pct(iteration_mean_snr(baseline, 0), iteration_mean_snr(baseline, last));
  const double base_amp = iteration_mean_amp(baseline, last);
  const double base_snr = iteration_mean_snr(baseline, last);
  if (base_amp == 0.0 || base_snr == 0.0)
    throw std::domain_error("improvement_report: baseline final iteration is zero");
  r.final_amp_ratio = iteration_mean_amp(boosted, last) / base_amp;
  r.final_snr_ratio = iteration_mean_snr(boosted, last) / base_snr;
  return r;
}

std::vector<std::vector<double>> heatmap_matrix(const ExperimentLog& log) {
  double amp_min = 0.0, amp_max = 0.0, snr_min = 0.0, snr_max = 0.0;
  bool first = true;
  for (const auto& it : log.iterations) {
    for (const auto& im : it.images) {
      for (const auto& t : im.trials) {
        if (first) {
          amp_min = amp_max = t.fft_amp;
          snr_min = snr_max = t.snr;
          first = false;
        } else {
          amp_min = std::min(amp_min, t.fft_amp);
          amp_max = std::max(amp_max, t.fft_amp);
          snr_min = std::min(snr_min, t.snr);
          snr_max = std::max(snr_max, t.snr);
        }
      }
    }
  }
  const double amp_span = amp_max - amp_min;
  const double snr_span = snr_max - snr_min;
  std::vector<std::vector<double>> rows;
  rows.reserve(log.iterations.size());
  for (const auto& it : log.iterations) {
    std::vector<double> row;
    for (const auto& im : it.images) {
      for (const auto& t : im.trials) {
        const double na = amp_span > 0.0 ? (t.fft_amp - amp_min) / amp_span : 0.5;
        const double ns = snr_span > 0.0 ? (t.snr - snr_min) / snr_span : 0.5;
        row.push_back(na + ns);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace veploop::loop
