#include "veploop/imfeat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "veploop/fft.hpp"

namespace veploop::imfeat {
namespace {

double clamped(const StimulusImage& img, int y, int x) {
  y = std::clamp(y, 0, img.height - 1);
  x = std::clamp(x, 0, img.width - 1);
  return img.at(y, x);
}

double sobel_edge_count(const StimulusImage& img) {
  long long count = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double gx = (clamped(img, y - 1, x + 1) + 2.0 * clamped(img, y, x + 1) +
                         clamped(img, y + 1, x + 1)) -
                        (clamped(img, y - 1, x - 1) + 2.0 * clamped(img, y, x - 1) +
                         clamped(img, y + 1, x - 1));
      const double gy = (clamped(img, y + 1, x - 1) + 2.0 * clamped(img, y + 1, x) +
                         clamped(img, y + 1, x + 1)) -
                        (clamped(img, y - 1, x - 1) + 2.0 * clamped(img, y - 1, x) +
                         clamped(img, y - 1, x + 1));
      if (std::sqrt(gx * gx + gy * gy) > kEdgeThreshold) ++count;
    }
  }
  return static_cast<double>(count);
}

// Radial amplitude-weighted centroid of the 2-D spectrum, DC excluded so
// constant images sit at 0. Half-spectrum bins are weighted by their
// full-spectrum multiplicity.
double fourier_centroid(const StimulusImage& img) {
  const int h = img.height, w = img.width;
  const auto spec = fft::rfft2(img.pixels, h, w);
  const int half_w = w / 2 + 1;
  double num = 0.0, den = 0.0;
  for (int ky = 0; ky < h; ++ky) {
    const int fy = std::min(ky, h - ky);
    for (int kx = 0; kx < half_w; ++kx) {
      if (kx == 0 && ky == 0) continue;
      const double amp = std::abs(spec[static_cast<std::size_t>(ky) * half_w + kx]);
      const double weight = (kx == 0 || (w % 2 == 0 && kx == w / 2)) ? 1.0 : 2.0;
      const double r = std::sqrt(static_cast<double>(kx) * kx + static_cast<double>(fy) * fy);
      num += weight * r * amp;
      den += weight * amp;
    }
  }
  return den < 1e-12 ? 0.0 : num / den;
}

double histogram_skewness(const StimulusImage& img) {
  std::array<long long, 256> counts{};
  for (double p : img.pixels) {
    int bin = static_cast<int>(p * 256.0);
    bin = std::clamp(bin, 0, 255);
    ++counts[static_cast<std::size_t>(bin)];
  }
  const double n = static_cast<double>(img.pixels.size());
  double mean = 0.0;
  for (int b = 0; b < 256; ++b) mean += counts[static_cast<std::size_t>(b)] * ((b + 0.5) / 256.0);
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (int b = 0; b < 256; ++b) {
    const double d = (b + 0.5) / 256.0 - mean;
    const double c = static_cast<double>(counts[static_cast<std::size_t>(b)]);
    m2 += c * d * d;
    m3 += c * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 < 1e-12) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

StimulusImage reference_checker(int w, int h) {
  StimulusImage ref;
  ref.width = w;
  ref.height = h;
  ref.pixels.resize(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) ref.at(y, x) = static_cast<double>((x + y) % 2);
  return ref;
}

std::vector<std::array<double, 5>> standardize(const std::vector<FeatureVector>& features) {
  const std::size_t n = features.size();
  std::vector<std::array<double, 5>> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = features[i].as_array();

  std::vector<std::array<double, 5>> out(n);
  for (int dim = 0; dim < 5; ++dim) {
    double mean = 0.0;
    for (const auto& r : raw) mean += r[static_cast<std::size_t>(dim)];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& r : raw) {
      const double d = r[static_cast<std::size_t>(dim)] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) {
      out[i][static_cast<std::size_t>(dim)] =
          sd < 1e-12 ? 0.0 : (raw[i][static_cast<std::size_t>(dim)] - mean) / sd;
    }
  }
  return out;
}

std::vector<double> pairwise_distances(const std::vector<std::array<double, 5>>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) {
        const double diff = pts[i][static_cast<std::size_t>(k)] - pts[j][static_cast<std::size_t>(k)];
        acc += diff * diff;
      }
      const double dist = std::sqrt(acc);
      d[i * n + j] = dist;
      d[j * n + i] = dist;
    }
  }
  return d;
}

double subset_score(const std::vector<double>& dist, std::size_t n, const std::vector<int>& subset) {
  double s = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b)
      s += dist[static_cast<std::size_t>(subset[a]) * n + static_cast<std::size_t>(subset[b])];
  return s;
}

struct Best {
  double score = -1.0;
  std::vector<int> subset;

  // Strict improvement, or equal score with a lexicographically smaller set.
  void consider(double s, const std::vector<int>& c) {
    if (s > score || (s == score && !subset.empty() && c < subset)) {
      score = s;
      subset = c;
    }
  }
};

// Best k-subset among combinations whose first element is `first`.
Best exhaustive_block(const std::vector<double>& dist, std::size_t n, int k, int first) {
  Best best;
  std::vector<int> comb(static_cast<std::size_t>(k));
  comb[0] = first;
  std::iota(comb.begin() + 1, comb.end(), first + 1);
  while (true) {
    best.consider(subset_score(dist, n, comb), comb);
    // advance only positions after the pinned first element
    bool advanced = false;
    for (int i = k - 1; i >= 1; --i) {
      if (comb[static_cast<std::size_t>(i)] < static_cast<int>(n) - k + i) {
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
          comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return best;
}

std::vector<int> exhaustive_select(const std::vector<double>& dist, std::size_t n, int k,
                                   int workers) {
  const int n_first = static_cast<int>(n) - k + 1;
  std::vector<Best> by_first(static_cast<std::size_t>(n_first));
  if (workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (int first = 0; first < n_first; ++first)
      by_first[static_cast<std::size_t>(first)] = exhaustive_block(dist, n, k, first);
  } else {
    for (int first = 0; first < n_first; ++first)
      by_first[static_cast<std::size_t>(first)] = exhaustive_block(dist, n, k, first);
  }
  // Merging in first-element order reproduces the serial lexicographic scan.
  Best best;
  for (const Best& b : by_first) best.consider(b.score, b.subset);
  return best.subset;
}

std::vector<int> greedy_select(const std::vector<double>& dist, std::size_t n, int k) {
  // Seed with the farthest pair (lexicographically first among ties).
  int seed_a = 0, seed_b = 1;
  double best_d = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist[i * n + j] > best_d) {
        best_d = dist[i * n + j];
        seed_a = static_cast<int>(i);
        seed_b = static_cast<int>(j);
      }
    }
  }
  std::vector<int> selected = {seed_a, seed_b};
  std::vector<bool> in(n, false);
  in[static_cast<std::size_t>(seed_a)] = in[static_cast<std::size_t>(seed_b)] = true;
  while (static_cast<int>(selected.size()) < k) {
    int best_idx = -1;
    double best_gain = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (in[c]) continue;
      double gain = 0.0;
      for (int s : selected) gain += dist[c * n + static_cast<std::size_t>(s)];
      if (gain > best_gain) {
        best_gain = gain;
        best_idx = static_cast<int>(c);
      }
    }
    selected.push_back(best_idx);
    in[static_cast<std::size_t>(best_idx)] = true;
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / i;
    if (c > 1e18) return c;  // plenty beyond any threshold of interest
  }
  return c;
}

}  // namespace

double haar_hf_energy(const StimulusImage& img) {
  double energy = 0.0;
  for (int by = 0; by + 1 < img.height; by += 2) {
    for (int bx = 0; bx + 1 < img.width; bx += 2) {
      const double a = img.at(by, bx);
      const double b = img.at(by, bx + 1);
      const double c = img.at(by + 1, bx);
      const double d = img.at(by + 1, bx + 1);
      const double lh = (a - b + c - d) * 0.5;
      const double hl = (a + b - c - d) * 0.5;
      const double hh = (a - b - c + d) * 0.5;
      energy += lh * lh + hl * hl + hh * hh;
    }
  }
  return energy;
}

FeatureVector precheck_features(const StimulusImage& img) {
  FeatureVector f;
  const double n = static_cast<double>(img.pixels.size());
  double mean = 0.0;
  for (double p : img.pixels) mean += p;
  mean /= n;
  double var = 0.0;
  for (double p : img.pixels) var += (p - mean) * (p - mean);
  f.pixel_std = std::sqrt(var / n);
  f.edge_count = sobel_edge_count(img);
  f.haar_hf_energy = haar_hf_energy(img);
  f.mean_fourier_freq = fourier_centroid(img);
  f.hist_skewness = histogram_skewness(img);
  return f;
}

SubjectFeatures subject_features(const StimulusImage& img) {
  SubjectFeatures s;
  double mean = 0.0;
  for (double p : img.pixels) mean += p;
  s.luminance = mean / static_cast<double>(img.pixels.size());
  const double e_ref = haar_hf_energy(reference_checker(img.width, img.height));
  s.complexity = e_ref <= 0.0 ? 0.0 : std::min(1.0, haar_hf_energy(img) / e_ref);
  return s;
}

std::vector<int> select_diverse(const std::vector<FeatureVector>& features, int k, SelectMode mode,
                                int workers) {
  const int n = static_cast<int>(features.size());
  if (k < 2) throw std::invalid_argument("select_diverse: k must be >= 2");
  if (n < k) throw std::invalid_argument("select_diverse: fewer candidates than k");
  if (n == k) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  const auto pts = standardize(features);
  const auto dist = pairwise_distances(pts);
  if (mode == SelectMode::kAuto)
    mode = binomial(n, k) <= 5e6 ? SelectMode::kExhaustive : SelectMode::kGreedy;
  if (mode == SelectMode::kExhaustive)
    return exhaustive_select(dist, static_cast<std::size_t>(n), k, workers);
  return greedy_select(dist, static_cast<std::size_t>(n), k);
}

double subset_distance_sum(const std::vector<FeatureVector>& features,
                           const std::vector<int>& subset) {
  const auto pts = standardize(features);
  const auto dist = pairwise_distances(pts);
  return subset_score(dist, features.size(), subset);
}

}  // namespace veploop::imfeat
