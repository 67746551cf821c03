#pragma once

#include <array>
#include <vector>

#include "veploop/stimgen.hpp"

namespace veploop::imfeat {

using stimgen::StimulusImage;

/// Pre-check descriptor driving the diversity selection.
struct FeatureVector {
  double pixel_std = 0.0;
  double edge_count = 0.0;         // pixels with Sobel magnitude above threshold
  double haar_hf_energy = 0.0;     // one-level LH+HL+HH energy
  double mean_fourier_freq = 0.0;  // radial amplitude centroid, cycles/image
  double hist_skewness = 0.0;

  std::array<double, 5> as_array() const {
    return {pixel_std, edge_count, haar_hf_energy, mean_fourier_freq, hist_skewness};
  }
};

/// Inputs to the simulated subject.
struct SubjectFeatures {
  double luminance = 0.0;   // [0,1]
  double complexity = 0.0;  // [0,1]
};

/// Sobel gradient magnitude threshold on [0,1] images.
inline constexpr double kEdgeThreshold = 0.25;

FeatureVector precheck_features(const StimulusImage& img);

/// Sum of squared LH, HL, HH coefficients of a one-level 2-D Haar
/// decomposition (orthonormal 2x2 blocks; odd trailing row/column dropped).
double haar_hf_energy(const StimulusImage& img);

/// L = mean pixel. C = haar_hf_energy relative to the full-contrast 1-pixel
/// checkerboard at the same resolution, capped at 1 (self-calibrating).
SubjectFeatures subject_features(const StimulusImage& img);

enum class SelectMode { kExhaustive, kGreedy, kAuto };

/// Sorted indices of the k candidates maximizing the summed pairwise Euclidean
/// distance after per-dimension z-scoring (zero-variance dimensions contribute
/// nothing). Exhaustive search is exact with ties broken toward the
/// lexicographically smallest index set; greedy seeds with the farthest pair.
/// kAuto picks exhaustive when C(n,k) <= 5e6. Any worker count returns exactly
/// the single-worker result.
std::vector<int> select_diverse(const std::vector<FeatureVector>& features, int k,
                                SelectMode mode = SelectMode::kAuto, int workers = 1);

/// Distance-sum the selection assigns to a subset, under the same
/// standardization select_diverse uses.
double subset_distance_sum(const std::vector<FeatureVector>& features,
                           const std::vector<int>& subset);

}  // namespace veploop::imfeat
