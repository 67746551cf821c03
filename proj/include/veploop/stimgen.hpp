#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "veploop/rng.hpp"

namespace veploop {

/// Latent genome evolved by the loop; entries are dimensionless reals.
using LatentVector = std::vector<double>;

namespace stimgen {

struct GeneratorConfig {
  int latent_dim = 100;
  int width = 64;   // pixels
  int height = 64;
  std::uint64_t projection_seed = 2024;
  double stripe_freq_min = 1.0;  // cycles per image
  double stripe_freq_max = 16.0;
  int checker_min = 1;  // cells per image edge
  int checker_max = 16;
  double dot_density_max = 0.05;  // fraction of pixels

  void validate() const;  // throws std::invalid_argument with the field path
};

/// Interpretable rendering parameters decoded from a latent vector.
struct StimulusParams {
  double brightness = 0.0;              // [0,1]
  std::array<double, 3> mix_weights{};  // {uniform, stripes, checker}, sums to 1
  double stripe_freq = 0.0;             // cycles per image
  double stripe_orientation = 0.0;      // radians, [0, pi)
  int checker_cells = 1;
  double dot_density = 0.0;  // [0, dot_density_max]
  double dot_value = 0.0;    // [0,1]
};

struct StimulusImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major, values in [0,1]

  double at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Frozen procedural generator: latent -> params -> image. The parameter
/// projection matrix and the dot placement field are fixed by projection_seed
/// at construction and never change during a run, so the latent-to-image map
/// is a pure function. Decoding squashes zero-bias linear projections of z
/// (logistic for scalars, softmax for the mix), which keeps the map continuous
/// in z and centered at interior parameter values for z = 0.
class Generator {
 public:
  explicit Generator(GeneratorConfig cfg);

  const GeneratorConfig& config() const { return cfg_; }

  LatentVector sample_latent(RngStream& rng) const;
  StimulusParams decode_params(const LatentVector& z) const;
  StimulusImage render(const StimulusParams& params) const;
  StimulusImage render_latent(const LatentVector& z) const;

  /// Raw projection of z onto parameter row `row` (zero bias). Exposed so
  /// tests can steer a single parameter along its projection direction.
  double project(int row, const LatentVector& z) const;

  static constexpr int kRowBrightness = 0;
  static constexpr int kRowMixUniform = 1;
  static constexpr int kRowMixStripes = 2;
  static constexpr int kRowMixChecker = 3;
  static constexpr int kRowStripeFreq = 4;
  static constexpr int kRowOrientation = 5;
  static constexpr int kRowChecker = 6;
  static constexpr int kRowDotDensity = 7;
  static constexpr int kRowDotValue = 8;
  static constexpr int kNumRows = 9;

 private:
  GeneratorConfig cfg_;
  std::vector<double> projection_;  // kNumRows x latent_dim, row-major
  std::vector<double> dot_field_;   // height x width, values in [0,1)
};

// 8-bit binary PGM (P5), row-major, byte = round(pixel * 255).
void write_pgm(const StimulusImage& img, const std::filesystem::path& path);
StimulusImage read_pgm(const std::filesystem::path& path);

}  // namespace stimgen
}  // namespace veploop
