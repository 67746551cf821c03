#include "veploop/stimgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace veploop::stimgen {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Square-wave parity of floor(v), safe for negative phase.
double parity(double v) {
  const long long f = static_cast<long long>(std::floor(v));
  return static_cast<double>(((f % 2) + 2) % 2);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (latent_dim < 1) throw std::invalid_argument("generator.latent_dim: must be >= 1");
  if (width < 8) throw std::invalid_argument("generator.width: must be >= 8");
  if (height < 8) throw std::invalid_argument("generator.height: must be >= 8");
  if (!(stripe_freq_min > 0.0) || !(stripe_freq_min < stripe_freq_max))
    throw std::invalid_argument("generator.stripe_freq_min/max: range must be positive and non-degenerate");
  if (checker_min < 1 || checker_min >= checker_max)
    throw std::invalid_argument("generator.checker_min/max: range must be non-degenerate with min >= 1");
  if (dot_density_max < 0.0 || dot_density_max > 0.05)
    throw std::invalid_argument("generator.dot_density_max: must be in [0, 0.05]");
}

Generator::Generator(GeneratorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const int d = cfg_.latent_dim;

  RngStream proj_rng = RngStream(cfg_.projection_seed).substream({stream::kProjection});
  projection_.resize(static_cast<std::size_t>(kNumRows) * d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& w : projection_) w = scale * proj_rng.normal();

  // Latent-independent dot placement field: thresholding it by dot_density
  // makes dot coverage vary smoothly as the latent moves.
  RngStream dot_rng = RngStream(cfg_.projection_seed).substream({stream::kDotField});
  dot_field_.resize(static_cast<std::size_t>(cfg_.width) * cfg_.height);
  for (double& v : dot_field_) v = dot_rng.uniform();
}

LatentVector Generator::sample_latent(RngStream& rng) const {
  LatentVector z(static_cast<std::size_t>(cfg_.latent_dim));
  for (double& v : z) v = rng.normal();
  return z;
}

double Generator::project(int row, const LatentVector& z) const {
  const int d = cfg_.latent_dim;
  if (static_cast<int>(z.size()) != d)
    throw std::invalid_argument("decode_params: latent length " + std::to_string(z.size()) +
                                " does not match generator.latent_dim " + std::to_string(d));
  const double* w = projection_.data() + static_cast<std::size_t>(row) * d;
  double acc = 0.0;
  for (int i = 0; i < d; ++i) acc += w[i] * z[static_cast<std::size_t>(i)];
  return acc;
}

StimulusParams Generator::decode_params(const LatentVector& z) const {
  StimulusParams p;
  p.brightness = logistic(project(kRowBrightness, z));

  const double m0 = project(kRowMixUniform, z);
  const double m1 = project(kRowMixStripes, z);
  const double m2 = project(kRowMixChecker, z);
  const double mx = std::max({m0, m1, m2});
  const double e0 = std::exp(m0 - mx);
  const double e1 = std::exp(m1 - mx);
  const double e2 = std::exp(m2 - mx);
  const double es = e0 + e1 + e2;
  p.mix_weights = {e0 / es, e1 / es, e2 / es};

  p.stripe_freq = cfg_.stripe_freq_min +
                  (cfg_.stripe_freq_max - cfg_.stripe_freq_min) * logistic(project(kRowStripeFreq, z));
  p.stripe_orientation = kPi * logistic(project(kRowOrientation, z));

  const double cells = cfg_.checker_min +
                       (cfg_.checker_max - cfg_.checker_min) * logistic(project(kRowChecker, z));
  p.checker_cells = std::clamp(static_cast<int>(std::llround(cells)), cfg_.checker_min, cfg_.checker_max);

  p.dot_density = cfg_.dot_density_max * logistic(project(kRowDotDensity, z));
  p.dot_value = logistic(project(kRowDotValue, z));
  return p;
}

StimulusImage Generator::render(const StimulusParams& p) const {
  StimulusImage img;
  img.width = cfg_.width;
  img.height = cfg_.height;
  img.pixels.resize(static_cast<std::size_t>(cfg_.width) * cfg_.height);

  const double co = std::cos(p.stripe_orientation);
  const double si = std::sin(p.stripe_orientation);
  std::size_t idx = 0;
  for (int y = 0; y < cfg_.height; ++y) {
    const double ny = (y + 0.5) / cfg_.height;
    for (int x = 0; x < cfg_.width; ++x, ++idx) {
      const double nx = (x + 0.5) / cfg_.width;
      const double stripe = parity(2.0 * p.stripe_freq * (nx * co + ny * si));
      const int cx = static_cast<int>(std::floor(nx * p.checker_cells));
      const int cy = static_cast<int>(std::floor(ny * p.checker_cells));
      const double check = static_cast<double>((cx + cy) % 2);
      double v = p.brightness *
                 (p.mix_weights[0] + p.mix_weights[1] * stripe + p.mix_weights[2] * check);
      if (dot_field_[idx] < p.dot_density) v = p.dot_value;
      img.pixels[idx] = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

StimulusImage Generator::render_latent(const LatentVector& z) const { return render(decode_params(z)); }

void write_pgm(const StimulusImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> bytes(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double v = std::clamp(img.pixels[i], 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

// Next PGM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok;
}

}  // namespace

StimulusImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  if (next_token(in) != "P5") throw std::runtime_error("not a binary PGM (P5): " + path.string());
  const int w = std::stoi(next_token(in));
  const int h = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (w < 1 || h < 1) throw std::runtime_error("bad PGM dimensions: " + path.string());
  if (maxval < 1 || maxval > 255) throw std::runtime_error("unsupported PGM maxval: " + path.string());
  StimulusImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(w) * h);
  std::vector<unsigned char> bytes(img.pixels.size());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw std::runtime_error("truncated PGM raster: " + path.string());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    img.pixels[i] = static_cast<double>(bytes[i]) / maxval;
  return img;
}

}  // namespace veploop::stimgen
