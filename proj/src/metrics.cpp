#include "pcs/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pcs {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void require_same_size(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("image dimensions differ: " + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                std::to_string(b.height));
  }
  if (a.samples.empty()) throw std::invalid_argument("empty image");
}

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

// Separable "valid" filtering of f(a, b) with the normalized window.
template <typename F>
std::vector<double> filter_valid(const GrayImage& a, const GrayImage& b, F f,
                                 const std::array<double, kWindow>& taps) {
  const std::size_t out_w = a.width - kWindow + 1;
  const std::size_t out_h = a.height - kWindow + 1;
  std::vector<double> rows(out_w * a.height);
  for (std::size_t r = 0; r < a.height; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * f(a.at(r, c + k), b.at(r, c + k));
      rows[r * out_w + c] = acc;
    }
  }
  std::vector<double> out(out_w * out_h);
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * rows[(r + k) * out_w + c];
      out[r * out_w + c] = acc;
    }
  }
  return out;
}

}  // namespace

double mse(const GrayImage& reference, const GrayImage& test) {
  require_same_size(reference, test);
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    const double d = reference.samples[i] - test.samples[i];
    acc += d * d;
  }
  return acc / static_cast<double>(reference.samples.size());
}

double psnr(const GrayImage& reference, const GrayImage& test) {
  const double e = mse(reference, test);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / e);
}

double ssim(const GrayImage& reference, const GrayImage& test) {
  require_same_size(reference, test);
  if (reference.width < kWindow || reference.height < kWindow) {
    throw std::invalid_argument("ssim needs images of at least 11x11 pixels");
  }
  const auto taps = gaussian_taps();
  const auto mu_a = filter_valid(reference, test, [](double a, double) { return a; }, taps);
  const auto mu_b = filter_valid(reference, test, [](double, double b) { return b; }, taps);
  const auto aa = filter_valid(reference, test, [](double a, double) { return a * a; }, taps);
  const auto bb = filter_valid(reference, test, [](double, double b) { return b * b; }, taps);
  const auto ab = filter_valid(reference, test, [](double a, double b) { return a * b; }, taps);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = aa[i] - ma * ma;
    const double var_b = bb[i] - mb * mb;
    const double cov = ab[i] - ma * mb;
    total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
             ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
  }
  return total / static_cast<double>(mu_a.size());
}

QualityReport evaluate(const GrayImage& reference, const GrayImage& test) {
  QualityReport q;
  q.mse = mse(reference, test);
  q.psnr_db = q.mse == 0.0 ? std::numeric_limits<double>::infinity()
                           : 10.0 * std::log10(255.0 * 255.0 / q.mse);
  q.ssim = ssim(reference, test);
  return q;
}

std::string format_metric(double value, int decimals) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace pcs
