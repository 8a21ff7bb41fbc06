#ifndef PCS_METRICS_HPP
#define PCS_METRICS_HPP

#include <string>

#include "pcs/image.hpp"

namespace pcs {

struct QualityReport {
  double psnr_db = 0.0;  // +inf for identical images
  double ssim = 0.0;
  double mse = 0.0;
};

double mse(const GrayImage& reference, const GrayImage& test);

/// 10 log10(255^2 / MSE); +infinity when the images are identical.
double psnr(const GrayImage& reference, const GrayImage& test);

/// Mean SSIM over all positions where an 11 x 11 Gaussian window
/// (sigma 1.5) fits inside the image; K1 = 0.01, K2 = 0.03, L = 255.
double ssim(const GrayImage& reference, const GrayImage& test);

QualityReport evaluate(const GrayImage& reference, const GrayImage& test);

/// Decimal text for a metric value; infinities become "inf" / "-inf".
std::string format_metric(double value, int decimals = 6);

}  // namespace pcs

#endif  // PCS_METRICS_HPP
