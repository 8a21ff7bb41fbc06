#ifndef PCS_CSF_HPP
#define PCS_CSF_HPP

#include <cstddef>
#include <filesystem>
#include <ostream>

#include <Eigen/Dense>

namespace pcs {

/// Viewing conditions that map DCT indices to cycles per degree.
///
/// `r_vd` is the viewing distance divided by the picture height and
/// `pic_h` is the picture height in pixels. Square pixels are assumed, so a
/// single visual angle serves both axes.
struct ViewingGeometry {
  // Default viewing condition: a 1080-line HD display watched from three
  // picture heights. The picture whose height defines r_vd is the screen the
  // image is shown on, not the image itself.
  static constexpr double default_r_vd = 3.0;
  static constexpr double default_pic_h = 1080.0;

  double r_vd = default_r_vd;
  double pic_h = default_pic_h;

  /// Visual angle subtended by one pixel, in degrees.
  double theta_deg() const;

  /// Recommended subjective-viewing range is 3 <= r_vd <= 6. Outside it the
  /// weights are still defined; callers may warn.
  bool in_recommended_range() const { return r_vd >= 3.0 && r_vd <= 6.0; }

  bool operator==(const ViewingGeometry&) const = default;
};

/// theta = 2 atan(1 / (2 r_vd pic_h)), returned in degrees.
double visual_angle(double r_vd, double pic_h);

/// Band-pass contrast sensitivity
/// H(f) = 2.6 (0.0192 + 0.114 f) exp(-(0.114 f)^1.1), f in cycles/degree.
double csf_value(double f);

/// Spatial frequency of DCT index pair (i, j) for a B x B block:
/// f = sqrt((i / theta)^2 + (j / theta)^2) / (2B), theta in degrees.
double spatial_frequency(std::size_t i, std::size_t j, std::size_t block_size,
                         const ViewingGeometry& geom);

/// Inverse weights over the B x B DCT grid.
///
/// `h` holds the CSF sensitivity per frequency with the DC entry raised to
/// the largest AC value. `w_inv` is vectorize(h) and `w` its reciprocal; a
/// weighted solve penalizes coefficient t by w[t].
struct CsfWeights {
  std::size_t block_size = 0;
  Eigen::MatrixXd h;
  Eigen::VectorXd w_inv;
  Eigen::VectorXd w;

  /// Wraps an arbitrary positive B x B inverse-weight matrix (for example a
  /// table-derived baseline). No CSF structure is implied.
  static CsfWeights from_inverse_matrix(const Eigen::MatrixXd& h);

  /// All-ones weights; a weighted solve then reduces to plain l1.
  static CsfWeights uniform(std::size_t block_size);
};

CsfWeights build_csf_weights(std::size_t block_size, const ViewingGeometry& geom);

/// B rows of B comma-separated values, 9 significant digits.
void write_weights_csv(const Eigen::MatrixXd& h, std::ostream& out);
void write_weights_csv(const Eigen::MatrixXd& h, const std::filesystem::path& path);
Eigen::MatrixXd read_weights_csv(const std::filesystem::path& path);

}  // namespace pcs

#endif  // PCS_CSF_HPP
