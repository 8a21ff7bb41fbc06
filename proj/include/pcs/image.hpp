#ifndef PCS_IMAGE_HPP
#define PCS_IMAGE_HPP

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pcs {

/// Grayscale image held as real-valued samples in row-major order.
/// Samples loaded from disk are integers in [0, 255]; intermediate results
/// may carry any finite value until they are quantized.
struct GrayImage {
  static constexpr int bit_depth = 8;

  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> samples;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), samples(w * h, fill) {}

  double& at(std::size_t row, std::size_t col) { return samples[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return samples[row * width + col]; }

  bool operator==(const GrayImage&) const = default;
};

/// Tiles of a padded image. `blocks` are B x B and stored left-to-right,
/// top-to-bottom.
struct BlockGrid {
  std::size_t block_size = 0;
  std::size_t original_width = 0;
  std::size_t original_height = 0;
  std::size_t padded_width = 0;
  std::size_t padded_height = 0;
  std::vector<Eigen::MatrixXd> blocks;

  std::size_t tiles_x() const { return padded_width / block_size; }
  std::size_t tiles_y() const { return padded_height / block_size; }
};

class ImageError : public std::runtime_error {
 public:
  enum class Kind {
    missing_file,
    unsupported_format,
    malformed_header,
    unsupported_maxval,
    truncated_payload,
    unwritable_path,
    tile_mismatch,
  };

  ImageError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads a binary 8-bit PGM (P5, maxval 255). Header comments are skipped.
GrayImage load_image(const std::filesystem::path& path);

/// Writes a P5 PGM. Samples are rounded half away from zero and clipped.
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// Rounds half away from zero and clips to [0, 255]; what a viewer sees.
GrayImage quantize(const GrayImage& img);

/// Clips to [0, 255] without rounding.
GrayImage clip(const GrayImage& img);

/// Number of tiles per side for a dimension of `extent` pixels.
constexpr std::size_t tiles_for(std::size_t extent, std::size_t block_size) {
  return (extent + block_size - 1) / block_size;
}

/// Pads right/bottom by edge replication to multiples of B and cuts tiles.
BlockGrid partition(const GrayImage& img, std::size_t block_size);

/// Places tiles back and crops the padding.
GrayImage reassemble(const BlockGrid& grid);

}  // namespace pcs

#endif  // PCS_IMAGE_HPP
