#ifndef PCS_SENSING_HPP
#define PCS_SENSING_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pcs/csf.hpp"
#include "pcs/image.hpp"

namespace pcs {

/// Counter-based Gaussian stream, identified on disk as `kRngName`.
///
/// Uniform draw k is the k-th output of SplitMix64 started at `seed`:
///   z = seed + (k + 1) * 0x9E3779B97F4A7C15, followed by the standard
///   SplitMix64 finalizer, mapped to (0, 1] as ((z >> 11) + 1) * 2^-53.
/// Normal draw 2p and 2p + 1 come from uniforms (2p, 2p + 1) through the
/// Box-Muller transform (cosine branch first). Any draw can be computed
/// independently of the others.
class GaussianStream {
 public:
  static constexpr const char* kRngName = "splitmix64-boxmuller-v1";

  explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t raw(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;
  double normal(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

/// Dense Gaussian sensing matrix with i.i.d. Normal(0, 1/M) entries, drawn
/// row-major from a GaussianStream.
struct SensingMatrix {
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string scheme = "gaussian";
  Eigen::MatrixXd entries;
};

/// Requires 1 <= M <= N. Identical arguments give bit-identical matrices.
SensingMatrix generate_sensing_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

/// y = Phi * vectorize(block).
Eigen::VectorXd sense_block(const SensingMatrix& phi, const Eigen::MatrixXd& block);

/// Everything a reconstruction needs: geometry, sensing parameters and the
/// per-tile measurement vectors in tile order.
struct MeasurementSet {
  std::size_t block_size = 0;
  double ratio = 0.0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  ViewingGeometry geometry;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Eigen::VectorXd> measurements;

  std::size_t expected_block_count() const {
    return tiles_for(width, block_size) * tiles_for(height, block_size);
  }
};

/// M = max(1, round(ratio * N)), rounding half away from zero.
std::size_t measurement_count(double ratio, std::size_t n);

struct AcquisitionOptions {
  /// Permit M == N. Only test harnesses use this; acquisition is otherwise
  /// strictly compressive.
  bool allow_full_rate = false;
};

/// Acquires every tile with one shared Phi regenerated from `seed`.
MeasurementSet sense_image(const GrayImage& img, std::size_t block_size, double ratio,
                           std::uint64_t seed, const ViewingGeometry& geom,
                           const AcquisitionOptions& options = {});

class MeasurementFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Measurement file layout:
//   bytes 0..7   magic "PCSMSR01"
//   bytes 8..15  header length L, unsigned 64-bit little-endian
//   next L bytes UTF-8 JSON header
//   payload      block_count * M float64 values, little-endian, tile order
void write_measurements(const MeasurementSet& set, const std::filesystem::path& path);
MeasurementSet read_measurements(const std::filesystem::path& path);

/// In-memory form of the file above.
std::string encode_measurements(const MeasurementSet& set);
MeasurementSet decode_measurements(const std::string& bytes);

/// FNV-1a over the encoded payload; equal digests mean identical measurements.
std::uint64_t measurement_digest(const MeasurementSet& set);

}  // namespace pcs

#endif  // PCS_SENSING_HPP
