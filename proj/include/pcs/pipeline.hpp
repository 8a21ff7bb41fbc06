#ifndef PCS_PIPELINE_HPP
#define PCS_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pcs/csf.hpp"
#include "pcs/image.hpp"
#include "pcs/sensing.hpp"
#include "pcs/solvers.hpp"

namespace pcs {

struct ReconstructionJob {
  MeasurementSet measurements;
  SolverConfig solver;
  /// Inverse weights for weighted_l1; built from the measurement geometry
  /// when absent.
  std::optional<CsfWeights> weights;
  /// Worker threads for block solves; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct BlockOutcome {
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::string error;  // non-empty when the solver threw
};

struct Reconstruction {
  /// Reassembled, cropped and clipped to [0, 255]; not yet rounded.
  GrayImage image;
  std::vector<BlockOutcome> blocks;
  std::size_t failed_blocks = 0;
};

/// Solves every block with the configured method. Blocks that do not meet
/// the feasibility tolerance keep their best iterate and are counted in
/// `failed_blocks`. The output does not depend on the thread count.
Reconstruction reconstruct(const ReconstructionJob& job);

struct SweepRow {
  std::string image;
  Method method = Method::l1;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double wall_time_s = 0.0;
  std::size_t failed_blocks = 0;
  /// Digest of the measurements this row was reconstructed from.
  std::uint64_t measurement_digest = 0;
};

struct SweepOptions {
  std::string image_id = "image";
  std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<Method> methods{Method::l1, Method::weighted_l1};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t block_size = 16;
  ViewingGeometry geometry;
  SolverConfig solver;
  std::optional<CsfWeights> weights;
  unsigned threads = 0;
  /// Called as each row completes, in output order.
  std::function<void(const SweepRow&)> on_row;
  /// Called with each (rounded) reconstruction alongside its row.
  std::function<void(const SweepRow&, const GrayImage&)> on_image;
};

/// Rows are ordered ratio-major, then seed, then method. All methods in one
/// (ratio, seed) cell reconstruct from the same acquisition.
std::vector<SweepRow> sweep(const GrayImage& img, const SweepOptions& options);

inline constexpr const char* kSweepCsvHeader =
    "image,method,ratio,seed,psnr_db,ssim,wall_time_s,failed_blocks";

std::string format_sweep_row(const SweepRow& row);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace pcs

#endif  // PCS_PIPELINE_HPP
