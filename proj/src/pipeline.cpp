#include "pcs/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "pcs/dct.hpp"
#include "pcs/metrics.hpp"

namespace pcs {

namespace {

unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

// Runs body(i) for i in [0, count) on `threads` workers. The first exception
// thrown by any worker is rethrown after all workers have joined.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void validate_job(const ReconstructionJob& job) {
  const MeasurementSet& set = job.measurements;
  if (set.block_size < 2 || set.n != set.block_size * set.block_size) {
    throw std::invalid_argument("measurement set has inconsistent block geometry");
  }
  if (set.measurements.size() != set.expected_block_count()) {
    throw std::invalid_argument("measurement set has " + std::to_string(set.measurements.size()) +
                                " blocks, image geometry needs " +
                                std::to_string(set.expected_block_count()));
  }
  for (const auto& y : set.measurements) {
    if (static_cast<std::size_t>(y.size()) != set.m) {
      throw std::invalid_argument("measurement vector length differs from M");
    }
  }
  if (job.weights && job.weights->block_size != set.block_size) {
    throw std::invalid_argument("weights block size does not match measurements");
  }
  job.solver.validate();
}

}  // namespace

Reconstruction reconstruct(const ReconstructionJob& job) {
  validate_job(job);
  const MeasurementSet& set = job.measurements;

  const SensingMatrix phi = generate_sensing_matrix(set.m, set.n, set.seed);
  const Dct2Basis basis = build_basis(set.block_size);
  const Eigen::MatrixXd theta = phi.entries * basis.matrix;

  std::optional<CsfWeights> weights = job.weights;
  if (job.solver.method == Method::weighted_l1 && !weights) {
    weights = build_csf_weights(set.block_size, set.geometry);
  }
  const Eigen::VectorXd* w_inv = weights ? &weights->w_inv : nullptr;

  const std::size_t count = set.measurements.size();
  std::vector<Eigen::VectorXd> coefficients(count);
  std::vector<BlockOutcome> outcomes(count);

  parallel_for(count, resolve_threads(job.threads, count), [&](std::size_t i) {
    BlockOutcome& outcome = outcomes[i];
    try {
      const SolveReport report = solve(theta, set.measurements[i], job.solver, w_inv);
      coefficients[i] = report.coefficients;
      outcome.converged = report.converged;
      outcome.iterations = report.iterations_used;
      outcome.residual_norm = report.residual_norm;
    } catch (const SolverError& e) {
      outcome.error = e.what();
      if (e.partial()) {
        coefficients[i] = e.partial()->coefficients;
        outcome.iterations = e.partial()->iterations_used;
        outcome.residual_norm = e.partial()->residual_norm;
      } else {
        coefficients[i] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.n));
        outcome.residual_norm = set.measurements[i].norm();
      }
    }
  });

  BlockGrid grid;
  grid.block_size = set.block_size;
  grid.original_width = set.width;
  grid.original_height = set.height;
  grid.padded_width = tiles_for(set.width, set.block_size) * set.block_size;
  grid.padded_height = tiles_for(set.height, set.block_size) * set.block_size;
  grid.blocks.reserve(count);
  for (const auto& s : coefficients) grid.blocks.push_back(devectorize(basis.matrix * s, set.block_size));

  Reconstruction out;
  out.image = clip(reassemble(grid));
  out.blocks = std::move(outcomes);
  for (const auto& b : out.blocks) {
    if (!b.converged) ++out.failed_blocks;
  }
  return out;
}

std::vector<SweepRow> sweep(const GrayImage& img, const SweepOptions& options) {
  if (options.methods.empty() || options.ratios.empty() || options.seeds.empty()) {
    throw std::invalid_argument("nothing to run");
  }
  const CsfWeights weights =
      options.weights ? *options.weights : build_csf_weights(options.block_size, options.geometry);

  std::vector<SweepRow> rows;
  rows.reserve(options.ratios.size() * options.seeds.size() * options.methods.size());
  for (double ratio : options.ratios) {
    for (std::uint64_t seed : options.seeds) {
      ReconstructionJob job;
      job.measurements = sense_image(img, options.block_size, ratio, seed, options.geometry);
      job.weights = weights;
      job.threads = options.threads;
      const std::uint64_t digest = measurement_digest(job.measurements);

      for (Method method : options.methods) {
        job.solver = options.solver;
        job.solver.method = method;

        const auto start = std::chrono::steady_clock::now();
        const Reconstruction rec = reconstruct(job);
        const auto stop = std::chrono::steady_clock::now();

        const GrayImage shown = quantize(rec.image);
        const QualityReport quality = evaluate(img, shown);

        SweepRow row;
        row.image = options.image_id;
        row.method = method;
        row.ratio = ratio;
        row.seed = seed;
        row.psnr_db = quality.psnr_db;
        row.ssim = quality.ssim;
        row.wall_time_s = std::chrono::duration<double>(stop - start).count();
        row.failed_blocks = rec.failed_blocks;
        row.measurement_digest = digest;
        rows.push_back(row);
        if (options.on_row) options.on_row(row);
        if (options.on_image) options.on_image(row, shown);
      }
    }
  }
  return rows;
}

std::string format_sweep_row(const SweepRow& row) {
  char ratio[32], wall[32];
  std::snprintf(ratio, sizeof ratio, "%g", row.ratio);
  std::snprintf(wall, sizeof wall, "%.3f", row.wall_time_s);
  return row.image + ',' + std::string(method_name(row.method)) + ',' + ratio + ',' +
         std::to_string(row.seed) + ',' + format_metric(row.psnr_db) + ',' + format_metric(row.ssim) +
         ',' + wall + ',' + std::to_string(row.failed_blocks);
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const auto& row : rows) out << format_sweep_row(row) << '\n';
}

}  // namespace pcs
