// Command-line front end: acquisition, reconstruction, evaluation, sweeps
// and weight inspection.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcs/csf.hpp"
#include "pcs/image.hpp"
#include "pcs/metrics.hpp"
#include "pcs/pipeline.hpp"
#include "pcs/sensing.hpp"
#include "pcs/solvers.hpp"

namespace fs = std::filesystem;

namespace {

void warn_geometry(const pcs::ViewingGeometry& geom) {
  if (!geom.in_recommended_range()) {
    std::cerr << "warning: r_vd = " << geom.r_vd
              << " is outside the usual 3..6 viewing-distance range\n";
  }
}

std::optional<pcs::CsfWeights> load_weights_file(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return pcs::CsfWeights::from_inverse_matrix(pcs::read_weights_csv(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-based compressive sensing with contrast-sensitivity weighting"};
  app.require_subcommand(1);

  // sense
  auto* sense = app.add_subcommand("sense", "Acquire Gaussian block measurements of a PGM image");
  std::string sense_input, sense_out;
  double sense_ratio = 0.2;
  std::uint64_t sense_seed = 1;
  std::size_t sense_block = 16;
  pcs::ViewingGeometry sense_geom;
  bool sense_full_rate = false;
  sense->add_option("--input", sense_input, "Input P5 PGM")->required();
  sense->add_option("--ratio", sense_ratio, "Measurements per pixel, M/N")->check(CLI::Range(0.0, 1.0));
  sense->add_option("--seed", sense_seed, "Sensing matrix seed");
  sense->add_option("--block", sense_block, "Block side B")->check(CLI::Range(2, 1024));
  sense->add_option("--rvd", sense_geom.r_vd, "Viewing distance / picture height");
  sense->add_option("--pic-h", sense_geom.pic_h, "Picture height in pixels");
  sense->add_flag("--test-full-rate", sense_full_rate, "Allow M == N (test harnesses only)")
      ->group("");
  sense->add_option("--out", sense_out, "Output measurement file")->required();

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "Reconstruct an image from a measurement file");
  std::string recon_input, recon_method = "weighted_l1", recon_weights, recon_out;
  unsigned recon_threads = 0;
  pcs::SolverConfig recon_cfg;
  recon->add_option("--measurements", recon_input, "Measurement file")->required();
  recon->add_option("--method", recon_method, "l1 | weighted_l1 | rwl1 | omp")
      ->check(CLI::IsMember({"l1", "weighted_l1", "rwl1", "omp"}));
  recon->add_option("--weights-file", recon_weights, "B x B CSV of inverse weights");
  recon->add_option("--epsilon", recon_cfg.epsilon, "Reweighting offset");
  recon->add_option("--rwl1-iterations", recon_cfg.rwl1_iterations, "Total l1 solves for rwl1");
  recon->add_option("--threads", recon_threads, "Worker threads (0 = all cores)");
  recon->add_option("--out", recon_out, "Output PGM")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "PSNR and SSIM of a test image against a reference");
  std::string eval_ref, eval_test;
  eval->add_option("--reference", eval_ref, "Reference PGM")->required();
  eval->add_option("--test", eval_test, "Test PGM")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Score methods over ratios and seeds");
  std::string sweep_input, sweep_out, sweep_weights, sweep_save_dir, sweep_id;
  std::vector<double> sweep_ratios{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::string> sweep_methods{"l1", "weighted_l1"};
  std::vector<std::uint64_t> sweep_seeds{1, 2, 3};
  std::size_t sweep_block = 16;
  pcs::ViewingGeometry sweep_geom;
  unsigned sweep_threads = 0;
  sweep->add_option("--input", sweep_input, "Input P5 PGM")->required();
  sweep->add_option("--ratios", sweep_ratios, "Comma-separated ratios")->delimiter(',');
  sweep->add_option("--methods", sweep_methods, "Comma-separated methods")
      ->delimiter(',')
      ->check(CLI::IsMember({"l1", "weighted_l1", "rwl1", "omp"}));
  sweep->add_option("--seeds", sweep_seeds, "Comma-separated seeds")->delimiter(',');
  sweep->add_option("--block", sweep_block, "Block side B")->check(CLI::Range(2, 1024));
  sweep->add_option("--rvd", sweep_geom.r_vd, "Viewing distance / picture height");
  sweep->add_option("--pic-h", sweep_geom.pic_h, "Picture height in pixels");
  sweep->add_option("--weights-file", sweep_weights, "B x B CSV of inverse weights");
  sweep->add_option("--image-id", sweep_id, "Image column value (default: input file stem)");
  sweep->add_option("--save-dir", sweep_save_dir, "Write each reconstruction here as PGM");
  sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");
  sweep->add_option("--out", sweep_out, "Output CSV")->required();

  // weights
  auto* weights = app.add_subcommand("weights", "Dump the CSF inverse-weight matrix as CSV");
  std::size_t weights_block = 16;
  pcs::ViewingGeometry weights_geom;
  std::string weights_out;
  weights->add_option("--block", weights_block, "Block side B")->check(CLI::Range(2, 1024));
  weights->add_option("--rvd", weights_geom.r_vd, "Viewing distance / picture height");
  weights->add_option("--pic-h", weights_geom.pic_h, "Picture height in pixels");
  weights->add_option("--out", weights_out, "Output CSV (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sense) {
      warn_geometry(sense_geom);
      const pcs::GrayImage img = pcs::load_image(sense_input);
      const auto set = pcs::sense_image(img, sense_block, sense_ratio, sense_seed, sense_geom,
                                        {.allow_full_rate = sense_full_rate});
      pcs::write_measurements(set, sense_out);
      std::cerr << "sensed " << set.measurements.size() << " blocks, M=" << set.m << " N=" << set.n << '\n';
    } else if (*recon) {
      pcs::ReconstructionJob job;
      job.measurements = pcs::read_measurements(recon_input);
      job.solver = recon_cfg;
      job.solver.method = pcs::parse_method(recon_method);
      job.weights = load_weights_file(recon_weights);
      job.threads = recon_threads;
      const pcs::Reconstruction rec = pcs::reconstruct(job);
      pcs::save_image(rec.image, recon_out);
      if (rec.failed_blocks) {
        std::cerr << "warning: " << rec.failed_blocks << " of " << rec.blocks.size()
                  << " blocks did not meet the feasibility tolerance\n";
      }
    } else if (*eval) {
      const auto q = pcs::evaluate(pcs::load_image(eval_ref), pcs::load_image(eval_test));
      std::cout << "psnr_db," << pcs::format_metric(q.psnr_db) << '\n'
                << "ssim," << pcs::format_metric(q.ssim) << '\n';
    } else if (*sweep) {
      warn_geometry(sweep_geom);
      const pcs::GrayImage img = pcs::load_image(sweep_input);
      pcs::SweepOptions options;
      options.image_id = sweep_id.empty() ? fs::path(sweep_input).stem().string() : sweep_id;
      options.ratios = sweep_ratios;
      options.seeds = sweep_seeds;
      options.methods.clear();
      for (const auto& m : sweep_methods) options.methods.push_back(pcs::parse_method(m));
      options.block_size = sweep_block;
      options.geometry = sweep_geom;
      options.weights = load_weights_file(sweep_weights);
      options.threads = sweep_threads;

      std::ofstream csv(sweep_out, std::ios::trunc);
      if (!csv) throw std::runtime_error("cannot write " + sweep_out);
      csv << pcs::kSweepCsvHeader << '\n' << std::flush;
      options.on_row = [&](const pcs::SweepRow& row) {
        csv << pcs::format_sweep_row(row) << '\n' << std::flush;
        std::cerr << pcs::format_sweep_row(row) << '\n';
      };
      if (!sweep_save_dir.empty()) {
        fs::create_directories(sweep_save_dir);
        options.on_image = [&](const pcs::SweepRow& row, const pcs::GrayImage& image) {
          char ratio[32];
          std::snprintf(ratio, sizeof ratio, "%g", row.ratio);
          const std::string name = row.image + "_" + std::string(pcs::method_name(row.method)) + "_r" +
                                   ratio + "_s" + std::to_string(row.seed) + ".pgm";
          pcs::save_image(image, fs::path(sweep_save_dir) / name);
        };
      }
      pcs::sweep(img, options);
    } else if (*weights) {
      warn_geometry(weights_geom);
      const auto w = pcs::build_csf_weights(weights_block, weights_geom);
      if (weights_out.empty()) {
        pcs::write_weights_csv(w.h, std::cout);
      } else {
        pcs::write_weights_csv(w.h, weights_out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
