// Drives the command-line tool end to end.
#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "pcs/image.hpp"
#include "support/test_util.hpp"

namespace {

using pcs::testing::TempDir;
using pcs::testing::read_bytes;

int run(const std::string& args, const std::filesystem::path& stdout_file = "/dev/null") {
  const std::string cmd =
      std::string(PCS_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string crop_input(const TempDir& dir) {
  const auto img = pcs::testing::crop(pcs::load_image(pcs::testing::data_path("cameraman256.pgm")), 64, 64, 48, 32);
  const auto path = dir / "crop.pgm";
  pcs::save_image(img, path);
  return path.string();
}

TEST(Cli, SenseReconstructEvaluate) {
  TempDir dir;
  const std::string input = crop_input(dir);
  const auto msr = dir / "m.bin";
  const auto out = dir / "r.pgm";
  ASSERT_EQ(run("sense --input " + input + " --ratio 0.3 --seed 2 --out " + msr.string()), 0);
  ASSERT_EQ(run("reconstruct --measurements " + msr.string() + " --method l1 --out " + out.string()), 0);
  const auto rec = pcs::load_image(out);
  EXPECT_EQ(rec.width, 48u);
  EXPECT_EQ(rec.height, 32u);
  ASSERT_EQ(run("evaluate --reference " + input + " --test " + out.string(), dir / "eval.txt"), 0);
  const std::string text = read_bytes(dir / "eval.txt");
  EXPECT_EQ(text.rfind("psnr_db,", 0), 0u);
  EXPECT_NE(text.find("\nssim,"), std::string::npos);
}

TEST(Cli, EvaluateIdenticalPrintsInf) {
  TempDir dir;
  const std::string input = crop_input(dir);
  ASSERT_EQ(run("evaluate --reference " + input + " --test " + input, dir / "eval.txt"), 0);
  EXPECT_EQ(read_bytes(dir / "eval.txt"), "psnr_db,inf\nssim,1.000000\n");
}

TEST(Cli, WeightsGolden) {
  TempDir dir;
  ASSERT_EQ(run("weights --block 4 --rvd 4 --pic-h 512", dir / "w.csv"), 0);
  EXPECT_EQ(read_bytes(dir / "w.csv"),
            "0.972504913,0.853660138,0.972504913,0.816889835\n"
            "0.853660138,0.957614935,0.949773588,0.782453075\n"
            "0.972504913,0.949773588,0.851813824,0.685346401\n"
            "0.816889835,0.782453075,0.685346401,0.549256623\n");
}

TEST(Cli, WeightsFileFeedsReconstruction) {
  TempDir dir;
  const std::string input = crop_input(dir);
  ASSERT_EQ(run("weights --out " + (dir / "w.csv").string()), 0);
  ASSERT_EQ(run("sense --input " + input + " --ratio 0.2 --out " + (dir / "m.bin").string()), 0);
  ASSERT_EQ(run("reconstruct --measurements " + (dir / "m.bin").string() + " --weights-file " +
                (dir / "w.csv").string() + " --out " + (dir / "a.pgm").string()), 0);
  ASSERT_EQ(run("reconstruct --measurements " + (dir / "m.bin").string() + " --out " + (dir / "b.pgm").string()),
            0);
  // The default geometry is what the weights file was written from.
  EXPECT_EQ(pcs::load_image(dir / "a.pgm"), pcs::load_image(dir / "b.pgm"));
}

TEST(Cli, SweepWritesCsv) {
  TempDir dir;
  const std::string input = crop_input(dir);
  const auto csv = dir / "s.csv";
  ASSERT_EQ(run("sweep --input " + input + " --ratios 0.1,0.2 --seeds 1 --methods l1,omp --image-id cam --out " +
                csv.string() + " --save-dir " + (dir / "imgs").string()), 0);
  std::istringstream lines(read_bytes(csv));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "image,method,ratio,seed,psnr_db,ssim,wall_time_s,failed_blocks");
  int rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.rfind("cam,", 0), 0u);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(std::filesystem::exists(dir / "imgs" / "cam_omp_r0.2_s1.pgm"));
}

TEST(Cli, ErrorsExitNonZero) {
  TempDir dir;
  EXPECT_NE(run("sense --input /nonexistent.pgm --out " + (dir / "m.bin").string()), 0);
  EXPECT_NE(run("reconstruct --measurements /nonexistent.bin --out " + (dir / "x.pgm").string()), 0);
  EXPECT_NE(run("reconstruct --measurements x --method lasso --out y"), 0);
  EXPECT_NE(run("sense --input " + crop_input(dir) + " --ratio 1.0 --out " + (dir / "m.bin").string()), 0);
  EXPECT_NE(run(""), 0);
}

}  // namespace
