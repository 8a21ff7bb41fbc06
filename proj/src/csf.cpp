#include "pcs/csf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcs/dct.hpp"

namespace pcs {

double visual_angle(double r_vd, double pic_h) {
  if (!(r_vd > 0.0)) throw std::invalid_argument("visual_angle: r_vd must be positive");
  if (!(pic_h >= 1.0)) throw std::invalid_argument("visual_angle: pic_h must be >= 1");
  const double radians = 2.0 * std::atan(1.0 / (2.0 * r_vd * pic_h));
  return radians * 180.0 / std::numbers::pi;
}

double ViewingGeometry::theta_deg() const { return visual_angle(r_vd, pic_h); }

double csf_value(double f) {
  if (!(f >= 0.0)) throw std::invalid_argument("csf_value: frequency must be non-negative");
  const double a = 0.114 * f;
  return 2.6 * (0.0192 + a) * std::exp(-std::pow(a, 1.1));
}

double spatial_frequency(std::size_t i, std::size_t j, std::size_t block_size,
                         const ViewingGeometry& geom) {
  if (block_size == 0 || i >= block_size || j >= block_size) {
    throw std::out_of_range("spatial_frequency: index outside the block");
  }
  const double theta = geom.theta_deg();
  const double fi = static_cast<double>(i) / theta;
  const double fj = static_cast<double>(j) / theta;
  return std::sqrt(fi * fi + fj * fj) / (2.0 * static_cast<double>(block_size));
}

CsfWeights CsfWeights::from_inverse_matrix(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols() || h.rows() < 2) {
    throw std::invalid_argument("inverse weights must be a square matrix with side >= 2");
  }
  if (!h.allFinite() || (h.array() <= 0.0).any()) {
    throw std::invalid_argument("inverse weights must be finite and strictly positive");
  }
  CsfWeights out;
  out.block_size = static_cast<std::size_t>(h.rows());
  out.h = h;
  out.w_inv = vectorize(h);
  out.w = out.w_inv.cwiseInverse();
  return out;
}

CsfWeights CsfWeights::uniform(std::size_t block_size) {
  const auto b = static_cast<Eigen::Index>(block_size);
  return from_inverse_matrix(Eigen::MatrixXd::Ones(b, b));
}

CsfWeights build_csf_weights(std::size_t block_size, const ViewingGeometry& geom) {
  if (block_size < 2) throw std::invalid_argument("build_csf_weights: block size must be >= 2");
  const auto b = static_cast<Eigen::Index>(block_size);
  Eigen::MatrixXd h(b, b);
  double ac_max = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      if (i == 0 && j == 0) continue;
      h(i, j) = csf_value(spatial_frequency(i, j, block_size, geom));
      ac_max = std::max(ac_max, h(i, j));
    }
  }
  // DC carries most of a block's energy; give it the least penalty.
  h(0, 0) = ac_max;
  return CsfWeights::from_inverse_matrix(h);
}

void write_weights_csv(const Eigen::MatrixXd& h, std::ostream& out) {
  char buf[64];
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", h(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_weights_csv(const Eigen::MatrixXd& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write weights: " + path.string());
  write_weights_csv(h, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Eigen::MatrixXd read_weights_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weights file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("weights file: bad value '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw std::runtime_error("weights file is empty: " + path.string());
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw std::runtime_error("weights file must be square; row " + std::to_string(i) + " has " +
                               std::to_string(rows[i].size()) + " entries");
    }
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = rows[i][j];
  }
  return h;
}

}  // namespace pcs
