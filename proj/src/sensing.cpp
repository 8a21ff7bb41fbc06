#include "pcs/sensing.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pcs/dct.hpp"

namespace pcs {

namespace {

constexpr char kMagic[8] = {'P', 'C', 'S', 'M', 'S', 'R', '0', '1'};
constexpr int kFormatVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(const std::string& in, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

template <typename T>
T require(const nlohmann::json& header, const char* key) {
  if (!header.contains(key)) throw MeasurementFileError(std::string("missing header field: ") + key);
  try {
    return header.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw MeasurementFileError(std::string("bad header field: ") + key);
  }
}

}  // namespace

std::uint64_t GaussianStream::raw(std::uint64_t counter) const {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double GaussianStream::uniform(std::uint64_t counter) const {
  return static_cast<double>((raw(counter) >> 11) + 1) * 0x1.0p-53;
}

double GaussianStream::normal(std::uint64_t index) const {
  const std::uint64_t pair = index / 2;
  const double radius = std::sqrt(-2.0 * std::log(uniform(2 * pair)));
  const double angle = 2.0 * std::numbers::pi * uniform(2 * pair + 1);
  return radius * (index % 2 == 0 ? std::cos(angle) : std::sin(angle));
}

SensingMatrix generate_sensing_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("sensing matrix needs M >= 1 and N >= 1");
  if (m > n) {
    throw std::invalid_argument("sensing matrix needs M <= N (got M=" + std::to_string(m) +
                                ", N=" + std::to_string(n) + ")");
  }
  SensingMatrix phi;
  phi.m = m;
  phi.n = n;
  phi.seed = seed;
  phi.entries.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  const GaussianStream stream(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      phi.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          scale * stream.normal(r * n + c);
    }
  }
  return phi;
}

Eigen::VectorXd sense_block(const SensingMatrix& phi, const Eigen::MatrixXd& block) {
  if (static_cast<std::size_t>(block.size()) != phi.n) {
    throw std::invalid_argument("sense_block: block has " + std::to_string(block.size()) +
                                " pixels, sensing matrix expects " + std::to_string(phi.n));
  }
  return phi.entries * vectorize(block);
}

std::size_t measurement_count(double ratio, std::size_t n) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("ratio must lie in (0, 1]");
  const double m = std::round(ratio * static_cast<double>(n));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

MeasurementSet sense_image(const GrayImage& img, std::size_t block_size, double ratio,
                           std::uint64_t seed, const ViewingGeometry& geom,
                           const AcquisitionOptions& options) {
  const std::size_t n = block_size * block_size;
  const std::size_t m = measurement_count(ratio, n);
  if (m >= n && !options.allow_full_rate) {
    throw std::invalid_argument("ratio " + std::to_string(ratio) +
                                " gives M == N; acquisition must be compressive");
  }
  const BlockGrid grid = partition(img, block_size);
  const SensingMatrix phi = generate_sensing_matrix(m, n, seed);

  MeasurementSet set;
  set.block_size = block_size;
  set.ratio = ratio;
  set.m = m;
  set.n = n;
  set.seed = seed;
  set.geometry = geom;
  set.width = img.width;
  set.height = img.height;
  set.measurements.reserve(grid.blocks.size());
  for (const auto& block : grid.blocks) set.measurements.push_back(sense_block(phi, block));
  return set;
}

std::string encode_measurements(const MeasurementSet& set) {
  if (set.measurements.size() != set.expected_block_count()) {
    throw MeasurementFileError("measurement count does not match image geometry");
  }
  nlohmann::json header = {
      {"format", "pcs-measurements"},
      {"version", kFormatVersion},
      {"block_size", set.block_size},
      {"m", set.m},
      {"n", set.n},
      {"ratio", set.ratio},
      {"seed", set.seed},
      {"scheme", "gaussian"},
      {"rng", GaussianStream::kRngName},
      {"geometry", {{"r_vd", set.geometry.r_vd}, {"pic_h", set.geometry.pic_h}}},
      {"width", set.width},
      {"height", set.height},
      {"block_count", set.measurements.size()},
      {"endianness", "little"},
      {"payload", "float64"},
  };
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + set.measurements.size() * set.m * 8);
  for (const auto& y : set.measurements) {
    if (static_cast<std::size_t>(y.size()) != set.m) {
      throw MeasurementFileError("measurement vector has wrong length");
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(y[i]));
  }
  return out;
}

MeasurementSet decode_measurements(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw MeasurementFileError("not a measurement file (bad magic)");
  }
  const std::uint64_t header_len = get_u64(bytes, 8);
  if (header_len > bytes.size() - 16) throw MeasurementFileError("truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw MeasurementFileError(std::string("corrupt header: ") + e.what());
  }
  if (require<std::string>(header, "format") != "pcs-measurements") {
    throw MeasurementFileError("unexpected format tag");
  }
  if (require<int>(header, "version") != kFormatVersion) {
    throw MeasurementFileError("unsupported measurement file version");
  }
  if (require<std::string>(header, "endianness") != "little" ||
      require<std::string>(header, "payload") != "float64") {
    throw MeasurementFileError("unsupported payload encoding");
  }
  if (require<std::string>(header, "rng") != GaussianStream::kRngName ||
      require<std::string>(header, "scheme") != "gaussian") {
    throw MeasurementFileError("unsupported sensing scheme");
  }

  MeasurementSet set;
  set.block_size = require<std::size_t>(header, "block_size");
  set.m = require<std::size_t>(header, "m");
  set.n = require<std::size_t>(header, "n");
  set.ratio = require<double>(header, "ratio");
  set.seed = require<std::uint64_t>(header, "seed");
  set.width = require<std::size_t>(header, "width");
  set.height = require<std::size_t>(header, "height");
  const auto geometry = require<nlohmann::json>(header, "geometry");
  set.geometry.r_vd = require<double>(geometry, "r_vd");
  set.geometry.pic_h = require<double>(geometry, "pic_h");
  const auto block_count = require<std::size_t>(header, "block_count");

  if (set.block_size < 2 || set.n != set.block_size * set.block_size || set.m < 1 ||
      set.m > set.n || set.width == 0 || set.height == 0) {
    throw MeasurementFileError("inconsistent geometry in header");
  }
  if (block_count != set.expected_block_count()) {
    throw MeasurementFileError("block count does not match image dimensions");
  }
  const std::size_t payload_offset = 16 + header_len;
  if (bytes.size() - payload_offset != block_count * set.m * 8) {
    throw MeasurementFileError("payload size mismatch");
  }

  set.measurements.resize(block_count);
  std::size_t offset = payload_offset;
  for (auto& y : set.measurements) {
    y.resize(static_cast<Eigen::Index>(set.m));
    for (Eigen::Index i = 0; i < y.size(); ++i, offset += 8) {
      y[i] = std::bit_cast<double>(get_u64(bytes, offset));
    }
  }
  return set;
}

void write_measurements(const MeasurementSet& set, const std::filesystem::path& path) {
  const std::string bytes = encode_measurements(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MeasurementFileError("cannot write measurement file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw MeasurementFileError("write failed: " + path.string());
}

MeasurementSet read_measurements(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeasurementFileError("cannot open measurement file: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_measurements(bytes);
}

std::uint64_t measurement_digest(const MeasurementSet& set) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& y : set.measurements) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(y[i]);
      for (int b = 0; b < 8; ++b) {
        hash ^= (bits >> (8 * b)) & 0xFF;
        hash *= 0x100000001b3ULL;
      }
    }
  }
  return hash;
}

}  // namespace pcs
