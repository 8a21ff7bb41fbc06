#include "pcs/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace pcs {

namespace {

using Kind = ImageError::Kind;

// Reads one whitespace-delimited header token, skipping '#' comments.
bool next_token(std::istream& in, std::string& token) {
  token.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n' && c != '\r') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return false;
  token.push_back(static_cast<char>(c));
  while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(in.get()));
  }
  return true;
}

std::size_t parse_dimension(const std::string& token, const std::string& name) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](unsigned char ch) {
        return std::isdigit(ch);
      })) {
    throw ImageError(Kind::malformed_header, "malformed header: bad " + name + " '" + token + "'");
  }
  const auto value = std::stoull(token);
  if (value == 0) throw ImageError(Kind::malformed_header, "malformed header: zero " + name);
  return static_cast<std::size_t>(value);
}

unsigned char to_byte(double v) {
  const double r = std::round(v);  // half away from zero
  return static_cast<unsigned char>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError(Kind::missing_file, "cannot open image: " + path.string());

  std::string token;
  if (!next_token(in, token)) throw ImageError(Kind::malformed_header, "malformed header: empty file");
  if (token != "P5") throw ImageError(Kind::unsupported_format, "unsupported format: " + token);

  std::string w_tok, h_tok, max_tok;
  if (!next_token(in, w_tok) || !next_token(in, h_tok) || !next_token(in, max_tok)) {
    throw ImageError(Kind::malformed_header, "malformed header: missing fields");
  }
  const std::size_t width = parse_dimension(w_tok, "width");
  const std::size_t height = parse_dimension(h_tok, "height");
  if (max_tok != "255") throw ImageError(Kind::unsupported_maxval, "unsupported maxval: " + max_tok);

  // Exactly one whitespace byte separates the header from the raster.
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) {
    throw ImageError(Kind::malformed_header, "malformed header: no separator before raster");
  }

  std::vector<unsigned char> raw(width * height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw ImageError(Kind::truncated_payload, "truncated payload: expected " +
                                                  std::to_string(raw.size()) + " bytes, got " +
                                                  std::to_string(in.gcount()));
  }

  GrayImage img(width, height);
  std::copy(raw.begin(), raw.end(), img.samples.begin());
  return img;
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageError(Kind::unwritable_path, "cannot write image: " + path.string());

  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<unsigned char> raw(img.samples.size());
  std::transform(img.samples.begin(), img.samples.end(), raw.begin(), to_byte);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw ImageError(Kind::unwritable_path, "write failed: " + path.string());
}

GrayImage quantize(const GrayImage& img) {
  GrayImage out = img;
  for (auto& v : out.samples) v = to_byte(v);
  return out;
}

GrayImage clip(const GrayImage& img) {
  GrayImage out = img;
  for (auto& v : out.samples) v = std::clamp(v, 0.0, 255.0);
  return out;
}

BlockGrid partition(const GrayImage& img, std::size_t block_size) {
  if (block_size < 2) throw std::invalid_argument("block size must be >= 2");
  if (img.width == 0 || img.height == 0) throw std::invalid_argument("empty image");

  BlockGrid grid;
  grid.block_size = block_size;
  grid.original_width = img.width;
  grid.original_height = img.height;
  grid.padded_width = tiles_for(img.width, block_size) * block_size;
  grid.padded_height = tiles_for(img.height, block_size) * block_size;
  grid.blocks.reserve(grid.tiles_x() * grid.tiles_y());

  for (std::size_t ty = 0; ty < grid.tiles_y(); ++ty) {
    for (std::size_t tx = 0; tx < grid.tiles_x(); ++tx) {
      Eigen::MatrixXd tile(block_size, block_size);
      for (std::size_t r = 0; r < block_size; ++r) {
        const std::size_t row = std::min(ty * block_size + r, img.height - 1);
        for (std::size_t c = 0; c < block_size; ++c) {
          const std::size_t col = std::min(tx * block_size + c, img.width - 1);
          tile(r, c) = img.at(row, col);
        }
      }
      grid.blocks.push_back(std::move(tile));
    }
  }
  return grid;
}

GrayImage reassemble(const BlockGrid& grid) {
  const std::size_t b = grid.block_size;
  if (b == 0 || grid.padded_width % b != 0 || grid.padded_height % b != 0 ||
      grid.original_width > grid.padded_width || grid.original_height > grid.padded_height) {
    throw ImageError(Kind::tile_mismatch, "inconsistent block grid geometry");
  }
  if (grid.blocks.size() != grid.tiles_x() * grid.tiles_y()) {
    throw ImageError(Kind::tile_mismatch, "tile count mismatch: have " +
                                              std::to_string(grid.blocks.size()) + ", need " +
                                              std::to_string(grid.tiles_x() * grid.tiles_y()));
  }

  GrayImage img(grid.original_width, grid.original_height);
  for (std::size_t t = 0; t < grid.blocks.size(); ++t) {
    const auto& tile = grid.blocks[t];
    if (static_cast<std::size_t>(tile.rows()) != b || static_cast<std::size_t>(tile.cols()) != b) {
      throw ImageError(Kind::tile_mismatch, "tile " + std::to_string(t) + " has wrong shape");
    }
    const std::size_t y0 = (t / grid.tiles_x()) * b;
    const std::size_t x0 = (t % grid.tiles_x()) * b;
    for (std::size_t r = 0; r < b && y0 + r < img.height; ++r) {
      for (std::size_t c = 0; c < b && x0 + c < img.width; ++c) {
        img.at(y0 + r, x0 + c) = tile(r, c);
      }
    }
  }
  return img;
}

}  // namespace pcs
