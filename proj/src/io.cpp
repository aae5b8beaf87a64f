#include "edgevo/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "edgevo/error.hpp"

namespace edgevo {

static_assert(std::endian::native == std::endian::little, "depth binary I/O assumes a little-endian host");

namespace {

constexpr char kDepthMagic[4] = {'E', 'V', 'D', 'M'};
constexpr std::uint32_t kDepthVersion = 1;

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  for (;;) {
    const int c = in.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int pgm_int(std::istream& in, const std::string& path) {
  const std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "bad PGM header in " + path);
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(ErrorCode::ParseError, "truncated depth file " + path);
  return v;
}

}  // namespace

void write_pgm(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::string row;
  for (double v : image.data()) row.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L))));
  out.write(row.data(), static_cast<std::streamsize>(row.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  const std::string magic = pgm_token(in);
  if (magic != "P5" && magic != "P2") throw Error(ErrorCode::ParseError, "not a PGM file: " + path);
  const int w = pgm_int(in, path);
  const int h = pgm_int(in, path);
  const int maxval = pgm_int(in, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw Error(ErrorCode::ParseError, "unsupported PGM in " + path);
  std::vector<double> data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  if (magic == "P5") {
    std::string raw(data.size(), '\0');
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
      throw Error(ErrorCode::ParseError, "truncated PGM " + path);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<unsigned char>(raw[i]);
  } else {
    for (auto& v : data) v = pgm_int(in, path);
  }
  return Image(w, h, std::move(data));
}

void write_depth(const std::string& path, const InverseDepthMap& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(kDepthMagic, 4);
  put(out, kDepthVersion);
  put(out, static_cast<std::uint32_t>(depth.width()));
  put(out, static_cast<std::uint32_t>(depth.height()));
  out.write(reinterpret_cast<const char*>(depth.means().data()),
            static_cast<std::streamsize>(depth.means().size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(depth.variances().data()),
            static_cast<std::streamsize>(depth.variances().size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

InverseDepthMap read_depth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kDepthMagic, 4) != 0)
    throw Error(ErrorCode::ParseError, "bad depth magic in " + path);
  if (get<std::uint32_t>(in, path) != kDepthVersion) throw Error(ErrorCode::ParseError, "unsupported depth version in " + path);
  const auto w = get<std::uint32_t>(in, path);
  const auto h = get<std::uint32_t>(in, path);
  if (w == 0 || h == 0 || w > 1u << 15 || h > 1u << 15) throw Error(ErrorCode::ParseError, "bad depth size in " + path);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> mean(n), variance(n);
  const auto bytes = static_cast<std::streamsize>(n * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(mean.data()), bytes) || !in.read(reinterpret_cast<char*>(variance.data()), bytes))
    throw Error(ErrorCode::ParseError, "truncated depth file " + path);
  return InverseDepthMap::from_planes(static_cast<int>(w), static_cast<int>(h), std::move(mean), std::move(variance));
}

}  // namespace edgevo
