#include "edgevo/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgevo/error.hpp"

namespace edgevo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Image::Image(int width, int height, double fill)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
  if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorCode::InvalidArgument, "image buffer does not match dimensions");
}

std::optional<double> Image::sample(double u, double v) const {
  if (!sampleable(u, v) || width_ < 2 || height_ < 2) return std::nullopt;
  const int x0 = std::min(static_cast<int>(u), width_ - 2);
  const int y0 = std::min(static_cast<int>(v), height_ - 2);
  const double fx = u - x0;
  const double fy = v - y0;
  const double* row0 = &data_[index(x0, y0)];
  const double* row1 = row0 + width_;
  const double top = row0[0] + fx * (row0[1] - row0[0]);
  const double bottom = row1[0] + fx * (row1[1] - row1[0]);
  return top + fy * (bottom - top);
}

std::optional<ImageSample> Image::sample_with_gradient(double u, double v) const {
  if (!sampleable(u, v) || width_ < 2 || height_ < 2) return std::nullopt;
  const int x0 = std::min(static_cast<int>(u), width_ - 2);
  const int y0 = std::min(static_cast<int>(v), height_ - 2);
  const double fx = u - x0;
  const double fy = v - y0;
  const double* row0 = &data_[index(x0, y0)];
  const double* row1 = row0 + width_;
  const double i00 = row0[0], i10 = row0[1], i01 = row1[0], i11 = row1[1];
  const double top = i00 + fx * (i10 - i00);
  const double bottom = i01 + fx * (i11 - i01);
  ImageSample s;
  s.value = top + fy * (bottom - top);
  s.du = (1.0 - fy) * (i10 - i00) + fy * (i11 - i01);
  s.dv = bottom - top;
  return s;
}

double Image::gradient_magnitude(int x, int y) const {
  if (x <= 0 || y <= 0 || x >= width_ - 1 || y >= height_ - 1) return 0.0;
  const double gx = 0.5 * (at(x + 1, y) - at(x - 1, y));
  const double gy = 0.5 * (at(x, y + 1) - at(x, y - 1));
  return std::hypot(gx, gy);
}

Image Image::downsample() const {
  Image out(width_ / 2, height_ / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.at(x, y) = 0.25 * (at(2 * x, 2 * y) + at(2 * x + 1, 2 * y) + at(2 * x, 2 * y + 1) +
                             at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

InverseDepthMap::InverseDepthMap(int width, int height)
    : width_(width),
      height_(height),
      mean_(static_cast<std::size_t>(width) * height, kNaN),
      variance_(static_cast<std::size_t>(width) * height, kNaN) {}

bool InverseDepthMap::defined(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
  return !std::isnan(mean_[index(x, y)]);
}

std::optional<DepthHypothesis> InverseDepthMap::get(int x, int y) const {
  if (!defined(x, y)) return std::nullopt;
  const auto i = index(x, y);
  return DepthHypothesis{mean_[i], variance_[i]};
}

void InverseDepthMap::set(int x, int y, const DepthHypothesis& h) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_)
    throw Error(ErrorCode::InvalidArgument, "depth pixel out of range");
  if (!(h.mean > 0.0) || !(h.variance > 0.0) || !std::isfinite(h.mean) || !std::isfinite(h.variance))
    throw Error(ErrorCode::InvalidVariance, "depth hypothesis needs positive finite mean and variance");
  const auto i = index(x, y);
  mean_[i] = h.mean;
  variance_[i] = h.variance;
}

void InverseDepthMap::clear(int x, int y) {
  const auto i = index(x, y);
  mean_[i] = kNaN;
  variance_[i] = kNaN;
}

std::size_t InverseDepthMap::defined_count() const {
  return static_cast<std::size_t>(
      std::count_if(mean_.begin(), mean_.end(), [](double m) { return !std::isnan(m); }));
}

std::vector<PixelIndex> InverseDepthMap::defined_pixels() const {
  std::vector<PixelIndex> out;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (!std::isnan(mean_[index(x, y)])) out.push_back({x, y});
  return out;
}

double InverseDepthMap::mean_inverse_depth() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (double m : mean_) {
    if (std::isnan(m)) continue;
    sum += m;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

InverseDepthMap InverseDepthMap::from_planes(int width, int height, std::vector<double> mean,
                                             std::vector<double> variance) {
  const auto n = static_cast<std::size_t>(width) * height;
  if (mean.size() != n || variance.size() != n)
    throw Error(ErrorCode::InvalidArgument, "depth planes do not match dimensions");
  InverseDepthMap map;
  map.width_ = width;
  map.height_ = height;
  map.mean_ = std::move(mean);
  map.variance_ = std::move(variance);
  return map;
}

InverseDepthMap InverseDepthMap::decimate() const {
  InverseDepthMap out(width_ / 2, height_ / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      std::optional<DepthHypothesis> best;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const auto h = get(2 * x + dx, 2 * y + dy);
          if (h && (!best || h->variance < best->variance)) best = h;
        }
      }
      if (best) out.set(x, y, *best);
    }
  }
  return out;
}

}  // namespace edgevo
