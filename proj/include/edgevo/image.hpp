#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "edgevo/geometry.hpp"

namespace edgevo {

/// Integer pixel coordinate.
struct PixelIndex {
  int x = 0;
  int y = 0;

  PixelPoint point() const { return {static_cast<double>(x), static_cast<double>(y)}; }
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
  friend auto operator<=>(const PixelIndex&, const PixelIndex&) = default;
};

/// Bilinear sample with the exact derivative of the interpolant.
struct ImageSample {
  double value = 0.0;
  double du = 0.0;
  double dv = 0.0;
};

/// Row-major grey image with real-valued intensities.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y) { return data_[index(x, y)]; }
  double at(int x, int y) const { return data_[index(x, y)]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  /// True when (u, v) lies in the bilinear-sampleable domain [0, w-1] x [0, h-1].
  bool sampleable(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u <= width_ - 1 && v <= height_ - 1;
  }

  /// Bilinear interpolation; absent outside the sampleable domain (never clamped).
  std::optional<double> sample(double u, double v) const;
  std::optional<ImageSample> sample_with_gradient(double u, double v) const;

  /// Central-difference gradient magnitude at an interior pixel, zero on the border.
  double gradient_magnitude(int x, int y) const;

  /// 2x2 block average; output size is floor(w/2) x floor(h/2).
  Image downsample() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

struct DepthHypothesis {
  double mean = 1.0;      // inverse depth
  double variance = 1.0;  // of the inverse depth
};

/// Per-pixel inverse depth mean and variance; NaN marks an undefined pixel.
class InverseDepthMap {
 public:
  InverseDepthMap() = default;
  InverseDepthMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool defined(int x, int y) const;
  std::optional<DepthHypothesis> get(int x, int y) const;
  /// Throws InvalidVariance unless mean > 0 and variance > 0.
  void set(int x, int y, const DepthHypothesis& h);
  void clear(int x, int y);

  std::size_t defined_count() const;
  std::vector<PixelIndex> defined_pixels() const;
  double mean_inverse_depth() const;

  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& variances() const { return variance_; }
  /// Raw access used by serialisation; no validation.
  static InverseDepthMap from_planes(int width, int height, std::vector<double> mean, std::vector<double> variance);

  /// Decimation by 2: each 2x2 block keeps its minimum-variance defined sample.
  InverseDepthMap decimate() const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> mean_;
  std::vector<double> variance_;
};

}  // namespace edgevo
