#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mtspace/errors.hpp"

namespace mts {

/// Scalar field sampled on a regular 1D/2D/3D grid, interpreted as a
/// piecewise-linear function over the implicit Freudenthal triangulation.
///
/// `values` is stored row-major with axis 0 fastest:
/// index = x + dims[0] * (y + dims[1] * z).
///
/// Vertices are totally ordered by (value, index); the index tie-break is a
/// simulation-of-simplicity device that keeps every critical point isolated
/// without ever modifying the raw values.
struct ScalarField {
  std::vector<int> dims;
  std::vector<double> values;
  std::vector<double> spacing;  // per-axis step, defaults to 1.0 per axis

  std::size_t size() const { return values.size(); }
  int dimension() const { return static_cast<int>(dims.size()); }

  /// Sweep comparator: value ascending, ties broken by vertex index.
  bool less(std::size_t a, std::size_t b) const {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  }

  double min_value() const;
  double max_value() const;
  double range() const { return max_value() - min_value(); }

  /// Throws DimensionMismatch / NonFiniteValue / InvalidParameter if the
  /// grid shape, the values, or the spacing are inconsistent.
  void validate() const;

  /// Appends the edge neighbors of vertex v under the Freudenthal
  /// triangulation: the path graph in 1D, quads split along the main
  /// diagonal in 2D, and the 14-neighbor Kuhn subdivision in 3D.
  void neighbors(std::size_t v, std::vector<std::size_t>& out) const;
};

ScalarField load_field(const std::string& path);
void save_field(const ScalarField& f, const std::string& path);

/// One isotropic Gaussian bump, in grid coordinates.
struct GaussianBump {
  std::vector<double> center;  // one coordinate per axis
  double amplitude = 1.0;
  double width = 1.0;  // standard deviation in grid units
};

/// Sum of Gaussian bumps on a fresh grid. When center_jitter > 0, each bump
/// center is displaced uniformly in [-jitter, +jitter] per axis using the
/// seed, which is how ensemble variants of a base layout are produced.
ScalarField synth_gaussian_mixture(const std::vector<int>& dims,
                                   const std::vector<GaussianBump>& bumps,
                                   std::uint64_t seed,
                                   double center_jitter = 0.0);

/// Adds i.i.d. uniform noise on [-amplitude, +amplitude] to every vertex.
/// Deterministic for a fixed (field, amplitude, seed) triple and never
/// exceeds the amplitude bound vertexwise.
ScalarField add_uniform_noise(const ScalarField& f, double amplitude,
                              std::uint64_t seed);

}  // namespace mts
