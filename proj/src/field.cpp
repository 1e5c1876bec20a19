#include "mtspace/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "mtspace/rng.hpp"

namespace mts {

namespace {

std::size_t checked_product(const std::vector<int>& dims) {
  std::size_t p = 1;
  for (int d : dims) p *= static_cast<std::size_t>(d);
  return p;
}

}  // namespace

double ScalarField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values) m = std::min(m, v);
  return m;
}

double ScalarField::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  return m;
}

void ScalarField::validate() const {
  if (dims.empty() || dims.size() > 3)
    throw DimensionMismatch("field must have 1 to 3 axes, got " +
                            std::to_string(dims.size()));
  for (int d : dims)
    if (d < 2)
      throw DimensionMismatch("every axis extent must be >= 2, got " +
                              std::to_string(d));
  if (values.size() != checked_product(dims))
    throw DimensionMismatch(
        "values count " + std::to_string(values.size()) +
        " does not match grid size " + std::to_string(checked_product(dims)));
  for (double v : values)
    if (!std::isfinite(v)) throw NonFiniteValue("field contains a non-finite value");
  if (!spacing.empty()) {
    if (spacing.size() != dims.size())
      throw DimensionMismatch("spacing must have one entry per axis");
    for (double s : spacing)
      if (!(s > 0.0) || !std::isfinite(s))
        throw InvalidParameter("spacing entries must be positive finite");
  }
}

void ScalarField::neighbors(std::size_t v, std::vector<std::size_t>& out) const {
  out.clear();
  const int nd = dimension();
  int c[3] = {0, 0, 0};
  std::size_t rest = v;
  for (int a = 0; a < nd; ++a) {
    c[a] = static_cast<int>(rest % static_cast<std::size_t>(dims[a]));
    rest /= static_cast<std::size_t>(dims[a]);
  }

  // Offsets per dimensionality; each set is symmetric so the neighbor
  // relation is an undirected graph.
  static const int off1[][3] = {{1, 0, 0}, {-1, 0, 0}};
  static const int off2[][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                {0, -1, 0}, {1, 1, 0},  {-1, -1, 0}};
  static const int off3[][3] = {
      {1, 0, 0},  {-1, 0, 0},  {0, 1, 0},  {0, -1, 0},  {0, 0, 1},
      {0, 0, -1}, {1, 1, 0},   {-1, -1, 0}, {0, 1, 1},  {0, -1, -1},
      {1, 0, 1},  {-1, 0, -1}, {1, 1, 1},  {-1, -1, -1}};

  const int(*offs)[3] = off1;
  int count = 2;
  if (nd == 2) {
    offs = off2;
    count = 6;
  } else if (nd == 3) {
    offs = off3;
    count = 14;
  }

  for (int k = 0; k < count; ++k) {
    int n[3];
    bool ok = true;
    for (int a = 0; a < nd; ++a) {
      n[a] = c[a] + offs[k][a];
      if (n[a] < 0 || n[a] >= dims[a]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::size_t idx = 0;
    for (int a = nd - 1; a >= 0; --a)
      idx = idx * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(n[a]);
    out.push_back(idx);
  }
}

ScalarField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("dims") || !j.contains("values"))
    throw ParseError("field JSON must contain 'dims' and 'values'");

  ScalarField f;
  try {
    f.dims = j.at("dims").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad 'dims' array: ") + e.what());
  }
  if (!j.at("values").is_array()) throw ParseError("'values' must be an array");
  f.values.reserve(j.at("values").size());
  for (const auto& v : j.at("values")) {
    if (!v.is_number())
      throw NonFiniteValue("field values must be finite JSON numbers");
    f.values.push_back(v.get<double>());
  }
  if (j.contains("spacing")) {
    try {
      f.spacing = j.at("spacing").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad 'spacing' array: ") + e.what());
    }
  }
  f.validate();
  return f;
}

void save_field(const ScalarField& f, const std::string& path) {
  nlohmann::json j;
  j["dims"] = f.dims;
  j["values"] = f.values;
  if (!f.spacing.empty()) j["spacing"] = f.spacing;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

ScalarField synth_gaussian_mixture(const std::vector<int>& dims,
                                   const std::vector<GaussianBump>& bumps,
                                   std::uint64_t seed, double center_jitter) {
  ScalarField f;
  f.dims = dims;
  f.values.assign(checked_product(dims), 0.0);
  f.validate();

  for (const auto& b : bumps) {
    if (!(b.width > 0.0)) throw InvalidParameter("bump width must be positive");
    if (!(b.amplitude > 0.0))
      throw InvalidParameter("bump amplitude must be positive");
    if (b.center.size() != dims.size())
      throw DimensionMismatch("bump center must have one coordinate per axis");
  }
  if (center_jitter < 0.0)
    throw InvalidParameter("center jitter must be non-negative");

  Rng rng(seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(bumps.size());
  for (const auto& b : bumps) {
    std::vector<double> c = b.center;
    for (auto& x : c)
      if (center_jitter > 0.0) x += rng.uniform(-center_jitter, center_jitter);
    centers.push_back(std::move(c));
  }

  const int nd = static_cast<int>(dims.size());
  for (std::size_t v = 0; v < f.values.size(); ++v) {
    int c[3] = {0, 0, 0};
    std::size_t rest = v;
    for (int a = 0; a < nd; ++a) {
      c[a] = static_cast<int>(rest % static_cast<std::size_t>(dims[a]));
      rest /= static_cast<std::size_t>(dims[a]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < bumps.size(); ++k) {
      double d2 = 0.0;
      for (int a = 0; a < nd; ++a) {
        const double dx = static_cast<double>(c[a]) - centers[k][a];
        d2 += dx * dx;
      }
      const double w = bumps[k].width;
      sum += bumps[k].amplitude * std::exp(-d2 / (2.0 * w * w));
    }
    f.values[v] = sum;
  }
  return f;
}

ScalarField add_uniform_noise(const ScalarField& f, double amplitude,
                              std::uint64_t seed) {
  if (amplitude < 0.0) throw InvalidParameter("noise amplitude must be >= 0");
  f.validate();
  ScalarField out = f;
  if (amplitude == 0.0) return out;
  Rng rng(seed);
  for (auto& v : out.values) v += rng.uniform(-amplitude, amplitude);
  return out;
}

}  // namespace mts
