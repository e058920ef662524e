#include "chordflow/sphere_grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chordflow/errors.hpp"
#include "chordflow/quadrature.hpp"

namespace chordflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

void periodic_spectral_matrices(int n, std::vector<double>& d1, std::vector<double>& d2) {
  const double h = 2.0 * kPi / n;
  d1.assign(static_cast<std::size_t>(n) * n, 0.0);
  d2.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double row1 = 0.0;
    double row2 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double half = 0.5 * k * h;
      const double s = std::sin(half);
      const double v1 = 0.5 * sign * std::cos(half) / s;
      const double v2 = -0.5 * sign / (s * s);
      d1[static_cast<std::size_t>(i) * n + j] = v1;
      d2[static_cast<std::size_t>(i) * n + j] = v2;
      row1 += v1;
      row2 += v2;
    }
    // Negative-sum diagonal: constants are annihilated to rounding.
    d1[static_cast<std::size_t>(i) * n + i] = -row1;
    d2[static_cast<std::size_t>(i) * n + i] = -row2;
  }
}

SphereGrid SphereGrid::make(int dim, int resolution) {
  SphereGrid grid;
  if (dim == 2) {
    if (resolution < 4 || resolution % 2 != 0) {
      throw Error(ErrorCode::InvalidResolution,
                  "circle grid needs an even node count >= 4, got " + std::to_string(resolution));
    }
    grid.build_circle(resolution);
  } else if (dim == 3) {
    if (resolution < 8) {
      throw Error(ErrorCode::InvalidResolution,
                  "sphere grid needs >= 8 latitude bands, got " + std::to_string(resolution));
    }
    grid.build_sphere(resolution);
  } else {
    throw Error(ErrorCode::InvalidResolution, "dimension must be 2 or 3");
  }
  return grid;
}

void SphereGrid::build_circle(int n) {
  dim_ = 2;
  resolution_ = n;
  spacing_ = 2.0 * kPi / n;
  nodes_.resize(n);
  weights_.assign(n, spacing_);
  frames_[0].resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = spacing_ * i;
    const double c = std::cos(t);
    const double s = std::sin(t);
    nodes_[i] = {c, s, 0.0};
    frames_[0][i] = {-s, c, 0.0};
  }
  periodic_spectral_matrices(n, d1_, d2_);
  stiffness_ = 0.25 * n * n;
}

void SphereGrid::build_sphere(int m) {
  dim_ = 3;
  resolution_ = m;
  bands_ = m;
  longitudes_ = 2 * m;
  const int nl = longitudes_;
  nodes_.resize(static_cast<std::size_t>(m) * nl);
  weights_.resize(nodes_.size());
  frames_[0].resize(nodes_.size());
  frames_[1].resize(nodes_.size());
  const double dphi = 2.0 * kPi / nl;
  for (int j = 0; j < m; ++j) {
    const double th = (j + 0.5) * kPi / m;
    // Fejer's first rule for the integral over cos(colatitude) in [-1, 1].
    double fejer = 1.0;
    for (int k = 1; k <= m / 2; ++k) {
      fejer -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
    }
    fejer *= 2.0 / m;
    const double st = std::sin(th);
    const double ct = std::cos(th);
    for (int k = 0; k < nl; ++k) {
      const double ph = k * dphi;
      const std::size_t idx = static_cast<std::size_t>(j) * nl + k;
      nodes_[idx] = {st * std::cos(ph), st * std::sin(ph), ct};
      weights_[idx] = fejer * dphi;
      frames_[0][idx] = {ct * std::cos(ph), ct * std::sin(ph), -st};
      frames_[1][idx] = {-std::sin(ph), std::cos(ph), 0.0};
    }
  }
  periodic_spectral_matrices(nl, d1_, d2_);
  periodic_spectral_matrices(2 * m, d1_lat_, d2_lat_);
  const double s0 = std::sin(0.5 * kPi / m);
  stiffness_ = static_cast<double>(m) * m + 0.25 * nl * nl / (s0 * s0);
}

double SphereGrid::measure() const { return dim_ == 2 ? 2.0 * kPi : 4.0 * kPi; }

double SphereGrid::unit_ball_volume() const { return dim_ == 2 ? kPi : 4.0 * kPi / 3.0; }

void SphereGrid::check_size(std::span<const double> field) const {
  if (field.size() != nodes_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "field has " + std::to_string(field.size()) +
                                              " samples, grid has " +
                                              std::to_string(nodes_.size()));
  }
}

double SphereGrid::integrate(std::span<const double> samples) const {
  check_size(samples);
  CompensatedSum sum;
  for (std::size_t i = 0; i < samples.size(); ++i) sum.add(weights_[i] * samples[i]);
  return sum.value();
}

namespace {

void apply(const std::vector<double>& mat, std::span<const double> in, std::span<double> out,
           std::size_t rows) {
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = mat.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * in[j];
    out[i] = acc;
  }
}

}  // namespace

void SphereGrid::colatitude_derivatives(std::span<const double> field, std::vector<double>& d1,
                                        std::vector<double>& d2) const {
  const int m = bands_;
  const int nl = longitudes_;
  d1.assign(field.size(), 0.0);
  d2.assign(field.size(), 0.0);
  std::vector<double> ext(2 * m), o1(m), o2(m);
  for (int k = 0; k < nl; ++k) {
    const int opposite = (k + nl / 2) % nl;
    for (int j = 0; j < m; ++j) {
      ext[j] = field[static_cast<std::size_t>(j) * nl + k];
      ext[m + j] = field[static_cast<std::size_t>(m - 1 - j) * nl + opposite];
    }
    apply(d1_lat_, ext, o1, m);
    apply(d2_lat_, ext, o2, m);
    for (int j = 0; j < m; ++j) {
      d1[static_cast<std::size_t>(j) * nl + k] = o1[j];
      d2[static_cast<std::size_t>(j) * nl + k] = o2[j];
    }
  }
}

std::vector<TangentVec> SphereGrid::gradient(std::span<const double> field) const {
  check_size(field);
  std::vector<TangentVec> out(field.size(), TangentVec{0.0, 0.0});
  if (dim_ == 2) {
    std::vector<double> d(field.size());
    apply(d1_, field, d, field.size());
    for (std::size_t i = 0; i < field.size(); ++i) out[i][0] = d[i];
    return out;
  }
  const int m = bands_;
  const int nl = longitudes_;
  std::vector<double> ft, ftt;
  colatitude_derivatives(field, ft, ftt);
  std::vector<double> row(nl), dr(nl);
  for (int j = 0; j < m; ++j) {
    const double st = std::sin((j + 0.5) * kPi / m);
    const auto base = static_cast<std::size_t>(j) * nl;
    apply(d1_, field.subspan(base, nl), dr, nl);
    for (int k = 0; k < nl; ++k) {
      out[base + k] = {ft[base + k], dr[k] / st};
    }
  }
  return out;
}

std::vector<SymMat2> SphereGrid::hessian(std::span<const double> field) const {
  check_size(field);
  std::vector<SymMat2> out(field.size());
  if (dim_ == 2) {
    std::vector<double> d(field.size());
    apply(d2_, field, d, field.size());
    for (std::size_t i = 0; i < field.size(); ++i) out[i].xx = d[i];
    return out;
  }
  const int m = bands_;
  const int nl = longitudes_;
  std::vector<double> ft, ftt;
  colatitude_derivatives(field, ft, ftt);
  std::vector<double> fp(field.size()), fpp(field.size());
  for (int j = 0; j < m; ++j) {
    const auto base = static_cast<std::size_t>(j) * nl;
    apply(d1_, field.subspan(base, nl), std::span<double>(fp).subspan(base, nl), nl);
    apply(d2_, field.subspan(base, nl), std::span<double>(fpp).subspan(base, nl), nl);
  }
  std::vector<double> ftp, unused;
  colatitude_derivatives(fp, ftp, unused);
  for (int j = 0; j < m; ++j) {
    const double th = (j + 0.5) * kPi / m;
    const double st = std::sin(th);
    const double cot = std::cos(th) / st;
    for (int k = 0; k < nl; ++k) {
      const std::size_t i = static_cast<std::size_t>(j) * nl + k;
      out[i].xx = ftt[i];
      out[i].xy = (ftp[i] - cot * fp[i]) / st;
      out[i].yy = fpp[i] / (st * st) + cot * ft[i];
    }
  }
  return out;
}

Vec3 SphereGrid::embed(std::size_t i, const TangentVec& t) const {
  Vec3 v = {0.0, 0.0, 0.0};
  for (int k = 0; k < dim_ - 1; ++k) {
    for (int c = 0; c < 3; ++c) v[c] += t[k] * frames_[k][i][c];
  }
  return v;
}

}  // namespace chordflow
