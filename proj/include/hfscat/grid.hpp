#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "hfscat/potential.hpp"

namespace hfscat {

using cplx = std::complex<double>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Periodic 1D grid on [-L/2, L/2) with the matched frequency lattice.
///
/// Frequencies are stored in FFT order: index k maps to 2 pi k / L for
/// k < n/2 and to 2 pi (k - n) / L otherwise, so the Nyquist index n/2
/// carries the frequency -pi/dx.
///
/// Transforms approximate the continuum Fourier transform
///   f^(xi) = (2 pi)^{-1/2} \int e^{-i x xi} f(x) dx
/// by the rectangle rule on the grid nodes; inverse() is the exact
/// discrete inverse of forward(). Plans are created once per grid and
/// may be executed concurrently from several threads.
class Grid {
 public:
  /// Rejects n_points that are not a power of two (or < 8) and length <= 0.
  static GridPtr make(std::size_t n_points, double length);

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] double dx() const { return dx_; }
  [[nodiscard]] double dxi() const { return dxi_; }
  [[nodiscard]] std::size_t nyquist_index() const { return n_ / 2; }

  [[nodiscard]] double x(std::size_t j) const { return nodes_[j]; }
  [[nodiscard]] double xi(std::size_t k) const { return freqs_[k]; }
  [[nodiscard]] std::span<const double> nodes() const { return nodes_; }
  [[nodiscard]] std::span<const double> frequencies() const { return freqs_; }

  /// Index of the lattice frequency closest to xi.
  [[nodiscard]] std::size_t nearest_frequency_index(double xi) const;
  /// Index of the lattice frequency equal to 2 pi m / L (m in [-n/2, n/2)).
  [[nodiscard]] std::size_t mode_index(long m) const;

  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

  /// Unnormalised DFT and inverse DFT, exposed for kernels that fold the
  /// scaling into a precomputed multiplier.
  void raw_forward(std::span<const cplx> in, std::span<cplx> out) const;
  void raw_backward(std::span<const cplx> in, std::span<cplx> out) const;

  /// Multiplier m_k with conv(f) = raw_backward(m * raw_forward(f)), i.e.
  /// sqrt(2 pi) w^(xi_k) / n.
  [[nodiscard]] std::vector<double> convolution_multiplier(const Potential& w) const;

  [[nodiscard]] bool same_as(const Grid& other) const {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  Grid(std::size_t n_points, double length);

  std::size_t n_;
  double length_;
  double dx_;
  double dxi_;
  std::vector<double> nodes_;
  std::vector<double> freqs_;
  // (dx / sqrt(2 pi)) * (-1)^k: the node offset -L/2 turns e^{-i x_0 xi_k} into a sign.
  std::vector<double> forward_scale_;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

/// Pointwise samples of a function on a grid.
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(GridPtr grid);
  ComplexField(GridPtr grid, std::vector<cplx> values);

  [[nodiscard]] const GridPtr& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<const cplx> values() const { return values_; }
  [[nodiscard]] std::span<cplx> values() { return values_; }
  cplx& operator[](std::size_t j) { return values_[j]; }
  const cplx& operator[](std::size_t j) const { return values_[j]; }

  [[nodiscard]] bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

/// Continuum-scaled Fourier coefficients indexed by the grid's frequency lattice.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(GridPtr grid);
  SpectralField(GridPtr grid, std::vector<cplx> coefficients);

  [[nodiscard]] const GridPtr& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }
  [[nodiscard]] std::span<const cplx> coefficients() const { return coeffs_; }
  [[nodiscard]] std::span<cplx> coefficients() { return coeffs_; }
  cplx& operator[](std::size_t k) { return coeffs_[k]; }
  const cplx& operator[](std::size_t k) const { return coeffs_[k]; }

 private:
  GridPtr grid_;
  std::vector<cplx> coeffs_;
};

SpectralField forward_transform(const ComplexField& f);
ComplexField inverse_transform(const SpectralField& f);

/// e^{it Delta} f, i.e. multiplication of the coefficients by e^{-i t xi^2}.
ComplexField free_propagate(const ComplexField& f, double t);
SpectralField free_propagate(const SpectralField& f, double t);

/// w * f computed as the inverse transform of sqrt(2 pi) w^ f^.
ComplexField convolve(const Potential& w, const ComplexField& f);

/// Discrete L^2 inner product dx * sum conj(a) b.
cplx inner(const ComplexField& a, const ComplexField& b);
double l2_norm(const ComplexField& f);
/// Quadrature norm dxi * sum |F|^2, the spectral counterpart of l2_norm.
double l2_norm(const SpectralField& f);
double sup_norm(const ComplexField& f);

}  // namespace hfscat
