#include "hfscat/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hfscat {

namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) {
  // FFTW leaves the input of an out-of-place c2c transform untouched.
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_size(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": length " + std::to_string(got) +
                                " does not match grid size " + std::to_string(expected));
  }
}

}  // namespace

GridPtr Grid::make(std::size_t n_points, double length) {
  if (n_points < 8 || !is_power_of_two(n_points)) {
    throw std::invalid_argument("grid: n_points must be a power of two >= 8, got " +
                                std::to_string(n_points));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid: domain length must be positive and finite");
  }
  return GridPtr(new Grid(n_points, length));
}

Grid::Grid(std::size_t n_points, double length)
    : n_(n_points),
      length_(length),
      dx_(length / static_cast<double>(n_points)),
      dxi_(2.0 * std::numbers::pi / length),
      nodes_(n_points),
      freqs_(n_points),
      forward_scale_(n_points) {
  const double scale = dx_ / std::sqrt(2.0 * std::numbers::pi);
  const long half = static_cast<long>(n_ / 2);
  for (std::size_t j = 0; j < n_; ++j) {
    nodes_[j] = -0.5 * length_ + static_cast<double>(j) * dx_;
    const long k = static_cast<long>(j) < half ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_);
    freqs_[j] = dxi_ * static_cast<double>(k);
    forward_scale_[j] = (j % 2 == 0) ? scale : -scale;
  }

  std::vector<cplx> a(n_), b(n_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const int n = static_cast<int>(n_);
  plan_forward_ = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_backward_ = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_forward_ == nullptr || plan_backward_ == nullptr) {
    throw std::runtime_error("grid: FFTW planning failed");
  }
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
}

std::size_t Grid::nearest_frequency_index(double xi) const {
  const auto m = std::lround(xi / dxi_);
  const long half = static_cast<long>(n_ / 2);
  return mode_index(std::clamp(m, -half, half - 1));
}

std::size_t Grid::mode_index(long m) const {
  const long n = static_cast<long>(n_);
  if (m < -n / 2 || m >= n / 2) throw std::out_of_range("grid: mode outside the frequency lattice");
  return static_cast<std::size_t>(m >= 0 ? m : m + n);
}

void Grid::raw_forward(std::span<const cplx> in, std::span<cplx> out) const {
  require_size(n_, in.size(), "forward input");
  require_size(n_, out.size(), "forward output");
  if (in.data() == out.data()) {
    std::vector<cplx> tmp(in.begin(), in.end());
    fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(tmp.data()), as_fftw(out.data()));
    return;
  }
  fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(in.data()), as_fftw(out.data()));
}

void Grid::raw_backward(std::span<const cplx> in, std::span<cplx> out) const {
  require_size(n_, in.size(), "backward input");
  require_size(n_, out.size(), "backward output");
  if (in.data() == out.data()) {
    std::vector<cplx> tmp(in.begin(), in.end());
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(tmp.data()), as_fftw(out.data()));
    return;
  }
  fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(in.data()), as_fftw(out.data()));
}

void Grid::forward(std::span<const cplx> in, std::span<cplx> out) const {
  raw_forward(in, out);
  for (std::size_t k = 0; k < n_; ++k) out[k] *= forward_scale_[k];
}

void Grid::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  require_size(n_, in.size(), "inverse input");
  require_size(n_, out.size(), "inverse output");
  std::vector<cplx> tmp(n_);
  const double nn = static_cast<double>(n_);
  for (std::size_t k = 0; k < n_; ++k) tmp[k] = in[k] / (forward_scale_[k] * nn);
  raw_backward(tmp, out);
}

std::vector<double> Grid::convolution_multiplier(const Potential& w) const {
  std::vector<double> m(n_);
  const double factor = std::sqrt(2.0 * std::numbers::pi) / static_cast<double>(n_);
  for (std::size_t k = 0; k < n_; ++k) m[k] = factor * w.fourier_at(freqs_[k]);
  return m;
}

ComplexField::ComplexField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size()) {}

ComplexField::ComplexField(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require_size(grid_->size(), values_.size(), "ComplexField");
}

bool ComplexField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

SpectralField::SpectralField(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->size()) {}

SpectralField::SpectralField(GridPtr grid, std::vector<cplx> coefficients)
    : grid_(std::move(grid)), coeffs_(std::move(coefficients)) {
  require_size(grid_->size(), coeffs_.size(), "SpectralField");
}

SpectralField forward_transform(const ComplexField& f) {
  if (!f.all_finite()) throw std::domain_error("forward_transform: non-finite input");
  SpectralField out(f.grid());
  f.grid()->forward(f.values(), out.coefficients());
  return out;
}

ComplexField inverse_transform(const SpectralField& f) {
  ComplexField out(f.grid());
  f.grid()->inverse(f.coefficients(), out.values());
  return out;
}

SpectralField free_propagate(const SpectralField& f, double t) {
  SpectralField out = f;
  const auto xi = f.grid()->frequencies();
  auto c = out.coefficients();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -t * xi[k] * xi[k]);
  return out;
}

ComplexField free_propagate(const ComplexField& f, double t) {
  if (t == 0.0) return f;
  return inverse_transform(free_propagate(forward_transform(f), t));
}

ComplexField convolve(const Potential& w, const ComplexField& f) {
  const Grid& g = *f.grid();
  const auto mult = g.convolution_multiplier(w);
  std::vector<cplx> spec(g.size());
  g.raw_forward(f.values(), spec);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= mult[k];
  ComplexField out(f.grid());
  g.raw_backward(spec, out.values());
  return out;
}

cplx inner(const ComplexField& a, const ComplexField& b) {
  if (!a.grid()->same_as(*b.grid())) throw std::invalid_argument("inner: grid mismatch");
  cplx acc{0.0, 0.0};
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t j = 0; j < av.size(); ++j) acc += std::conj(av[j]) * bv[j];
  return acc * a.grid()->dx();
}

double l2_norm(const ComplexField& f) {
  double acc = 0.0;
  for (const auto& z : f.values()) acc += std::norm(z);
  return std::sqrt(acc * f.grid()->dx());
}

double l2_norm(const SpectralField& f) {
  double acc = 0.0;
  for (const auto& z : f.coefficients()) acc += std::norm(z);
  return std::sqrt(acc * f.grid()->dxi());
}

double sup_norm(const ComplexField& f) {
  double m = 0.0;
  for (const auto& z : f.values()) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace hfscat
