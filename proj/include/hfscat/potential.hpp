#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hfscat {

/// Point mass lambda * delta(x).
struct DiracMass {
  double lambda = 1.0;
};

/// lambda * N(0, sigma^2) density.
struct GaussianMass {
  double lambda = 1.0;
  double sigma = 1.0;
};

/// lambda / (2a) on [-a, a].
struct BoxMass {
  double lambda = 1.0;
  double half_width = 1.0;
};

/// Symmetric comb: each entry (lambda_i, s_i) stands for
/// lambda_i/2 * (delta(x - s_i) + delta(x + s_i)), so the pair is even by construction.
struct SumOfDiracs {
  std::vector<std::pair<double, double>> atoms;
};

/// Even, real finite measure with closed-form Fourier transform.
///
/// The transform follows the unitary convention
///   w^(eta) = (2 pi)^{-1/2} \int e^{-i x eta} dw(x),
/// so total_mass() == sqrt(2 pi) * fourier_at(0).
class Potential {
 public:
  using Variant = std::variant<DiracMass, GaussianMass, BoxMass, SumOfDiracs>;

  Potential() : kind_(DiracMass{0.0}) {}
  explicit Potential(Variant kind);

  static Potential dirac(double lambda) { return Potential(DiracMass{lambda}); }
  static Potential gaussian(double lambda, double sigma) {
    return Potential(GaussianMass{lambda, sigma});
  }
  static Potential box(double lambda, double half_width) {
    return Potential(BoxMass{lambda, half_width});
  }
  static Potential sum_of_diracs(std::vector<std::pair<double, double>> atoms) {
    return Potential(SumOfDiracs{std::move(atoms)});
  }

  [[nodiscard]] double fourier_at(double eta) const;
  [[nodiscard]] double m1_norm() const;
  [[nodiscard]] double total_mass() const;

  /// Pointwise density, for the variants that have one (Gaussian, Box).
  /// Throws std::invalid_argument for atomic variants.
  [[nodiscard]] double density_at(double x) const;
  [[nodiscard]] bool has_density() const;

  [[nodiscard]] const Variant& kind() const { return kind_; }
  [[nodiscard]] std::string kind_name() const;

 private:
  Variant kind_;
};

}  // namespace hfscat
