#include "hfscat/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hfscat {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Potential::Potential(Variant kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const DiracMass&) {},
                 [](const GaussianMass& g) {
                   if (!(g.sigma > 0.0)) throw std::invalid_argument("gaussian potential: sigma must be > 0");
                 },
                 [](const BoxMass& b) {
                   if (!(b.half_width > 0.0)) throw std::invalid_argument("box potential: half width must be > 0");
                 },
                 [](const SumOfDiracs& s) {
                   for (const auto& [lambda, shift] : s.atoms) {
                     if (!std::isfinite(lambda) || !std::isfinite(shift))
                       throw std::invalid_argument("sum_of_diracs potential: non-finite atom");
                   }
                 },
             },
             kind_);
}

double Potential::fourier_at(double eta) const {
  return std::visit(
      Overloaded{
          [](const DiracMass& d) { return d.lambda * kInvSqrt2Pi; },
          [eta](const GaussianMass& g) {
            return g.lambda * kInvSqrt2Pi * std::exp(-0.5 * g.sigma * g.sigma * eta * eta);
          },
          [eta](const BoxMass& b) {
            const double arg = b.half_width * eta;
            // sin(z)/z with the removable singularity filled in
            const double sinc = std::abs(arg) < 1e-8 ? 1.0 - arg * arg / 6.0 : std::sin(arg) / arg;
            return b.lambda * kInvSqrt2Pi * sinc;
          },
          [eta](const SumOfDiracs& s) {
            double acc = 0.0;
            for (const auto& [lambda, shift] : s.atoms) acc += lambda * std::cos(shift * eta);
            return acc * kInvSqrt2Pi;
          },
      },
      kind_);
}

double Potential::m1_norm() const {
  return std::visit(Overloaded{
                        [](const DiracMass& d) { return std::abs(d.lambda); },
                        [](const GaussianMass& g) { return std::abs(g.lambda); },
                        [](const BoxMass& b) { return std::abs(b.lambda); },
                        [](const SumOfDiracs& s) {
                          double acc = 0.0;
                          for (const auto& atom : s.atoms) acc += std::abs(atom.first);
                          return acc;
                        },
                    },
                    kind_);
}

double Potential::total_mass() const {
  return std::visit(Overloaded{
                        [](const DiracMass& d) { return d.lambda; },
                        [](const GaussianMass& g) { return g.lambda; },
                        [](const BoxMass& b) { return b.lambda; },
                        [](const SumOfDiracs& s) {
                          double acc = 0.0;
                          for (const auto& atom : s.atoms) acc += atom.first;
                          return acc;
                        },
                    },
                    kind_);
}

bool Potential::has_density() const {
  return std::holds_alternative<GaussianMass>(kind_) || std::holds_alternative<BoxMass>(kind_);
}

double Potential::density_at(double x) const {
  if (const auto* g = std::get_if<GaussianMass>(&kind_)) {
    return g->lambda * kInvSqrt2Pi / g->sigma * std::exp(-0.5 * x * x / (g->sigma * g->sigma));
  }
  if (const auto* b = std::get_if<BoxMass>(&kind_)) {
    return std::abs(x) <= b->half_width ? b->lambda / (2.0 * b->half_width) : 0.0;
  }
  throw std::invalid_argument("potential '" + kind_name() + "' has no pointwise density");
}

std::string Potential::kind_name() const {
  return std::visit(Overloaded{
                        [](const DiracMass&) { return std::string("dirac"); },
                        [](const GaussianMass&) { return std::string("gaussian"); },
                        [](const BoxMass&) { return std::string("box"); },
                        [](const SumOfDiracs&) { return std::string("sum_of_diracs"); },
                    },
                    kind_);
}

}  // namespace hfscat
