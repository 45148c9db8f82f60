// Straightforward serial evaluation of the nonlinear terms: one full
// convolution per (n, m) pair, no symmetry reuse, no threading.

#include "hfscat/nonlinearity.hpp"

namespace hfscat::reference {

std::vector<ComplexField> direct_term(const OrbitalEnsemble& ens, const Potential& w) {
  const ComplexField v = convolve(w, density(ens));
  std::vector<ComplexField> out;
  for (std::size_t m = 0; m < ens.rank(); ++m) {
    ComplexField f(ens.grid());
    const auto u = ens.orbital(m).values();
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = v[j].real() * u[j];
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<ComplexField> exchange_term(const OrbitalEnsemble& ens, const Potential& w) {
  const std::size_t k = ens.rank();
  std::vector<ComplexField> out;
  for (std::size_t m = 0; m < k; ++m) {
    ComplexField f(ens.grid());
    for (std::size_t n = 0; n < k; ++n) {
      ComplexField pair(ens.grid());
      const auto un = ens.orbital(n).values();
      const auto um = ens.orbital(m).values();
      for (std::size_t j = 0; j < pair.size(); ++j) pair[j] = std::conj(un[j]) * um[j];
      const ComplexField c = convolve(w, pair);
      for (std::size_t j = 0; j < f.size(); ++j) f[j] += ens.weight(n) * un[j] * c[j];
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace hfscat::reference
