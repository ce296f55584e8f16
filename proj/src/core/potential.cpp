#include "core/potential.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace moire {

FreqIndex make_index(const Eigen::VectorXi& m) {
  FreqIndex idx{0, 0};
  for (int i = 0; i < m.size(); ++i) idx[i] = m[i];
  return idx;
}

Eigen::VectorXi index_vector(const FreqIndex& idx, int dim) {
  Eigen::VectorXi m(dim);
  for (int i = 0; i < dim; ++i) m[i] = idx[i];
  return m;
}

namespace {

FreqIndex negate(const FreqIndex& m) { return FreqIndex{-m[0], -m[1]}; }

int inf_norm(const FreqIndex& m) { return std::max(std::abs(m[0]), std::abs(m[1])); }

}  // namespace

void FourierPotential::finalize() {
  recip_basis_ = ReciprocalLattice(lattice_).basis();
  radius_ = 0;
  cart_terms_.clear();
  for (const auto& [m, v] : coeffs_) {
    radius_ = std::max(radius_, inf_norm(m));
    cart_terms_.emplace_back(recip_basis_ * index_vector(m, dim()).cast<double>(), v);
  }
}

FourierPotential::FourierPotential(Lattice lattice,
                                   const std::vector<std::pair<FreqIndex, Cplx>>& coeffs)
    : lattice_(std::move(lattice)) {
  for (const auto& [m, v] : coeffs) {
    if (lattice_.dim() == 1 && m[1] != 0)
      throw ConfigError("1d potential coefficient with nonzero second index");
    auto [it, inserted] = coeffs_.emplace(m, v);
    if (!inserted && std::abs(it->second - v) > 1e-12 * std::max(1.0, std::abs(v)))
      throw ConfigError("duplicate potential coefficient with conflicting values");
  }

  // Enforce exact Hermitian pairs. Canonical representative: the index that is
  // lexicographically positive keeps its stored value, the mirror gets conj.
  std::map<FreqIndex, Cplx> fixed;
  for (const auto& [m, v] : coeffs_) {
    const FreqIndex neg = negate(m);
    const auto mirror = coeffs_.find(neg);
    if (mirror != coeffs_.end()) {
      if (std::abs(mirror->second - std::conj(v)) >
          1e-12 * std::max(1.0, std::abs(v)))
        throw ConfigError("potential coefficients are not Hermitian: vhat(-m) != conj(vhat(m))");
    }
    if (m == neg) {
      // m == 0: must be real
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
        throw ConfigError("potential constant term vhat(0) must be real");
      fixed[m] = Cplx(v.real(), 0.0);
    } else if (m > neg) {
      fixed[m] = v;
      fixed[neg] = std::conj(v);
    } else if (mirror == coeffs_.end()) {
      fixed[m] = v;
      fixed[neg] = std::conj(v);
    }
  }

  // Drop exact zeros so radius() reflects actual support.
  for (auto it = fixed.begin(); it != fixed.end();) {
    if (it->second == Cplx(0.0, 0.0))
      it = fixed.erase(it);
    else
      ++it;
  }

  coeffs_ = std::move(fixed);
  finalize();
}

FourierPotential FourierPotential::zero(Lattice lattice) {
  return FourierPotential(std::move(lattice),
                          std::vector<std::pair<FreqIndex, Cplx>>{});
}

FourierPotential FourierPotential::from_samples(Lattice lattice,
                                                const std::vector<double>& samples,
                                                int n_per_axis, int radius) {
  const int d = lattice.dim();
  const int n = n_per_axis;
  if (radius < 0) throw ConfigError("from_samples requires radius >= 0");
  if (n < 2 * radius + 1)
    throw ConfigError("from_samples: grid of " + std::to_string(n) +
                      " points per axis aliases radius " + std::to_string(radius) +
                      " (need n >= 2*radius+1)");
  const std::size_t expected = static_cast<std::size_t>(std::pow(n, d));
  if (samples.size() != expected)
    throw ConfigError("from_samples: expected " + std::to_string(expected) + " samples, got " +
                      std::to_string(samples.size()));
  for (double s : samples)
    if (!std::isfinite(s)) throw ConfigError("from_samples: non-finite sample");

  // vhat(m) = (1/n^d) sum_i s(i) exp(-2 pi i m.i/n), i row-major over axes.
  std::map<FreqIndex, Cplx> out;
  auto dft_at = [&](const Eigen::VectorXi& m) {
    Cplx acc(0.0, 0.0);
    if (d == 1) {
      for (int i = 0; i < n; ++i) {
        const double phase = -2.0 * M_PI * m[0] * static_cast<double>(i) / n;
        acc += samples[i] * Cplx(std::cos(phase), std::sin(phase));
      }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double phase =
              -2.0 * M_PI * (m[0] * static_cast<double>(i) + m[1] * static_cast<double>(j)) / n;
          acc += samples[static_cast<std::size_t>(i) * n + j] *
                 Cplx(std::cos(phase), std::sin(phase));
        }
    }
    return acc / static_cast<double>(expected);
  };

  Eigen::VectorXi m(d);
  if (d == 1) {
    for (int a = -radius; a <= radius; ++a) {
      m[0] = a;
      out[make_index(m)] = dft_at(m);
    }
  } else {
    for (int a = -radius; a <= radius; ++a)
      for (int b = -radius; b <= radius; ++b) {
        m[0] = a;
        m[1] = b;
        out[make_index(m)] = dft_at(m);
      }
  }

  // Real input gives Hermitian output up to rounding; make it exact.
  std::vector<std::pair<FreqIndex, Cplx>> sym;
  for (const auto& [idx, v] : out) {
    const FreqIndex neg = negate(idx);
    if (idx > neg) {
      const Cplx avg = 0.5 * (v + std::conj(out.at(neg)));
      if (std::abs(avg) > 1e-15) sym.emplace_back(idx, avg);
    } else if (idx == neg) {
      if (std::abs(v.real()) > 1e-15) sym.emplace_back(idx, Cplx(v.real(), 0.0));
    }
  }
  return FourierPotential(std::move(lattice), sym);
}

Cplx FourierPotential::coeff(const FreqIndex& m) const {
  const auto it = coeffs_.find(m);
  return it == coeffs_.end() ? Cplx(0.0, 0.0) : it->second;
}

double FourierPotential::evaluate(const Eigen::VectorXd& r) const {
  Cplx acc(0.0, 0.0);
  double scale = 0.0;
  for (const auto& [g, v] : cart_terms_) {
    const double phase = g.dot(r);
    acc += v * Cplx(std::cos(phase), std::sin(phase));
    scale += std::abs(v);
  }
  if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, scale))
    throw ConfigError("potential evaluation has imaginary residue; coefficients corrupted");
  return acc.real();
}

double FourierPotential::coefficient_power() const {
  double p = 0.0;
  for (const auto& [m, v] : coeffs_) p += std::norm(v);
  return p;
}

PairPotential::PairPotential(const FourierPotential& v1, const FourierPotential& v2)
    : v1_(v1), v2_(v2) {}

Cplx PairPotential::coeff(const FreqIndex& m, const FreqIndex& n) const {
  const FreqIndex zero{0, 0};
  Cplx v(0.0, 0.0);
  if (n == zero) v += v1_.coeff(m);
  if (m == zero) v += v2_.coeff(n);
  return v;
}

std::vector<std::pair<std::pair<FreqIndex, FreqIndex>, Cplx>> PairPotential::nonzero() const {
  const FreqIndex zero{0, 0};
  std::map<std::pair<FreqIndex, FreqIndex>, Cplx> acc;
  for (const auto& [m, v] : v1_.coeffs()) acc[{m, zero}] += v;
  for (const auto& [n, v] : v2_.coeffs()) acc[{zero, n}] += v;
  std::vector<std::pair<std::pair<FreqIndex, FreqIndex>, Cplx>> out;
  for (const auto& [mn, v] : acc)
    if (v != Cplx(0.0, 0.0)) out.emplace_back(mn, v);
  return out;
}

PairPotential pair_indexing(const FourierPotential& v1, const FourierPotential& v2) {
  return PairPotential(v1, v2);
}

}  // namespace moire
