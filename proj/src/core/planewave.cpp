#include "core/planewave.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace moire {

namespace {

// enumerate |v|_inf <= r in lexicographic order
std::vector<FreqIndex> index_box(int dim, int r) {
  std::vector<FreqIndex> out;
  if (dim == 1) {
    for (int a = -r; a <= r; ++a) out.push_back({a, 0});
  } else {
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b) out.push_back({a, b});
  }
  return out;
}

}  // namespace

std::uint64_t PlanewaveBasis::pack(const FreqIndex& m, const FreqIndex& n) {
  auto u16 = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint16_t>(v)); };
  return (u16(m[0]) << 48) | (u16(m[1]) << 32) | (u16(n[0]) << 16) | u16(n[1]);
}

PlanewaveBasis::PlanewaveBasis(ProductCell cell, const Truncation& mode)
    : cell_(std::move(cell)), mode_(mode) {
  const int d = cell_.dim();

  if (const auto* box = std::get_if<BoxTruncation>(&mode_)) {
    if (box->radius1 < 0 || box->radius2 < 0)
      throw ConfigError("box truncation radii must be >= 0");
    r1_ = box->radius1;
    r2_ = box->radius2;
    n1_ = 2 * r1_ + 1;
    n2_ = 2 * r2_ + 1;
    const auto ms = index_box(d, r1_);
    const auto ns = index_box(d, r2_);
    entries_.reserve(ms.size() * ns.size());
    for (const auto& m : ms)
      for (const auto& n : ns) entries_.push_back(Entry{m, n});
  } else {
    const auto& ec = std::get<EnergyCutTruncation>(mode_);
    if (!(ec.ecut > 0.0)) throw ConfigError("energy cut must be positive");
    if (!(ec.delta > 0.0)) throw ConfigError("energy cut truncation requires delta > 0");

    const Eigen::VectorXd kc = ec.k.cart1(cell_);
    const Eigen::VectorXd kpc = ec.k.cart2(cell_);

    // Bounding box: |a+b| <= sqrt(2 ecut) and |a-b| <= sqrt(2 ecut/delta)
    // imply |G1|, |G2| <= gmax; index bounds follow from m = A^T G /(2 pi).
    const double gmax = 0.5 * (std::sqrt(2.0 * ec.ecut) +
                               std::sqrt(2.0 * ec.ecut / ec.delta)) +
                        kc.norm() + kpc.norm();
    auto index_bound = [&](const Lattice& lat) {
      const Eigen::MatrixXd At = lat.basis().transpose();
      double rowmax = 0.0;
      for (int i = 0; i < At.rows(); ++i) rowmax = std::max(rowmax, At.row(i).norm());
      return static_cast<int>(std::ceil(rowmax * gmax / (2.0 * M_PI))) + 1;
    };
    const int b1 = index_bound(cell_.lat1());
    const int b2 = index_bound(cell_.lat2());

    auto kinetic = [&](const FreqIndex& m, const FreqIndex& n) {
      const Eigen::VectorXd a =
          kc + cell_.recip1().vector(index_vector(m, d));
      const Eigen::VectorXd b =
          kpc + cell_.recip2().vector(index_vector(n, d));
      return 0.5 * (a + b).squaredNorm() + 0.5 * ec.delta * (a - b).squaredNorm();
    };

    const auto ms = index_box(d, b1);
    const auto ns = index_box(d, b2);
    for (const auto& m : ms)
      for (const auto& n : ns) {
        const FreqIndex mneg{-m[0], -m[1]}, nneg{-n[0], -n[1]};
        if (kinetic(m, n) <= ec.ecut || kinetic(mneg, nneg) <= ec.ecut)
          entries_.push_back(Entry{m, n});
      }
    if (entries_.empty())
      throw ConfigError("energy cut leaves an empty basis; raise ecut");
    std::sort(entries_.begin(), entries_.end(), [](const Entry& x, const Entry& y) {
      return std::tie(x.m, x.n) < std::tie(y.m, y.n);
    });
    for (long i = 0; i < static_cast<long>(entries_.size()); ++i)
      lookup_[pack(entries_[i].m, entries_[i].n)] = i;
  }

  g1_.reserve(entries_.size());
  g2_.reserve(entries_.size());
  for (const auto& e : entries_) {
    g1_.push_back(cell_.recip1().vector(index_vector(e.m, d)));
    g2_.push_back(cell_.recip2().vector(index_vector(e.n, d)));
  }
}

long PlanewaveBasis::find(const FreqIndex& m, const FreqIndex& n) const {
  if (is_box()) {
    if (std::abs(m[0]) > r1_ || std::abs(m[1]) > r1_ || std::abs(n[0]) > r2_ ||
        std::abs(n[1]) > r2_)
      return -1;
    const int d = dim();
    long mi, ni;
    if (d == 1) {
      mi = m[0] + r1_;
      ni = n[0] + r2_;
      return mi * n2_ + ni;
    }
    mi = static_cast<long>(m[0] + r1_) * n1_ + (m[1] + r1_);
    ni = static_cast<long>(n[0] + r2_) * n2_ + (n[1] + r2_);
    return mi * (static_cast<long>(n2_) * n2_) + ni;
  }
  const auto it = lookup_.find(pack(m, n));
  return it == lookup_.end() ? -1 : it->second;
}

}  // namespace moire
