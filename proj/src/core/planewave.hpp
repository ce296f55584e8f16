#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "core/geometry.hpp"
#include "core/potential.hpp"

namespace moire {

/// Full tensor product of the two index boxes |m|_inf <= radius1,
/// |n|_inf <= radius2. Default truncation; makes the delta=1 tensor
/// decoupling oracle exact.
struct BoxTruncation {
  int radius1;
  int radius2;
};

/// Keeps (m,n) with (1/2)|k+G1+k'+G2|^2 + (delta/2)|k-k'+G1-G2|^2 <= ecut,
/// closed under negation. Depends on the fiber parameters.
struct EnergyCutTruncation {
  double ecut;
  KPoint k;
  double delta;
};

using Truncation = std::variant<BoxTruncation, EnergyCutTruncation>;

/// Finite planewave subspace of the product torus: entry (m,n) stands for
/// exp(i(G1(m).r + G2(n).r')). Entries are lexicographically ordered by
/// (m, n) and closed under (m,n) -> (-m,-n).
class PlanewaveBasis {
 public:
  struct Entry {
    FreqIndex m;
    FreqIndex n;
  };

  PlanewaveBasis(ProductCell cell, const Truncation& mode);

  const ProductCell& cell() const { return cell_; }
  int dim() const { return cell_.dim(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  bool is_box() const { return std::holds_alternative<BoxTruncation>(mode_); }
  const Truncation& mode() const { return mode_; }

  /// Position of (m,n), or -1 when outside the truncation.
  long find(const FreqIndex& m, const FreqIndex& n) const;

  /// Cartesian G1(m), G2(n) for entry i (cached).
  const Eigen::VectorXd& g1(std::size_t i) const { return g1_[i]; }
  const Eigen::VectorXd& g2(std::size_t i) const { return g2_[i]; }

 private:
  ProductCell cell_;
  Truncation mode_;
  std::vector<Entry> entries_;
  std::vector<Eigen::VectorXd> g1_, g2_;

  // Box mode: strides for O(1) find
  int r1_ = 0, r2_ = 0, n1_ = 0, n2_ = 0;
  // EnergyCut mode: hashed lookup
  std::unordered_map<std::uint64_t, long> lookup_;

  static std::uint64_t pack(const FreqIndex& m, const FreqIndex& n);
};

}  // namespace moire
