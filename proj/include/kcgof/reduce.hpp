#pragma once

#include <cstddef>
#include <span>

namespace kcgof {

/// Block length below which pairwise summation falls back to a plain
/// left-to-right loop. Part of the reduction-order contract: every n^2 sum in
/// the library, and the reference oracles, use exactly this tree.
inline constexpr std::size_t kPairwiseBlock = 32;

/// Pairwise (tree) sum of term(0) + ... + term(count-1). Ranges of at most
/// kPairwiseBlock terms are summed sequentially; longer ranges split at
/// count/2 and the two halves are added.
template <typename Term>
double pairwise_sum(std::size_t first, std::size_t count, const Term& term) {
  if (count <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t t = first; t < first + count; ++t) s += term(t);
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(first, half, term) + pairwise_sum(first + half, count - half, term);
}

template <typename Term>
double pairwise_sum(std::size_t count, const Term& term) {
  return pairwise_sum(std::size_t{0}, count, term);
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(values.size(), [values](std::size_t t) { return values[t]; });
}

/// Pairwise sum of row[j] * weight(j) over j != skip, in increasing j.
template <typename Weight>
double offdiag_sum(std::span<const double> row, std::size_t skip, const Weight& weight) {
  return pairwise_sum(row.size() - 1, [&](std::size_t t) {
    const std::size_t j = t < skip ? t : t + 1;
    return row[j] * weight(j);
  });
}

inline double offdiag_sum(std::span<const double> row, std::size_t skip) {
  return pairwise_sum(row.size() - 1, [&](std::size_t t) { return row[t < skip ? t : t + 1]; });
}

}  // namespace kcgof
