#pragma once

#include <cstdint>
#include <span>

#include "ibprf/analysis/exact.hpp"

namespace ibprf {

/// Chance that ring(v) holds u: 1 - C(n-1,m)/C(n,m), asserted equal to m/n.
/// Throws DomainError unless 0 < m < n.
ExactProbability p_direct_ibprf(std::uint64_t n, std::uint64_t m);

/// Chance that either ring holds the other node: 1 - (1 - m/(n-1))^2.
ExactProbability p_direct_bidirectional(std::uint64_t n, std::uint64_t m);

/// One-hop path connectivity 1 - (1-p)(1-p^2)^d. Throws DomainError unless 0 <= p <= 1.
double p_onehop(double p, std::uint64_t d);

/// Per-cell probability m / n_i. Throws DomainError unless 0 < m < n_i.
ExactProbability p_cell(std::uint64_t n_i, std::uint64_t m);
/// Unweighted mean over cells. Throws DomainError on an empty list.
ExactProbability p_avg_cells(std::span<const ExactProbability> per_cell);

/// 1 - C(M-m,m)/C(M,m), asserted equal to the product form; 1 when 2m > M.
ExactProbability p_eg(std::uint64_t pool, std::uint64_t ring);

/// Probability that two rings share exactly i keys, as printed.
ExactProbability p_qcomposite_term(std::uint64_t pool, std::uint64_t ring, std::uint64_t i);
/// 1 - sum_{i<q} p_i. Requires 1 <= q <= m <= M. Throws FormulaIntegrityError when the
/// p_i do not sum to 1 over i = 0..m.
ExactProbability p_qcomposite(std::uint64_t pool, std::uint64_t ring, std::uint64_t q);

/// 1 - C(s-s',s')/C(s,s'), asserted equal to the product form.
ExactProbability p_polypool(std::uint64_t s, std::uint64_t sprime);
/// floor((t+1) s / s'). Throws DomainError unless t >= 1 and 0 < s' <= s.
std::uint64_t polypool_max_n(std::uint64_t t, std::uint64_t s, std::uint64_t sprime);

}  // namespace ibprf
