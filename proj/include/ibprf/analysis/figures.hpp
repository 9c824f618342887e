#pragma once

#include <cstdint>
#include <vector>

#include "ibprf/io/csv.hpp"

namespace ibprf {

/// Direct-key probability m/n against network size. Columns: m,n,p_exact,p.
struct Figure1Grid {
  std::vector<std::uint64_t> ring_sizes{100, 150, 200};
  std::uint64_t n_first = 250;
  std::uint64_t n_last = 10000;
  std::uint64_t n_step = 250;
};

/// One-hop connectivity against p. Columns: d,p,p_s.
struct Figure2Grid {
  std::vector<std::uint64_t> degrees{20, 60, 100};
  std::uint32_t steps = 100;  // p = i / steps
};

/// IBPRF versus the poly-pool envelope under one storage budget.
/// Columns: series,n,p_exact,p,s,sprime,t,max_n (s, sprime, t empty for IBPRF).
/// The poly-pool series takes, for every n, the best p over all (s', t, s) with
/// s'(t+1) = budget, s' <= budget/2, s in [max(2, s'), s_last] and max_n >= n.
struct Figure3Grid {
  std::uint64_t budget = 200;
  std::uint64_t n_first = 250;
  std::uint64_t n_last = 10000;
  std::uint64_t n_step = 250;
  std::uint64_t s_last = 500;
};

CsvTable figure1(const Figure1Grid& grid = {});
CsvTable figure2(const Figure2Grid& grid = {});
CsvTable figure3(const Figure3Grid& grid = {});

}  // namespace ibprf
