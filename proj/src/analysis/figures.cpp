#include "ibprf/analysis/figures.hpp"

#include <optional>
#include <string>

#include "ibprf/analysis/formulas.hpp"
#include "ibprf/errors.hpp"

namespace ibprf {

CsvTable figure1(const Figure1Grid& grid) {
  CsvTable table{"figure1/v1", {"m", "n", "p_exact", "p"}, {}};
  for (std::uint64_t m : grid.ring_sizes) {
    for (std::uint64_t n = grid.n_first; n <= grid.n_last; n += grid.n_step) {
      const auto p = p_direct_ibprf(n, m);
      table.add_row({std::to_string(m), std::to_string(n), p.fraction(), p.decimal()});
    }
  }
  return table;
}

CsvTable figure2(const Figure2Grid& grid) {
  CsvTable table{"figure2/v1", {"d", "p", "p_s"}, {}};
  for (std::uint64_t d : grid.degrees) {
    for (std::uint32_t i = 0; i <= grid.steps; ++i) {
      const double p = static_cast<double>(i) / grid.steps;
      table.add_row({std::to_string(d), format_double(p), format_double(p_onehop(p, d))});
    }
  }
  return table;
}

namespace {

struct PolyConfig {
  std::uint64_t s;
  std::uint64_t sprime;
  std::uint64_t t;
  std::uint64_t max_n;
  ExactProbability p;
};

}  // namespace

CsvTable figure3(const Figure3Grid& grid) {
  CsvTable table{"figure3/v1", {"series", "n", "p_exact", "p", "s", "sprime", "t", "max_n"}, {}};
  for (std::uint64_t n = grid.n_first; n <= grid.n_last; n += grid.n_step) {
    const auto p = p_direct_ibprf(n, grid.budget);
    table.add_row({"ibprf", std::to_string(n), p.fraction(), p.decimal(), "", "", "",
                   std::to_string(n)});
  }

  std::vector<PolyConfig> configs;
  for (std::uint64_t sprime = 1; 2 * sprime <= grid.budget; ++sprime) {
    if (grid.budget % sprime != 0) continue;
    const std::uint64_t t = grid.budget / sprime - 1;
    for (std::uint64_t s = std::max<std::uint64_t>(2, sprime); s <= grid.s_last; ++s) {
      configs.push_back({s, sprime, t, polypool_max_n(t, s, sprime), p_polypool(s, sprime)});
    }
  }

  for (std::uint64_t n = grid.n_first; n <= grid.n_last; n += grid.n_step) {
    const PolyConfig* best = nullptr;
    for (const PolyConfig& c : configs) {
      if (c.max_n < n) continue;
      if (best == nullptr || best->p < c.p) best = &c;
    }
    if (best == nullptr) continue;
    if (best->max_n < n || best->max_n > (best->t + 1) * best->s / best->sprime) {
      throw IntegrityError("figure3: envelope row exceeds the supported size");
    }
    table.add_row({"polypool", std::to_string(n), best->p.fraction(), best->p.decimal(),
                   std::to_string(best->s), std::to_string(best->sprime), std::to_string(best->t),
                   std::to_string(best->max_n)});
  }
  return table;
}

}  // namespace ibprf
