#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>

#include "ibprf/analysis/exact.hpp"
#include "ibprf/analysis/figures.hpp"
#include "ibprf/analysis/formulas.hpp"
#include "ibprf/errors.hpp"

using namespace ibprf;

namespace {

Rational frac(long a, long b) { return Rational(BigInt(a), BigInt(b)); }

std::size_t column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  ADD_FAILURE() << "no column " << name;
  return 0;
}

}  // namespace

TEST(ExactTest, BinomialAndFractionFormatting) {
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(4, 5), 0);
  EXPECT_EQ(binomial(0, 0), 1);
  EXPECT_EQ(binomial(100, 50), BigInt("100891344545564193334812497256"));
  EXPECT_EQ(ExactProbability(frac(2, 4)).fraction(), "1/2");
  EXPECT_EQ(ExactProbability(Rational(1)).fraction(), "1/1");
  EXPECT_EQ(ExactProbability(Rational(0)).fraction(), "0/1");
  EXPECT_THROW(ExactProbability(frac(3, 2)), DomainError);
  EXPECT_THROW(ExactProbability(frac(-1, 2)), DomainError);
  EXPECT_THROW(ExactProbability::ratio(1, 0), DomainError);
}

TEST(ExactTest, DecimalViewRoundsHalfToEven) {
  EXPECT_EQ(decimal_view(frac(1, 10)), "0.1");
  EXPECT_EQ(decimal_view(Rational(1)), "1.0");
  EXPECT_EQ(decimal_view(Rational(0)), "0.0");
  EXPECT_EQ(decimal_view(frac(17, 45)), "0.3777777778");
  EXPECT_EQ(decimal_view(frac(1, 3)), "0.3333333333");
  EXPECT_EQ(decimal_view(frac(2, 3)), "0.6666666667");
  // Exact ties at the 10th significant digit.
  EXPECT_EQ(decimal_view(frac(12345678905, 100000000000)), "0.123456789");  // trailing zero trimmed
  EXPECT_EQ(decimal_view(frac(12345678915, 100000000000)), "0.1234567892");
  EXPECT_EQ(decimal_view(frac(1, 2), 1), "0.5");
  EXPECT_EQ(decimal_view(frac(25, 1000), 1), "0.02");
  EXPECT_EQ(decimal_view(frac(35, 1000), 1), "0.04");
  // Rounding up carries into a new digit.
  EXPECT_EQ(decimal_view(frac(99999999999, 100000000000)), "1.0");
  EXPECT_EQ(decimal_view(frac(1, 1000000)), "0.000001");
}

TEST(FormulasTest, DirectIbprfIsExactlyMOverN) {
  EXPECT_EQ(p_direct_ibprf(1000, 100).fraction(), "1/10");
  EXPECT_EQ(p_direct_ibprf(2000, 200).decimal(), "0.1");
  EXPECT_EQ(p_direct_ibprf(101, 100).fraction(), "100/101");
  for (std::uint64_t n = 200; n <= 10000; n += 997) {
    for (std::uint64_t m : {100u, 150u, 199u}) {
      EXPECT_EQ(p_direct_ibprf(n, m).value(), Rational(BigInt(m), BigInt(n)));
    }
  }
  EXPECT_THROW(p_direct_ibprf(100, 100), DomainError);
  EXPECT_THROW(p_direct_ibprf(100, 0), DomainError);
  try {
    p_direct_ibprf(100, 100);
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("n=100"), std::string::npos);
  }
}

TEST(FormulasTest, BidirectionalForm) {
  EXPECT_EQ(p_direct_bidirectional(5, 2).fraction(), "3/4");
  EXPECT_EQ(p_direct_bidirectional(1000, 100).fraction(), "189800/998001");
  EXPECT_NEAR(p_direct_bidirectional(1000, 100).to_double(), 0.1902, 5e-5);
}

TEST(FormulasTest, OneHop) {
  EXPECT_NEAR(p_onehop(0.1, 20), 0.26388375616249227, 1e-12);
  EXPECT_NEAR(p_onehop(0.2, 60), 0.9309181484119163, 1e-12);
  EXPECT_NEAR(p_onehop(0.1, 100), 0.6705708928540937, 1e-12);
  EXPECT_EQ(p_onehop(0.0, 50), 0.0);
  EXPECT_EQ(p_onehop(1.0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p_onehop(0.3, 0), 0.3);
  EXPECT_THROW(p_onehop(1.5, 3), DomainError);
  EXPECT_THROW(p_onehop(-0.1, 3), DomainError);
  EXPECT_THROW(p_onehop(std::nan(""), 3), DomainError);
  for (int i = 0; i < 100; ++i) {
    const double p = i / 100.0;
    EXPECT_LE(p_onehop(p, 20), p_onehop(p, 21));
    EXPECT_LE(p_onehop(p, 20), p_onehop(p + 0.01, 20));
  }
}

TEST(FormulasTest, Cells) {
  EXPECT_EQ(p_cell(500, 100).fraction(), "1/5");
  EXPECT_THROW(p_cell(100, 100), DomainError);
  const std::vector<ExactProbability> per{p_cell(500, 100), p_cell(250, 100)};
  EXPECT_EQ(p_avg_cells(per).fraction(), "3/10");
  EXPECT_THROW(p_avg_cells({}), DomainError);
}

TEST(FormulasTest, EschenauerGligor) {
  EXPECT_EQ(p_eg(100, 10).fraction(), "1053605815867/1573664496040");
  EXPECT_NEAR(p_eg(100, 10).to_double(), 0.6695, 5e-5);
  EXPECT_EQ(p_eg(10, 6).fraction(), "1/1");
  EXPECT_EQ(p_eg(10, 5).fraction(), "251/252");
  EXPECT_THROW(p_eg(10, 11), DomainError);
  // M = 10^4 would overflow 64-bit binomials; exact arithmetic copes.
  EXPECT_GT(p_eg(10000, 100).to_double(), 0.6);
}

TEST(FormulasTest, QComposite) {
  EXPECT_EQ(p_qcomposite(4, 2, 2).fraction(), "1/6");
  EXPECT_EQ(p_qcomposite(100, 10, 2).fraction(), "411558062567/1573664496040");
  EXPECT_EQ(p_qcomposite(100, 10, 1), p_eg(100, 10));
  for (std::uint64_t q = 1; q < 10; ++q) {
    EXPECT_FALSE(p_qcomposite(100, 10, q) < p_qcomposite(100, 10, q + 1)) << q;
  }
  Rational total = 0;
  for (std::uint64_t i = 0; i <= 10; ++i) total += p_qcomposite_term(100, 10, i).value();
  EXPECT_EQ(total, 1);
  EXPECT_THROW(p_qcomposite(100, 10, 0), DomainError);
  EXPECT_THROW(p_qcomposite(100, 10, 11), DomainError);
}

TEST(FormulasTest, PolyPool) {
  EXPECT_EQ(p_polypool(10, 2).fraction(), "17/45");
  EXPECT_EQ(p_polypool(10, 2).decimal(), "0.3777777778");
  EXPECT_EQ(p_polypool(7, 7).fraction(), "1/1");
  EXPECT_THROW(p_polypool(2, 3), DomainError);
  EXPECT_EQ(polypool_max_n(99, 50, 2), 2500u);
  EXPECT_EQ(polypool_max_n(1, 3, 2), 3u);
  EXPECT_THROW(polypool_max_n(0, 50, 2), DomainError);
  EXPECT_THROW(polypool_max_n(2, 50, 0), DomainError);
  EXPECT_THROW(polypool_max_n(2, 5, 6), DomainError);
}

TEST(FiguresTest, Figure1MatchesClosedForm) {
  const CsvTable t = figure1();
  EXPECT_EQ(t.schema, "figure1/v1");
  const auto cm = column(t, "m"), cn = column(t, "n"), cx = column(t, "p_exact"),
             cp = column(t, "p");
  std::map<std::string, int> per_m;
  bool saw_spot = false;
  for (const auto& row : t.rows) {
    ++per_m[row[cm]];
    const auto m = std::stoull(row[cm]), n = std::stoull(row[cn]);
    EXPECT_EQ(row[cx], p_direct_ibprf(n, m).fraction());
    EXPECT_EQ(row[cp], p_direct_ibprf(n, m).decimal());
    if (m == 200 && n == 2000) {
      EXPECT_EQ(row[cp], "0.1");
      saw_spot = true;
    }
  }
  EXPECT_TRUE(saw_spot);
  EXPECT_EQ(per_m.size(), 3u);
  EXPECT_EQ(per_m["100"], per_m["200"]);
}

TEST(FiguresTest, Figure2MatchesOneHop) {
  const CsvTable t = figure2();
  EXPECT_EQ(t.schema, "figure2/v1");
  const auto cd = column(t, "d"), cp = column(t, "p"), cs = column(t, "p_s");
  std::map<std::string, int> per_d;
  for (const auto& row : t.rows) {
    ++per_d[row[cd]];
    const double p = std::stod(row[cp]);
    EXPECT_NEAR(std::stod(row[cs]), p_onehop(p, std::stoull(row[cd])), 1e-12);
  }
  EXPECT_EQ(per_d.size(), 3u);
  EXPECT_EQ(per_d["60"], 101);
}

TEST(FiguresTest, Figure3RespectsBudgetAndBound) {
  const CsvTable t = figure3();
  EXPECT_EQ(t.schema, "figure3/v1");
  const auto cser = column(t, "series"), cn = column(t, "n"), cp = column(t, "p"),
             cs = column(t, "s"), csp = column(t, "sprime"), ct = column(t, "t"),
             cmax = column(t, "max_n");
  int ibprf_rows = 0, poly_rows = 0;
  for (const auto& row : t.rows) {
    const auto n = std::stoull(row[cn]);
    if (row[cser] == "ibprf") {
      ++ibprf_rows;
      EXPECT_EQ(p_direct_ibprf(n, 200).value() * n, 200);
      EXPECT_EQ(row[cs], "");
    } else {
      ++poly_rows;
      const auto s = std::stoull(row[cs]), sp = std::stoull(row[csp]), tt = std::stoull(row[ct]);
      EXPECT_EQ(sp * (tt + 1), 200u);
      EXPECT_LE(std::stoull(row[cmax]), (tt + 1) * s / sp);
      EXPECT_GE(std::stoull(row[cmax]), n);
      EXPECT_EQ(row[cp], p_polypool(s, sp).decimal());
    }
  }
  EXPECT_GT(ibprf_rows, 0);
  EXPECT_GT(poly_rows, 0);
}
