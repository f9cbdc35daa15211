#include <gtest/gtest.h>

#include "kernelbayes/kernel.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

namespace kb {
namespace {

using testing::Random;

TEST(Kernel, RejectsNonStochasticRows) {
  auto two = two_point();
  EXPECT_THROW(StochasticKernel(two, two, {Rational(1), Rational(0), Rational(1, 2), Rational(1, 3)}), Error);
  EXPECT_THROW(StochasticKernel(two, two, {Rational(2), Rational(-1), Rational(1), Rational(0)}), Error);
  EXPECT_THROW(StochasticKernel(two, two, {Rational(1)}), Error);
}

TEST(Compose, UnitLaws) {
  Random rnd(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = rnd.space_up_to(5, "x"), y = rnd.space_up_to(5, "y");
    auto f = rnd.kernel(x, y);
    EXPECT_EQ(compose(StochasticKernel::identity(y), f), f);
    EXPECT_EQ(compose(f, StochasticKernel::identity(x)), f);
  }
}

TEST(Compose, PrecompositionWithDirac) {
  // (f ∘ δ_p)(x, C) = f(p(x), C)
  Random rnd(32);
  for (int trial = 0; trial < 30; ++trial) {
    auto w = rnd.space_up_to(4, "w"), x = rnd.space_up_to(4, "x"), y = rnd.space_up_to(4, "y");
    auto p = rnd.function(w, x);
    auto f = rnd.kernel(x, y);
    auto composite = compose(f, lift_dirac(p));
    for (std::size_t a = 0; a < w.atom_count(); ++a)
      for (const auto& c : MeasurableSet::all_of(y))
        EXPECT_EQ(composite(a, c), f(x.atom_of(p(w.atom(a).front())), c));
  }
}

TEST(Compose, PostcompositionWithDirac) {
  // (δ_q ∘ g)(x, C) = g(x, q⁻¹C)
  Random rnd(33);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = rnd.space_up_to(4, "x"), y = rnd.space_up_to(4, "y"), z = rnd.space_up_to(4, "z");
    auto g = rnd.kernel(x, y);
    auto q = rnd.function(y, z);
    auto composite = compose(lift_dirac(q), g);
    for (const auto& c : MeasurableSet::all_of(z)) {
      std::vector<std::size_t> pre;
      for (std::size_t b = 0; b < y.atom_count(); ++b)
        if (c.contains_point(q(y.atom(b).front()))) pre.push_back(b);
      const auto preimage = MeasurableSet::of_atoms(y, pre);
      for (std::size_t a = 0; a < x.atom_count(); ++a) EXPECT_EQ(composite(a, c), g(a, preimage));
    }
  }
}

TEST(Compose, SpaceMismatch) {
  auto two = two_point();
  auto three = MeasurableSpace::discrete({"a", "b", "c"});
  EXPECT_THROW(compose(StochasticKernel::identity(two), StochasticKernel::identity(three)), Error);
}

TEST(Compose, MatchesMatrixProduct) {
  Random rnd(34);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = rnd.space_up_to(6, "x"), y = rnd.space_up_to(6, "y"), z = rnd.space_up_to(6, "z");
    auto f = rnd.kernel(x, y), g = rnd.kernel(y, z);
    auto expected = oracle::mat_mat(oracle::to_mat(f.entries(), f.cols()), oracle::to_mat(g.entries(), g.cols()));
    EXPECT_EQ(oracle::to_mat(compose(g, f).entries(), z.atom_count()), expected);
  }
}

TEST(Compose, Associative) {
  Random rnd(35);
  for (int trial = 0; trial < 50; ++trial) {
    auto w = rnd.space_up_to(5), x = rnd.space_up_to(5), y = rnd.space_up_to(5), z = rnd.space_up_to(5);
    auto f = rnd.kernel(w, x), g = rnd.kernel(x, y), h = rnd.kernel(y, z);
    EXPECT_EQ(compose(h, compose(g, f)), compose(compose(h, g), f));
  }
}

TEST(LiftDirac, IdentityAndFunctoriality) {
  Random rnd(36);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = rnd.space_up_to(5, "x"), y = rnd.space_up_to(5, "y"), z = rnd.space_up_to(5, "z");
    EXPECT_EQ(lift_dirac(MeasurableFunction::identity(x)), StochasticKernel::identity(x));
    auto f = rnd.function(x, y), g = rnd.function(y, z);
    EXPECT_EQ(lift_dirac(compose(g, f)), compose(lift_dirac(g), lift_dirac(f)));
  }
}

TEST(LiftDirac, ConstantHasIdenticalRows) {
  auto x = MeasurableSpace::discrete({"a", "b", "c"});
  auto k = lift_dirac(MeasurableFunction::constant(x, two_point(), 1));
  EXPECT_TRUE(is_independent(k));
  for (std::size_t r = 0; r < k.rows(); ++r) EXPECT_EQ(k.row(r), dirac(two_point(), kBottom));
}

TEST(Apply, Examples) {
  Random rnd(37);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = rnd.space_up_to(6, "x"), y = rnd.space_up_to(6, "y");
    auto p = rnd.probability(x);
    EXPECT_EQ(apply(StochasticKernel::identity(x), p), p);
    auto g = rnd.function(x, y);
    EXPECT_EQ(apply(lift_dirac(g), p), pushforward(g, p));
    auto f = rnd.kernel(x, y);
    EXPECT_EQ(apply(f, p).weights(), oracle::vec_mat(p.weights(), oracle::to_mat(f.entries(), f.cols())));
    // Kleisli composite with P: 1 → X.
    EXPECT_EQ(apply(f, p), compose(f, StochasticKernel::from_probability(p)).to_probability());
  }
}

TEST(Apply, RespectsComposition) {
  Random rnd(38);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = rnd.space_up_to(5), y = rnd.space_up_to(5), z = rnd.space_up_to(5);
    auto f = rnd.kernel(x, y), g = rnd.kernel(y, z);
    auto p = rnd.probability(x);
    EXPECT_EQ(apply(compose(g, f), p), apply(g, apply(f, p)));
  }
}

TEST(Determinism, Examples) {
  auto x = MeasurableSpace::discrete({"a", "b", "c"});
  auto f = MeasurableFunction::from_labels(x, two_point(), {{"a", "⊤"}, {"b", "⊥"}, {"c", "⊤"}});
  auto report = is_deterministic(lift_dirac(f));
  EXPECT_TRUE(report.deterministic);
  ASSERT_TRUE(report.witness);
  EXPECT_EQ(*report.witness, f);

  EXPECT_FALSE(is_deterministic(constant_kernel(two_point(), Probability::uniform(two_point()))).deterministic);

  auto ind = MeasurableSpace::indiscrete({"u", "v"});
  auto into_ind = lift_dirac(MeasurableFunction::constant(x, ind, 0));
  auto r2 = is_deterministic(into_ind);
  EXPECT_TRUE(r2.deterministic);
  EXPECT_FALSE(r2.witness);
}

TEST(Bang, Terminality) {
  Random rnd(39);
  auto two = two_point();
  EXPECT_EQ(bang(two).entries(), (std::vector<Rational>{1, 1}));
  for (int trial = 0; trial < 20; ++trial) {
    auto x = rnd.space_up_to(5), y = rnd.space_up_to(5);
    auto f = rnd.kernel(x, y);
    EXPECT_EQ(compose(bang(y), f), bang(x));
    EXPECT_EQ(apply(bang(x), rnd.probability(x)), dirac(terminal(), kUnitPoint));
  }
}

TEST(ConstantKernel, Examples) {
  auto x = MeasurableSpace::discrete({"a", "b", "c"});
  auto y = MeasurableSpace::discrete({"u", "v"});
  EXPECT_EQ(constant_kernel(x, dirac(y, "v")), lift_dirac(MeasurableFunction::constant(x, y, 1)));
  Probability q(y, {Rational(1, 3), Rational(2, 3)});
  auto k = constant_kernel(x, q);
  EXPECT_TRUE(is_independent(k));
  for (std::size_t r = 0; r < k.rows(); ++r) EXPECT_EQ(k.row(r), q);
}

TEST(Independence, Examples) {
  EXPECT_FALSE(is_independent(StochasticKernel::identity(two_point())));
  Random rnd(40);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = rnd.space(3), y = rnd.space(3);
    auto q = rnd.probability(y, 0);
    std::vector<Probability> rows(x.atom_count(), q);
    // Perturb one row: move mass between two columns.
    const std::size_t r = rnd.below(x.atom_count());
    auto w = q.weights();
    const Rational delta = w[0] / 2;
    w[0] -= delta;
    w[1] += delta;
    rows[r] = Probability(y, w);
    auto k = StochasticKernel::from_measures(x, rows);
    bool rows_equal = true;
    for (std::size_t i = 1; i < rows.size(); ++i) rows_equal = rows_equal && rows[i] == rows[0];
    EXPECT_EQ(is_independent(k), rows_equal);
    EXPECT_FALSE(rows_equal);
  }
}

TEST(UnitFunctions, Examples) {
  auto x = MeasurableSpace::discrete({"a", "b", "c"});
  auto a = MeasurableSet::of_points(x, {"a", "c"});
  // χ_A as a point map into 2: members go to ⊤.
  std::vector<std::size_t> image{0, 1, 0};
  auto chi = MeasurableFunction::make({x, two_point(), image});
  EXPECT_EQ(kernel_to_unit_function(lift_dirac(chi)).values, SimpleFunction::indicator(a).values);
  auto c = constant_kernel(x, Probability(two_point(), {Rational(2, 7), Rational(5, 7)}));
  EXPECT_EQ(kernel_to_unit_function(c).values, std::vector<Rational>(3, Rational(2, 7)));
  EXPECT_THROW(kernel_to_unit_function(StochasticKernel::identity(x)), Error);
}

TEST(UnitFunctions, RoundTrip) {
  Random rnd(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = rnd.space_up_to(6);
    auto k = rnd.kernel(x, two_point());
    EXPECT_EQ(unit_function_to_kernel(kernel_to_unit_function(k)), k);
  }
}

TEST(Properties, OneAtomDomainIsAMeasure) {
  Random rnd(42);
  auto y = rnd.space(4);
  auto k = rnd.kernel(terminal(), y);
  EXPECT_EQ(StochasticKernel::from_probability(k.to_probability()), k);
}

TEST(Properties, SeparatorOnDiracs) {
  Random rnd(43);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = MeasurableSpace::discrete({"a", "b", "c"});
    auto y = rnd.space(3);
    auto f = rnd.kernel(x, y), g = rnd.kernel(x, y);
    bool agree = true;
    for (std::size_t p = 0; p < x.point_count(); ++p) agree = agree && apply(f, dirac(x, p)) == apply(g, dirac(x, p));
    EXPECT_EQ(agree, f == g);
    // A kernel that differs from f in one row is detected by some dirac input.
    auto rows = std::vector<Probability>{f.row(0), f.row(1), f.row(2)};
    rows[rnd.below(3)] = rnd.probability(y);
    auto h = StochasticKernel::from_measures(x, rows);
    bool h_agrees = true;
    for (std::size_t p = 0; p < x.point_count(); ++p) h_agrees = h_agrees && apply(f, dirac(x, p)) == apply(h, dirac(x, p));
    EXPECT_EQ(h_agrees, f == h);
  }
}

}  // namespace
}  // namespace kb
