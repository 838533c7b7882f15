#include <doctest.h>

#include "coboundary/errors.hpp"
#include "coboundary/solver.hpp"
#include "test_util.hpp"

using namespace coboundary;

namespace {

StepFunction plus_minus_halves() {
    return StepFunction({{Interval(Rational(0), Rational(1, 2)), Rational(1)},
                         {Interval(Rational(1, 2), Rational(1)), Rational(-1)}});
}

PiecewiseTranslation swap_halves() {
    return PiecewiseTranslation({{Interval(Rational(0), Rational(1, 2)), Rational(1, 2)},
                                 {Interval(Rational(1, 2), Rational(1)), Rational(-1, 2)}});
}

}  // namespace

TEST_CASE("verify certifies and refutes exactly") {
    SUBCASE("trivial solution") {
        const auto out = verify(StepFunction::zero(), PiecewiseTranslation::identity_full(),
                                StepFunction::zero());
        CHECK(out.exact());
        CHECK(out.certificate.exact_set == IntervalSet::full());
        CHECK(out.certificate.residual_bound.is_zero());
    }

    SUBCASE("swap of halves telescopes") {
        const auto g = StepFunction::indicator(IntervalSet(Rational(0), Rational(1, 2)), Rational(1));
        const auto f = g - pullback(g, swap_halves());
        CHECK(f == plus_minus_halves());
        const auto out = verify(f, swap_halves(), g);
        CHECK(out.exact());
        CHECK(out.certificate.sup_bound == Rational(1));
    }

    SUBCASE("computed coboundary for a rotation verifies") {
        const auto T = PiecewiseTranslation::rotation(Rational(1, 3));
        StepFunction g({{Interval(Rational(0), Rational(1, 3)), Rational(1)},
                        {Interval(Rational(1, 3), Rational(2, 3)), Rational(1, 2)}});
        const auto f = g - pullback(g, T);
        const auto out = verify(f, T, g);
        CHECK(out.exact());
    }

    SUBCASE("perturbed transfer yields a witness") {
        const auto g = StepFunction::indicator(IntervalSet(Rational(0), Rational(1, 2)), Rational(1));
        const auto f = g - pullback(g, swap_halves());
        const auto g_bad = g + StepFunction::indicator(IntervalSet(Rational(0), Rational(1, 8)),
                                                       Rational(1, 3));
        const auto out = verify(f, swap_halves(), g_bad);
        CHECK_FALSE(out.exact());
        // the defect lives where g_bad was bumped and where that bump pulls back
        CHECK(out.witness.contains(Rational(1, 16)));
        CHECK(out.witness.measure() == Rational(1, 4));
        CHECK(out.certificate.exact_set == out.witness.complement());
    }
}

TEST_CASE("coboundary extension along towers") {
    SUBCASE("height-1 towers reduce to the base solution") {
        // A = X split into two height-1 towers; T = swap, g_A solves directly
        Tower t1{{IntervalSet(Rational(0), Rational(1, 2))}, PiecewiseTranslation()};
        Tower t2{{IntervalSet(Rational(1, 2), Rational(1))}, PiecewiseTranslation()};
        const auto g_A =
            StepFunction::indicator(IntervalSet(Rational(0), Rational(1, 2)), Rational(1));
        const auto f = g_A - pullback(g_A, swap_halves());
        auto [T, g] = extend_coboundary(f, {t1, t2}, swap_halves(), g_A);
        CHECK(T == swap_halves());
        CHECK(g == g_A);
        CHECK(verify(f, T, g).exact());
    }

    SUBCASE("height-2 tower with zero base transfer") {
        // tower over [0,1/2): f = +1 on the base level, -1 on the top
        Tower tower{{IntervalSet(Rational(0), Rational(1, 2)), IntervalSet(Rational(1, 2), Rational(1))},
                    transport(IntervalSet(Rational(0), Rational(1, 2)),
                              IntervalSet(Rational(1, 2), Rational(1)))};
        const auto f = plus_minus_halves();
        const auto base_id = PiecewiseTranslation::identity(IntervalSet(Rational(0), Rational(1, 2)));
        auto [T, g] = extend_coboundary(f, {tower}, base_id, StepFunction::zero());
        // g carries 0 on the base and -(+1) = -1 on the second level
        CHECK(g == StepFunction::indicator(IntervalSet(Rational(1, 2), Rational(1)), Rational(-1)));
        CHECK(verify(f, T, g).exact());
    }

    SUBCASE("two-step towers end to end") {
        StepFunction f({{Interval(Rational(0), Rational(2, 3)), Rational(1)},
                        {Interval(Rational(2, 3), Rational(1)), Rational(-2)}});
        const auto pair = build_two_step_towers(f, IntervalSet::full(), 1, Rational(1, 8));
        const std::vector<Tower> towers{pair.first, pair.second};
        const StepFunction f_A = induced_sum(towers, f);
        CHECK(f_A.is_zero());  // commensurable route cancels exactly
        // cyclic base map: swap the two bases through order transport
        const IntervalSet b1 = pair.first.base(), b2 = pair.second.base();
        const auto T_A = transport(b1, b2).union_disjoint(transport(b2, b1));
        auto [T, g] = extend_coboundary(f, towers, T_A, StepFunction::zero());
        CHECK(verify(f, T, g).exact());
        CHECK(T.is_full_bijection());
    }

    SUBCASE("bad base solution is rejected") {
        // induced sum over this tower is +2 on the base, but the identity
        // base map telescopes every transfer to 0
        Tower tower{{IntervalSet(Rational(0), Rational(1, 4)), IntervalSet(Rational(1, 4), Rational(1, 2))},
                    transport(IntervalSet(Rational(0), Rational(1, 4)),
                              IntervalSet(Rational(1, 4), Rational(1, 2)))};
        const auto base_id = PiecewiseTranslation::identity(IntervalSet(Rational(0), Rational(1, 4)));
        const auto g_A = StepFunction::indicator(IntervalSet(Rational(0), Rational(1, 4)), Rational(1));
        CHECK_THROWS_AS(extend_coboundary(plus_minus_halves(), {tower}, base_id, g_A),
                        InvalidBaseSolution);
    }
}

TEST_CASE("bounded solutions") {
    SUBCASE("two halves in one stage") {
        const auto sol = construct_bounded_solution(plus_minus_halves(), Rational(1), 1);
        CHECK(sol.certificate.residual_bound.is_zero());
        CHECK(sol.certificate.sup_bound <= Rational(1));
        CHECK(sol.certificate.transformation.is_full_bijection());
        CHECK(verify(plus_minus_halves(), sol.certificate.transformation,
                     sol.certificate.transfer)
                  .exact());
        CHECK(sol.stages.size() == 1);
    }

    SUBCASE("balanced two-value shape, two stages") {
        StepFunction f({{Interval(Rational(0), Rational(3, 5)), Rational(2, 3)},
                        {Interval(Rational(3, 5), Rational(1)), Rational(-1)}});
        REQUIRE(f.integral().is_zero());
        const auto sol = construct_bounded_solution(f, Rational(1, 4), 2);
        CHECK(sol.certificate.residual_bound.is_zero());
        CHECK(sol.certificate.sup_bound <= f.sup_norm() + Rational(1, 4));
        CHECK(verify(f, sol.certificate.transformation, sol.certificate.transfer).exact());
        CHECK(sol.stages.size() == 2);
        // residual accounting: certificate residual within the stage bounds
        Rational beta_sum(0);
        for (const auto& st : sol.stages) beta_sum += st.residual_measure_bound;
        CHECK(sol.certificate.residual_bound <= beta_sum);
    }

    SUBCASE("zero function is the identity solution") {
        const auto sol = construct_bounded_solution(StepFunction::zero(), Rational(1, 2), 2);
        CHECK(sol.certificate.transformation == PiecewiseTranslation::identity_full());
        CHECK(sol.certificate.transfer.is_zero());
        CHECK(sol.certificate.residual_bound.is_zero());
    }

    SUBCASE("stage maps refine, never contradict") {
        StepFunction f({{Interval(Rational(0), Rational(1, 4)), Rational(2)},
                        {Interval(Rational(1, 4), Rational(1, 2)), Rational(-1)},
                        {Interval(Rational(1, 2), Rational(1)), Rational(-1, 2)}});
        REQUIRE(f.integral().is_zero());
        const auto sol = construct_bounded_solution(f, Rational(1, 4), 3);
        REQUIRE(sol.stages.size() == 3);
        for (std::size_t n = 0; n + 1 < sol.stages.size(); ++n) {
            const auto& cur = sol.stages[n].transformation;
            const auto& next = sol.stages[n + 1].transformation;
            // the next stage only defines new points
            CHECK(next.restrict_source(cur.domain()) == cur);
            CHECK(next.diff_measure(cur) <= sol.stages[n].residual_measure_bound);
            // per-stage transfer honors the sup bound
            CHECK(sol.stages[n].transfer.sup_norm() <= f.sup_norm() + Rational(1, 4));
        }
        // telescoping on the final certificate: S_n sums collapse to g - g.T^n
        const auto& T = sol.certificate.transformation;
        const auto& g = sol.certificate.transfer;
        StepFunction birkhoff = f;
        PiecewiseTranslation Tn = T;
        for (int n = 1; n <= 5; ++n) {
            CHECK(birkhoff == g - pullback(g, Tn));
            CHECK(birkhoff.sup_norm() <= Rational(2) * sol.certificate.sup_bound);
            birkhoff = birkhoff + pullback(f, Tn);
            Tn = compose(T, Tn);
        }
    }

    SUBCASE("randomized corpus stays within the bound") {
        testutil::Rng rng(31);
        for (int i = 0; i < 6; ++i) {
            const auto f = rng.mean_zero_step(4, 6);
            const auto sol = construct_bounded_solution(f, Rational(1, 4), 2);
            CHECK(sol.certificate.sup_bound <= f.sup_norm() + Rational(1, 4));
            CHECK(sol.certificate.residual_bound.is_zero());
            CHECK(verify(f, sol.certificate.transformation, sol.certificate.transfer).exact());
        }
    }

    CHECK_THROWS_AS(
        construct_bounded_solution(StepFunction::indicator(IntervalSet::full(), Rational(1)),
                                   Rational(1, 2), 1),
        UnbalancedInput);
}

TEST_CASE("verify is an involution witness on random pairs") {
    testutil::Rng rng(53);
    for (int i = 0; i < 15; ++i) {
        const auto T = rng.bijection();
        const auto g = rng.mean_zero_step(5);
        const auto f = g - pullback(g, T);
        const auto out = verify(f, T, g);
        CHECK(out.exact());
        CHECK(out.certificate.exact_set == IntervalSet::full());
    }
}

TEST_CASE("unbalanced functions refute every constructed pair") {
    // a coboundary of a bijection always integrates to zero, so any
    // unbalanced f leaves a witness set against any (T, g) we build
    testutil::Rng rng(59);
    const auto f = StepFunction({{Interval(Rational(0), Rational(1, 4)), Rational(2)},
                                 {Interval(Rational(1, 4), Rational(1, 2)), Rational(-1)}});
    REQUIRE(check_solvability(f) == Solvability::Unbalanced);
    for (int i = 0; i < 10; ++i) {
        const auto T = rng.bijection();
        const auto g = rng.mean_zero_step(4);
        const auto out = verify(f, T, g);
        CHECK_FALSE(out.exact());
        CHECK(out.witness.measure() > Rational(0));
    }
}

TEST_CASE("solvability verdicts") {
    CHECK(check_solvability(plus_minus_halves()) == Solvability::BalancedFinite);
    CHECK(check_solvability(StepFunction::indicator(IntervalSet(Rational(0), Rational(1, 2)),
                                                    Rational(1))) == Solvability::Unbalanced);
    StepFunction f({{Interval(Rational(0), Rational(1, 4)), Rational(2)},
                    {Interval(Rational(1, 4), Rational(1, 2)), Rational(-1)}});
    CHECK(check_solvability(f) == Solvability::Unbalanced);  // masses 1/2 vs 1/4
    CHECK(check_solvability(StepFunction::zero()) == Solvability::BalancedFinite);
}

TEST_CASE("banded construction") {
    SUBCASE("small function reduces to a single band") {
        const auto sol = construct_lp_solution(plus_minus_halves(), Rational(2), {}, 1);
        CHECK(sol.bands.size() == 1);
        CHECK(sol.bands.front().k == 1);
        CHECK(sol.bands.front().l == 1);
        CHECK(sol.certificate.residual_bound.is_zero());
        CHECK(verify(plus_minus_halves(), sol.certificate.transformation,
                     sol.certificate.transfer)
                  .exact());
    }

    SUBCASE("two bands split and balance per condition (5)") {
        // values +3 (mass 3/8), +1 (mass 1/4), -1 (mass 5/8): bands k=1 and k=3
        StepFunction f({{Interval(Rational(0), Rational(1, 8)), Rational(3)},
                        {Interval(Rational(1, 8), Rational(3, 8)), Rational(1)},
                        {Interval(Rational(3, 8), Rational(1)), Rational(-1)}});
        REQUIRE(f.integral().is_zero());
        const auto sol = construct_lp_solution(f, Rational(2), {}, 1);
        CHECK(sol.bands.size() == 2);
        CHECK(sol.bands[0].k == 1);
        CHECK(sol.bands[1].k == 3);
        for (const auto& band : sol.bands) {
            // condition (5): each band is exactly balanced
            CHECK(f.integral_over(band.x_part) + f.integral_over(band.y_part) == Rational(0));
            CHECK(band.transfer_sup < band.bound);
        }
        CHECK(verify(f, sol.certificate.transformation, sol.certificate.transfer).exact());
    }

    SUBCASE("comparison chain certified on an all-large corpus") {
        testutil::Rng rng(37);
        for (int i = 0; i < 4; ++i) {
            // values pushed beyond 2 in magnitude so every band enters the chain
            auto raw = rng.mean_zero_step(4, 6);
            StepFunction f = raw.map_values([](const Rational& v) {
                return v + (v.sign() > 0 ? Rational(3) : Rational(-3));
            });
            const Rational balance = f.integral();
            // rebalance exactly by scaling the negative side
            const Rational neg_mass = f.restrict(f.below(Rational(0))).integral();
            const Rational scale = (balance - neg_mass) / (-neg_mass);
            f = f.restrict(f.above(Rational(0))) +
                f.restrict(f.below(Rational(0))).scale(scale);
            REQUIRE(f.integral().is_zero());
            const auto sol = construct_lp_solution(f, Rational(2), {}, 1);
            CHECK(sol.j_star == 0);
            CHECK(sol.ell_j >= 1);
            CHECK(sol.chain_holds);
            CHECK(verify(f, sol.certificate.transformation, sol.certificate.transfer).exact());
        }
    }

    SUBCASE("chain inequality evaluated exactly for p = 2") {
        StepFunction f({{Interval(Rational(0), Rational(1, 8)), Rational(7, 2)},
                        {Interval(Rational(1, 8), Rational(1, 2)), Rational(-7, 6)}});
        REQUIRE(f.integral().is_zero());
        const auto sol = construct_lp_solution(f, Rational(2), {}, 1);
        REQUIRE(sol.lhs.exact);
        REQUIRE(sol.rhs.exact);
        // rhs = 2 ||f||_1 + (4/ell) ||f||_2^2 computed independently
        const Rational expect_rhs = Rational(2) * f.lp_norm_pow(1) +
                                    Rational(4) / Rational(sol.ell_j) * f.lp_norm_pow(2);
        CHECK(sol.rhs.lower == expect_rhs);
        CHECK(sol.lhs.upper <= expect_rhs);
    }
}
