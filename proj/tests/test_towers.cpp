#include <doctest.h>

#include "coboundary/errors.hpp"
#include "coboundary/tower.hpp"
#include "test_util.hpp"

using namespace coboundary;

namespace {

StepFunction plus_minus_halves() {
    return StepFunction({{Interval(Rational(0), Rational(1, 2)), Rational(1)},
                         {Interval(Rational(1, 2), Rational(1)), Rational(-1)}});
}

// Running sums within ||f||_inf + eps strictly, full sums within eps,
// checked on the exact branch refinement.
void check_tub_contract(const Tower& tower, const StepFunction& f, const Rational& eps) {
    tower.validate();
    const auto sums = tower_running_sums(tower, f);
    const Rational bound = f.sup_norm() + eps;
    for (std::size_t k = 0; k < sums.size(); ++k) {
        CHECK(sums[k].sup_norm() < bound);
    }
    CHECK(sums.back().sup_norm() < eps);
}

}  // namespace

TEST_CASE("balanced partition tiles exactly") {
    const IntervalSet A = IntervalSet::full();

    SUBCASE("constant function gives a single cell") {
        const auto pub = build_pub_partition(StepFunction::zero(), A, Rational(1, 2));
        CHECK(pub.cells.size() == 1);
        CHECK(pub.cells.front() == A);
        CHECK(pub.exceptional.empty());
    }

    SUBCASE("two halves") {
        const auto pub = build_pub_partition(plus_minus_halves(), A, Rational(1, 4));
        CHECK(pub.cells.size() == 2);
        for (const auto& cell : pub.cells) CHECK(cell.measure() == Rational(1, 2));
        CHECK(pub.exceptional.measure().is_zero());
    }

    SUBCASE("three unequal level sets") {
        // level measures 1/3, 1/6, 1/2 -> 6 equal cells, no exceptional set
        StepFunction f({{Interval(Rational(0), Rational(1, 3)), Rational(1)},
                        {Interval(Rational(1, 3), Rational(1, 2)), Rational(2)},
                        {Interval(Rational(1, 2), Rational(1)), Rational(3)}});
        const auto pub = build_pub_partition(f, A, Rational(1, 10));
        CHECK(pub.cells.size() == 6);
        for (const auto& cell : pub.cells) {
            CHECK(cell.measure() == Rational(1, 6));
            CHECK(f.mass_by_value(cell).size() == 1);  // constant per cell
        }
        CHECK(pub.exceptional.measure() < Rational(1, 10));
        // exact balance identity
        const IntervalSet covered = unite_all(pub.cells);
        CHECK(f.integral_over(covered) == covered.measure() / A.measure() * f.integral_over(A));
        CHECK(covered.unite(pub.exceptional) == A);
    }

    SUBCASE("random partitions cover without overlap") {
        testutil::Rng rng(11);
        for (int i = 0; i < 10; ++i) {
            const auto f = rng.mean_zero_step(5);
            const auto pub = build_pub_partition(f, A, Rational(1, 8), 4);
            CHECK(pub.cells.size() >= 4);
            const Rational cell_measure = pub.cells.front().measure();
            Rational sum(0);
            for (std::size_t a = 0; a < pub.cells.size(); ++a) {
                CHECK(pub.cells[a].measure() == cell_measure);
                sum += pub.cells[a].measure();
                for (std::size_t b = a + 1; b < pub.cells.size(); ++b)
                    CHECK(pub.cells[a].disjoint_from(pub.cells[b]));
            }
            CHECK(sum == Rational(1));
        }
    }

    CHECK_THROWS_AS(build_pub_partition(StepFunction::zero(), IntervalSet(), Rational(1, 2)),
                    DegenerateInput);
}

TEST_CASE("greedy stacking") {
    auto cells = [](std::vector<long> nums, long den) {
        std::vector<std::pair<IntervalSet, Rational>> out;
        for (std::size_t i = 0; i < nums.size(); ++i)
            out.emplace_back(IntervalSet(Rational(static_cast<long>(i), 100),
                                         Rational(static_cast<long>(i) * 100 + 1, 10000)),
                             Rational(nums[i], den));
        return out;
    };

    CHECK(greedy_stack(cells({1, -1}, 1)) == std::vector<std::size_t>{0, 1});
    CHECK(greedy_stack(cells({2, -1, -1}, 1)) == std::vector<std::size_t>{0, 1, 2});
    // a nonpositive start forces a nonnegative first cell
    CHECK(greedy_stack(cells({-1, -1, 1, 1}, 1)) == std::vector<std::size_t>{2, 0, 3, 1});
    CHECK_THROWS_AS(greedy_stack(cells({1, 1, -1}, 1)), UnbalancedInput);

    testutil::Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        std::vector<long> vals;
        long acc = 0;
        for (int i = 0; i < 7; ++i) {
            long v = rng.uniform(-5, 5);
            vals.push_back(v);
            acc += v;
        }
        vals.push_back(-acc);
        const auto cs = cells(vals, 7);
        const auto order = greedy_stack(cs);
        Rational prefix(0), maxabs(0);
        for (const auto& [s, integral] : cs) maxabs = max(maxabs, integral.abs());
        for (const auto idx : order) {
            prefix += cs[idx].second;
            CHECK(prefix.abs() <= maxabs);
        }
        CHECK(prefix.is_zero());
    }
}

TEST_CASE("balanced uniform towers") {
    const IntervalSet A = IntervalSet::full();

    SUBCASE("two halves cancel at height 2") {
        const auto tower = build_tub_tower(plus_minus_halves(), A, Rational(1, 4), 1);
        CHECK(tower.height() == 2);
        check_tub_contract(tower, plus_minus_halves(), Rational(1, 4));
        const auto sums = tower_running_sums(tower, plus_minus_halves());
        CHECK(sums.back() == StepFunction::zero());
    }

    SUBCASE("one positive level against two negatives") {
        StepFunction f({{Interval(Rational(0), Rational(1, 3)), Rational(1)},
                        {Interval(Rational(1, 3), Rational(1)), Rational(-1, 2)}});
        const auto tower = build_tub_tower(f, A, Rational(1, 10), 1);
        CHECK(tower.height() == 3);
        const auto sums = tower_running_sums(tower, f);
        // running sums are constant per level: 1, 1/2, 0
        CHECK(sums[0] == StepFunction::indicator(tower.base(), Rational(1)));
        CHECK(sums[1] == StepFunction::indicator(tower.base(), Rational(1, 2)));
        CHECK(sums[2] == StepFunction::zero());
        check_tub_contract(tower, f, Rational(1, 10));
    }

    SUBCASE("random mean-zero functions, exhaustive walk") {
        testutil::Rng rng(17);
        for (int i = 0; i < 8; ++i) {
            const auto f = rng.mean_zero_step(4);
            const auto tower = build_tub_tower(f, A, Rational(1, 8), 3);
            CHECK(tower.height() > 3);
            check_tub_contract(tower, f, Rational(1, 8));
            CHECK(tower.span() == A);
        }
    }

    SUBCASE("partition atoms are exact unions of levels") {
        const std::vector<IntervalSet> Q{IntervalSet(Rational(0), Rational(1, 2))};
        const auto tower = build_tub_tower(plus_minus_halves(), A, Rational(1, 4), 3, Q);
        IntervalSet inside;
        for (const auto& level : tower.levels)
            if (level.subset_of(Q[0])) inside = inside.unite(level);
        CHECK(inside == Q[0]);
    }

    SUBCASE("zero function still honors the height request") {
        const auto tower = build_tub_tower(StepFunction::zero(), A, Rational(1, 2), 4);
        CHECK(tower.height() == 5);
        check_tub_contract(tower, StepFunction::zero(), Rational(1, 2));
    }

    CHECK_THROWS_AS(
        build_tub_tower(StepFunction::indicator(IntervalSet(Rational(0), Rational(1, 2)), Rational(1)),
                        A, Rational(1, 4), 1),
        UnbalancedInput);
}

TEST_CASE("level refinement") {
    SUBCASE("constant per level leaves the map unchanged") {
        const auto tower = build_tub_tower(plus_minus_halves(), IntervalSet::full(), Rational(1, 4), 1);
        const auto refined = refine_levels(tower, plus_minus_halves(), Rational(1, 2));
        CHECK(refined.map == tower.map);
        CHECK(refined.levels == tower.levels);
    }

    SUBCASE("opposite orderings pair large with small") {
        Tower tower;
        tower.levels = {IntervalSet(Rational(0), Rational(1, 2)),
                        IntervalSet(Rational(1, 2), Rational(1))};
        tower.map = transport(tower.levels[0], tower.levels[1]);
        StepFunction f({{Interval(Rational(1, 4), Rational(1, 2)), Rational(1, 2)},
                        {Interval(Rational(1, 2), Rational(3, 4)), Rational(1, 2)}});
        const auto refined = refine_levels(tower, f, Rational(1));
        refined.validate();
        // large-f base points land on small-f level-2 points
        CHECK(refined.map.apply(Rational(1, 8)) == Rational(5, 8));
        CHECK(refined.map.apply(Rational(3, 8)) == Rational(7, 8));
        const auto sums = tower_running_sums(refined, f);
        // two-step sums are flat at 1/2 from every base point
        CHECK(sums[1] == StepFunction::indicator(tower.levels[0], Rational(1, 2)));
    }

    SUBCASE("controlled oscillation keeps base sums within epsilon") {
        const Rational eps(1, 4);
        Tower tower;
        tower.levels = {IntervalSet(Rational(0), Rational(1, 3)),
                        IntervalSet(Rational(1, 3), Rational(2, 3)),
                        IntervalSet(Rational(2, 3), Rational(1))};
        tower.map = transport(tower.levels[0], tower.levels[1])
                        .union_disjoint(transport(tower.levels[1], tower.levels[2]));
        std::vector<StepFunction::Piece> ps;
        testutil::Rng rng(23);
        for (int level = 0; level < 3; ++level) {
            const Rational base_v(rng.uniform(-3, 3), 3);
            for (int j = 0; j < 4; ++j) {
                const Rational lo = Rational(level, 3) + Rational(j, 12);
                const Rational wiggle(rng.uniform(0, 3), 60);  // spread below eps/3
                ps.push_back({Interval(lo, lo + Rational(1, 12)), base_v + wiggle});
            }
        }
        const StepFunction f(std::move(ps));
        const auto refined = refine_levels(tower, f, eps);
        refined.validate();
        const auto sums = tower_running_sums(refined, f);
        for (const auto& s : sums) {
            // exhaustive spread over the refined branches
            Rational lo(0), hi(0);
            bool first = true;
            for (const auto& p : s.pieces()) {
                lo = first ? p.value : min(lo, p.value);
                hi = first ? p.value : max(hi, p.value);
                first = false;
            }
            if (s.support() != tower.base() && !first) {
                lo = min(lo, Rational(0));
                hi = max(hi, Rational(0));
            }
            CHECK(hi - lo < eps);
        }
    }
}

TEST_CASE("two-step towers") {
    const IntervalSet A = IntervalSet::full();

    SUBCASE("symmetric halves") {
        const auto pair = build_two_step_towers(plus_minus_halves(), A, 3, Rational(1, 10));
        CHECK(pair.first.height() == pair.second.height());
        CHECK(pair.first.height() > 3);
        pair.first.validate();
        pair.second.validate();
        CHECK(pair.first.span().unite(pair.second.span()) == A);
        CHECK(pair.first.span().disjoint_from(pair.second.span()));
        for (const Tower* t : {&pair.first, &pair.second}) {
            const auto sums = tower_running_sums(*t, plus_minus_halves());
            CHECK(sums.back() == StepFunction::zero());
        }
    }

    SUBCASE("one value against two blocks") {
        StepFunction f({{Interval(Rational(0), Rational(2, 3)), Rational(1)},
                        {Interval(Rational(2, 3), Rational(1)), Rational(-2)}});
        REQUIRE(f.integral().is_zero());
        const auto pair = build_two_step_towers(f, A, 1, Rational(1, 10));
        CHECK(pair.first.height() == 3);  // two +1 cells and one -2 cell
        const auto sums = tower_running_sums(pair.first, f);
        CHECK(sums.back() == StepFunction::zero());
        for (const auto& s : sums) CHECK(s.sup_norm() <= f.sup_norm());
    }

    SUBCASE("supplied convergent pairs") {
        // b/c = 41/29 with the pairs (5,7) and (17,24): defects 1/50 and 1/100
        StepFunction f({{Interval(Rational(0), Rational(29, 70)), Rational(41, 100)},
                        {Interval(Rational(29, 70), Rational(1)), Rational(-29, 100)}});
        REQUIRE(f.integral().is_zero());
        const ConvergentPair cp{5, 7, 17, 24};
        const auto pair = build_two_step_towers(f, A, 20, Rational(1, 2), cp);
        CHECK(pair.first.height() == 41);
        CHECK(pair.second.height() == 29);
        pair.first.validate();
        pair.second.validate();
        CHECK(pair.first.span().unite(pair.second.span()) == A);
        // the displayed split measures add to mu(B) = c/(b+c)
        const IntervalSet B = f.level_set(Rational(41, 100));
        const IntervalSet b_in_first = pair.first.span().intersect(B);
        const IntervalSet b_in_second = pair.second.span().intersect(B);
        CHECK(b_in_first.measure() == Rational(17, 70));
        CHECK(b_in_second.measure() == Rational(12, 70));
        CHECK(b_in_first.measure() + b_in_second.measure() == B.measure());
        // full sums constant per tower, equal to the defects
        const auto s1 = tower_running_sums(pair.first, f);
        const auto s2 = tower_running_sums(pair.second, f);
        CHECK(s1.back() == StepFunction::indicator(pair.first.base(), Rational(1, 100)));
        CHECK(s2.back() == StepFunction::indicator(pair.second.base(), Rational(-1, 100)));
        for (const auto& s : s1) CHECK(s.sup_norm() <= f.sup_norm());

        // opposite-sign defects are rejected
        CHECK_THROWS_AS(build_two_step_towers(f, A, 1, Rational(1, 2), ConvergentPair{3, 2, 7, 5}),
                        InvalidWitness);
    }

    SUBCASE("negative defects mirror into the same construction") {
        // roles flipped: b/c = 29/41, pairs (7,5) and (24,17) give defects
        // -1/50 and -1/100
        StepFunction f({{Interval(Rational(0), Rational(41, 70)), Rational(29, 100)},
                        {Interval(Rational(41, 70), Rational(1)), Rational(-41, 100)}});
        REQUIRE(f.integral().is_zero());
        const auto pair = build_two_step_towers(f, A, 20, Rational(1, 2), ConvergentPair{7, 5, 24, 17});
        CHECK(pair.first.height() == 41);
        CHECK(pair.second.height() == 29);
        pair.first.validate();
        pair.second.validate();
        CHECK(pair.first.span().unite(pair.second.span()) == A);
        const auto s1 = tower_running_sums(pair.first, f);
        const auto s2 = tower_running_sums(pair.second, f);
        CHECK(s1.back() == StepFunction::indicator(pair.first.base(), Rational(-1, 100)));
        CHECK(s2.back() == StepFunction::indicator(pair.second.base(), Rational(1, 100)));
        for (const auto& s : s1) CHECK(s.sup_norm() <= f.sup_norm());
    }

    CHECK_THROWS_AS(build_two_step_towers(StepFunction::zero(), A, 1, Rational(1, 2)), NotTwoStep);
    StepFunction three({{Interval(Rational(0), Rational(1, 4)), Rational(2)},
                        {Interval(Rational(1, 4), Rational(1, 2)), Rational(-1)},
                        {Interval(Rational(1, 2), Rational(1)), Rational(-1, 2)}});
    CHECK_THROWS_AS(build_two_step_towers(three, A, 1, Rational(1, 2)), NotTwoStep);
}

TEST_CASE("two-value decomposition") {
    SUBCASE("two values are returned whole") {
        const auto parts = decompose_two_value(plus_minus_halves());
        CHECK(parts.size() == 1);
        CHECK(parts.front().restricted == plus_minus_halves());
    }

    SUBCASE("three values split by the lightest-mass rule") {
        StepFunction f({{Interval(Rational(0), Rational(1, 4)), Rational(2)},
                        {Interval(Rational(1, 4), Rational(3, 8)), Rational(-2)},
                        {Interval(Rational(3, 8), Rational(5, 8)), Rational(-1)}});
        REQUIRE(f.integral().is_zero());
        const auto parts = decompose_two_value(f);
        CHECK(parts.size() == 2);
        // the -2 level (mass 1/4, smaller value on the tie) pairs first
        // against the +2 level, consuming [0,1/8) of it
        CHECK(parts[0].carrier == IntervalSet(Rational(0), Rational(1, 8))
                                      .unite(IntervalSet(Rational(1, 4), Rational(3, 8))));
        for (const auto& part : parts) {
            CHECK(part.restricted.integral().is_zero());
            CHECK(part.restricted.mass_by_value(part.carrier).size() <= 2);
        }
    }

    SUBCASE("random mean-zero functions") {
        testutil::Rng rng(29);
        for (int i = 0; i < 12; ++i) {
            const auto f = rng.mean_zero_step(5);
            const std::size_t m = f.mass_by_value(f.support()).size();
            const auto parts = decompose_two_value(f);
            CHECK(parts.size() <= m - 1);
            IntervalSet covered;
            for (const auto& part : parts) {
                CHECK(part.restricted.integral().is_zero());
                CHECK(part.restricted.mass_by_value(part.carrier).size() <= 2);
                CHECK(covered.disjoint_from(part.carrier));
                covered = covered.unite(part.carrier);
            }
            CHECK(covered == f.support());
        }
    }

    CHECK_THROWS_AS(decompose_two_value(StepFunction::indicator(IntervalSet::full(), Rational(1))),
                    UnbalancedInput);
}

TEST_CASE("bounded decomposition into towers") {
    SUBCASE("two-step reduces to a single tower pair") {
        const auto towers = decompose_bounded(plus_minus_halves(), {Rational(1, 4)});
        CHECK(towers.size() == 2);
    }

    SUBCASE("zero function yields nothing") {
        CHECK(decompose_bounded(StepFunction::zero(), {Rational(1, 2)}).empty());
    }

    SUBCASE("four values, verified by exhaustive walk") {
        StepFunction f({{Interval(Rational(0), Rational(1, 4)), Rational(3)},
                        {Interval(Rational(1, 4), Rational(1, 2)), Rational(-2)},
                        {Interval(Rational(1, 2), Rational(3, 4)), Rational(1)},
                        {Interval(Rational(3, 4), Rational(1)), Rational(-2)}});
        REQUIRE(f.integral().is_zero());
        const auto towers = decompose_bounded(f, {Rational(1, 8)});
        CHECK(!towers.empty());
        IntervalSet covered;
        for (const auto& tower : towers) {
            tower.validate();
            CHECK(covered.disjoint_from(tower.span()));
            covered = covered.unite(tower.span());
            const auto sums = tower_running_sums(tower, f);
            CHECK(sums.back().sup_norm() < Rational(1, 8));
            for (const auto& s : sums) CHECK(s.sup_norm() < f.sup_norm() + Rational(1, 8));
        }
        CHECK(covered == f.support());
    }
}
