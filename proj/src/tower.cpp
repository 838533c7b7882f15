#include "coboundary/tower.hpp"

#include <algorithm>
#include <string>

#include "coboundary/errors.hpp"

namespace coboundary {

PiecewiseTranslation Tower::climb(std::size_t i) const {
    if (i >= height()) throw Error("climb past tower height");
    PiecewiseTranslation acc = PiecewiseTranslation::identity(base());
    for (std::size_t j = 0; j < i; ++j) acc = compose(map, acc);
    return acc;
}

void Tower::validate() const {
    if (levels.empty()) throw Error("tower has no levels");
    const Rational m = levels.front().measure();
    if (m.is_zero()) throw Error("tower levels are null sets");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i].measure() != m) throw Error("tower levels have unequal measure");
        for (std::size_t j = i + 1; j < levels.size(); ++j)
            if (!levels[i].disjoint_from(levels[j])) throw Error("tower levels overlap");
    }
    if (levels.size() == 1) {
        if (!map.empty()) throw Error("height-1 tower map must be empty");
        return;
    }
    std::vector<IntervalSet> lower(levels.begin(), levels.end() - 1);
    if (map.domain() != unite_all(lower)) throw Error("tower map domain mismatch");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (map.restrict_source(levels[i]).image() != levels[i + 1])
            throw Error("tower map does not carry level " + std::to_string(i + 1) +
                        " onto the next level");
}

namespace {

Rational require_positive_measure(const IntervalSet& A) {
    const Rational m = A.measure();
    if (m.is_zero()) throw DegenerateInput("construction over a null set");
    return m;
}

void require_positive(const Rational& epsilon) {
    if (!(epsilon > Rational(0))) throw Error("epsilon must be positive");
}

// Distinct-value atoms of f on A, refined against Q, ordered by value then
// position. Every atom carries a constant value of f.
struct Atom {
    IntervalSet set;
    Rational value;
};

std::vector<Atom> value_atoms(const StepFunction& f, const IntervalSet& A,
                              const std::vector<IntervalSet>& Q) {
    std::vector<Atom> atoms;
    for (const auto& [value, mass] : f.mass_by_value(A)) {
        IntervalSet s = value.is_zero() ? A.difference(f.support()) : f.level_set(value).intersect(A);
        atoms.push_back({std::move(s), value});
    }
    for (const auto& q : Q) {
        std::vector<Atom> refined;
        for (const auto& a : atoms) {
            IntervalSet in = a.set.intersect(q);
            IntervalSet out = a.set.difference(q);
            if (!in.empty()) refined.push_back({std::move(in), a.value});
            if (!out.empty()) refined.push_back({std::move(out), a.value});
        }
        atoms = std::move(refined);
    }
    return atoms;
}

}  // namespace

PubPartition build_pub_partition(const StepFunction& f, const IntervalSet& A,
                                 const Rational& epsilon, std::size_t min_cells,
                                 const std::vector<IntervalSet>& Q) {
    const Rational total = require_positive_measure(A);
    require_positive(epsilon);
    if (min_cells == 0) min_cells = 1;

    const auto atoms = value_atoms(f, A, Q);

    // Exact tiling: cell measure total/n with n a multiple of every atom's
    // relative-measure denominator, so each atom splits into whole cells.
    mpz_class n_base(1);
    for (const auto& a : atoms) {
        const Rational rel = a.set.measure() / total;
        mpz_lcm(n_base.get_mpz_t(), n_base.get_mpz_t(), rel.den().get_mpz_t());
    }
    mpz_class t = (mpz_class(static_cast<unsigned long>(min_cells)) + n_base - 1) / n_base;
    if (t < 1) t = 1;
    const mpz_class n = t * n_base;
    if (!n.fits_ulong_p() || n.get_ui() > branch_limit())
        throw BranchLimitExceeded("balanced partition would need " + n.get_str() +
                                  " cells, over the branch budget");

    PubPartition out;
    out.epsilon = epsilon;
    for (const auto& a : atoms) {
        const Rational count = a.set.measure() * Rational(n, mpz_class(1)) / total;
        if (!count.is_integer()) throw Error("internal: cell count not integral");
        for (auto& cell : a.set.split_equal(count.num().get_ui()))
            out.cells.push_back(std::move(cell));
    }
    return out;
}

namespace {

// The stacking rule: a nonpositive prefix takes the lowest-index cell with
// nonnegative integral, a positive prefix the lowest-index negative one.
// With a zero total (or a defect smaller than every cell magnitude) the
// preferred class is never exhausted early.
std::vector<std::size_t> greedy_order(const std::vector<std::pair<IntervalSet, Rational>>& cells) {
    std::vector<std::size_t> order;
    order.reserve(cells.size());
    std::vector<bool> used(cells.size(), false);
    Rational prefix(0);
    for (std::size_t step = 0; step < cells.size(); ++step) {
        const bool want_nonneg = !(prefix > Rational(0));
        std::size_t pick = cells.size();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (used[i]) continue;
            const int s = cells[i].second.sign();
            if (want_nonneg ? s >= 0 : s < 0) {
                pick = i;
                break;
            }
        }
        if (pick == cells.size()) throw Error("internal: greedy stacking ran out of eligible cells");
        used[pick] = true;
        order.push_back(pick);
        prefix += cells[pick].second;
    }
    return order;
}

}  // namespace

std::vector<std::size_t> greedy_stack(const std::vector<std::pair<IntervalSet, Rational>>& cells) {
    Rational sum(0);
    for (const auto& [set, integral] : cells) sum += integral;
    if (!sum.is_zero())
        throw UnbalancedInput("greedy stacking needs cell integrals summing to zero, got " +
                              sum.str());
    return greedy_order(cells);
}

namespace {

Tower stack_cells(const std::vector<std::pair<IntervalSet, Rational>>& cells) {
    const auto order = greedy_order(cells);
    std::vector<IntervalSet> levels;
    levels.reserve(order.size());
    for (const auto idx : order) levels.push_back(cells[idx].first);
    PiecewiseTranslation map;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        map = map.union_disjoint(transport(levels[i], levels[i + 1]));
    return Tower{std::move(levels), std::move(map)};
}

}  // namespace

Tower build_tub_tower(const StepFunction& f, const IntervalSet& A, const Rational& epsilon,
                      std::size_t min_height, const std::vector<IntervalSet>& Q) {
    require_positive_measure(A);
    require_positive(epsilon);
    if (!f.integral_over(A).is_zero())
        throw UnbalancedInput("tower construction needs a mean-zero function on its base set");

    const auto pub = build_pub_partition(f, A, epsilon, min_height + 1, Q);
    std::vector<std::pair<IntervalSet, Rational>> cells;
    cells.reserve(pub.cells.size());
    for (const auto& cell : pub.cells) {
        const Rational value = f.evaluate(cell.parts().front().lo);
        cells.emplace_back(cell, value * cell.measure());
    }
    return stack_cells(cells);
}

std::vector<StepFunction> tower_running_sums(const Tower& tower, const StepFunction& f) {
    std::vector<StepFunction> sums;
    sums.reserve(tower.height());
    StepFunction acc = f.restrict(tower.base());
    sums.push_back(acc);
    PiecewiseTranslation climb = PiecewiseTranslation::identity(tower.base());
    for (std::size_t i = 1; i < tower.height(); ++i) {
        climb = compose(tower.map, climb);
        acc = acc + pullback(f.restrict(tower.levels[i]), climb);
        sums.push_back(acc);
    }
    return sums;
}

namespace {

// Measure-preserving self-map of `on` rearranging u monotonically along the
// spatial order of `on`.
PiecewiseTranslation sorting_map(const StepFunction& u, const IntervalSet& on, bool ascending) {
    std::vector<std::pair<Rational, IntervalSet>> regions;
    for (const auto& [value, mass] : u.mass_by_value(on)) {
        IntervalSet s = value.is_zero() ? on.difference(u.support()) : u.level_set(value).intersect(on);
        regions.emplace_back(value, std::move(s));
    }
    std::sort(regions.begin(), regions.end(), [ascending](const auto& a, const auto& b) {
        return ascending ? a.first < b.first : b.first < a.first;
    });
    PiecewiseTranslation psi;
    IntervalSet rest = on;
    for (const auto& [value, region] : regions) {
        const IntervalSet slot = rest.take_prefix(region.measure());
        rest = rest.difference(slot);
        psi = psi.union_disjoint(transport(slot, region));
    }
    return psi;
}

StepFunction quantize(const StepFunction& f, const mpz_class& k) {
    const Rational kr(k, mpz_class(1));
    return f.map_values([&](const Rational& v) { return Rational((v * kr).floor(), k); });
}

}  // namespace

Tower refine_levels(const Tower& tower, const StepFunction& f, const Rational& epsilon) {
    require_positive(epsilon);
    const std::size_t h = tower.height();
    if (h == 1) return tower;

    const mpz_class k = (Rational(3 * static_cast<long>(h)) / epsilon).floor() + 1;

    // Quantized copies per level and their sorting maps; the accumulated
    // sum is re-sorted non-increasing before each level is added with a
    // non-decreasing arrangement, so the two orders oppose each other.
    std::vector<StepFunction> quantized;
    quantized.reserve(h);
    for (std::size_t i = 0; i < h; ++i) quantized.push_back(quantize(f.restrict(tower.levels[i]), k));

    std::vector<PiecewiseTranslation> psi(h);
    psi[0] = PiecewiseTranslation::identity(tower.base());
    for (std::size_t i = 1; i < h; ++i) psi[i] = sorting_map(quantized[i], tower.levels[i], true);

    std::vector<PiecewiseTranslation> phi;  // phi[j] re-sorts the sum through level j
    phi.reserve(h - 1);
    PiecewiseTranslation phi0 = sorting_map(quantized[0], tower.base(), false);
    StepFunction acc = pullback(quantized[0], phi0);
    phi.push_back(std::move(phi0));
    for (std::size_t j = 1; j < h; ++j) {
        const StepFunction term = pullback(quantized[j], compose(psi[j], tower.climb(j)));
        acc = acc + term;
        if (j + 1 < h) {
            PiecewiseTranslation p = sorting_map(acc, tower.base(), false);
            acc = pullback(acc, p);
            phi.push_back(std::move(p));
        }
    }

    // tau_l = psi_l . climb(l) . phi_l ... phi_{h-2}, rightmost applied
    // first; suffix products are built from the top of the stack down.
    std::vector<PiecewiseTranslation> tau(h);
    tau[h - 1] = compose(psi[h - 1], tower.climb(h - 1));
    PiecewiseTranslation suffix = PiecewiseTranslation::identity(tower.base());
    for (std::size_t l = h - 1; l-- > 0;) {
        suffix = compose(phi[l], suffix);
        tau[l] = compose(psi[l], compose(tower.climb(l), suffix));
    }

    PiecewiseTranslation new_map;
    for (std::size_t l = 0; l + 1 < h; ++l)
        new_map = new_map.union_disjoint(compose(tau[l + 1], tau[l].invert()));
    return Tower{tower.levels, std::move(new_map)};
}

TowerPair build_two_step_towers(const StepFunction& f, const IntervalSet& A,
                                std::size_t min_height, const Rational& epsilon,
                                const std::optional<ConvergentPair>& convergents) {
    const Rational total = require_positive_measure(A);
    require_positive(epsilon);
    if (!f.integral_over(A).is_zero())
        throw UnbalancedInput("two-step tower construction needs a mean-zero function");

    const auto masses = f.mass_by_value(A);
    if (masses.size() != 2 || !(masses.front().first < Rational(0)) ||
        !(masses.back().first > Rational(0)))
        throw NotTwoStep("function must take exactly one positive and one negative value on A");
    Rational b = masses.back().first;    // positive value
    Rational c = -masses.front().first;  // magnitude of the negative value
    IntervalSet B = f.level_set(b).intersect(A);
    IntervalSet C = f.level_set(-c).intersect(A);

    auto build = [&f](const IntervalSet& bsrc, long nb, const IntervalSet& csrc, long nc) {
        std::vector<std::pair<IntervalSet, Rational>> cells;
        auto push = [&](const IntervalSet& src, long n) {
            for (auto& s : src.split_equal(static_cast<std::size_t>(n))) {
                const Rational integral = f.integral_over(s);
                cells.emplace_back(std::move(s), integral);
            }
        };
        push(bsrc, nb);
        push(csrc, nc);
        return stack_cells(cells);
    };

    if (!convergents) {
        // Commensurable route: the minimal balanced pattern repeats exactly,
        // split across two towers of equal height.
        const Rational ratio = b / c;
        const mpz_class b0 = ratio.num(), c0 = ratio.den();
        if (!b0.fits_slong_p() || !c0.fits_slong_p() ||
            b0.get_si() + c0.get_si() > static_cast<long>(branch_limit()))
            throw BranchLimitExceeded("value ratio too wild for a desk-scale pattern");
        const long pattern = b0.get_si() + c0.get_si();
        const long t = static_cast<long>(min_height) / pattern + 1;
        const long nb = t * c0.get_si();
        const long nc = t * b0.get_si();

        const IntervalSet B1 = B.take_prefix(B.measure() / Rational(2));
        const IntervalSet C1 = C.take_prefix(C.measure() / Rational(2));
        Tower t1 = build(B1, nb, C1, nc);
        Tower t2 = build(B.difference(B1), nb, C.difference(C1), nc);
        return TowerPair{std::move(t1), std::move(t2), epsilon};
    }

    // User-supplied integer pairs are validated, never discovered.
    long p1 = convergents->p1, q1 = convergents->q1;
    long p2 = convergents->p2, q2 = convergents->q2;
    if (p1 <= 0 || q1 <= 0 || p2 <= p1 || q2 <= q1)
        throw InvalidWitness("convergent pairs must be positive with p2 > p1, q2 > q1");
    Rational d1 = Rational(p1) * b - Rational(q1) * c;
    Rational d2 = Rational(p2) * b - Rational(q2) * c;
    if (d1.is_zero() || d2.is_zero() || d1.sign() != d2.sign())
        throw InvalidWitness("convergent defects must be nonzero and of the same sign");
    if (d1.sign() < 0) {
        // Mirror case: swap the roles of the two value classes.
        std::swap(b, c);
        std::swap(B, C);
        std::swap(p1, q1);
        std::swap(p2, q2);
        d1 = -d1;
        d2 = -d2;
    }
    if (!(d2.abs() < d1.abs() && d1.abs() < epsilon))
        throw InvalidWitness("need |delta_2| < |delta_1| < epsilon, got " + d1.str() + ", " +
                             d2.str());
    if (!(Rational(p1) < epsilon * Rational(p2) && Rational(q1) < epsilon * Rational(q2)))
        throw InvalidWitness("need p1 < eps*p2 and q1 < eps*q2");
    if (!(p2 + q2 - p1 - q1 > static_cast<long>(min_height)))
        throw InvalidWitness("pattern too short for the requested minimum height");
    if (!(d1 < min(b, c) / Rational(2)))
        throw InvalidWitness("delta_1 must stay below min{b,c}/2");

    const long p3 = p2 - p1, q3 = q2 - q1;
    const Rational d3 = d1 - d2;
    const Rational D = Rational(p2 + q2) * d3 + Rational(p3 + q3) * d2;
    const Rational muB1 = Rational(p2) * d3 / D * total;
    const Rational muB2 = Rational(p3) * d2 / D * total;
    const Rational muC1 = Rational(q2) * d3 / D * total;
    if (muB1 + muB2 != B.measure())
        throw InvalidWitness("split measures do not add up to mu(B); input is not balanced");

    const IntervalSet B1 = B.take_prefix(muB1);
    const IntervalSet C1 = C.take_prefix(muC1);
    Tower t1 = build(B1, p2, C1, q2);
    Tower t2 = build(B.difference(B1), p3, C.difference(C1), q3);

    const Rational ratio = Rational(p2 + q2) / Rational(p3 + q3);
    if (!(Rational(1) - epsilon < ratio && ratio < Rational(1) + epsilon))
        throw InvalidWitness("tower heights ratio " + ratio.str() + " escapes (1-eps, 1+eps)");
    return TowerPair{std::move(t1), std::move(t2), epsilon};
}

Decomposition decompose_two_value(const StepFunction& f) {
    if (!f.integral().is_zero())
        throw UnbalancedInput("two-value decomposition needs a mean-zero function");
    if (f.is_zero()) return {};

    struct Level {
        Rational value;
        IntervalSet set;
        Rational mass() const { return value.abs() * set.measure(); }
    };
    std::vector<Level> levels;
    for (const auto& [value, mass] : f.mass_by_value(f.support()))
        levels.push_back({value, f.level_set(value)});

    Decomposition parts;
    while (levels.size() > 2) {
        // lightest level by L1 mass, ties to the smaller value
        std::size_t j = 0;
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (levels[i].mass() < levels[j].mass()) j = i;
        // opposite-sign partner with the largest mass
        std::size_t k = levels.size();
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i].value.sign() == levels[j].value.sign()) continue;
            if (k == levels.size() || levels[i].mass() > levels[k].mass()) k = i;
        }
        if (k == levels.size())
            throw Error("internal: no opposite-sign level in a balanced function");

        const Rational carve = levels[j].mass() / levels[k].value.abs();
        const IntervalSet taken = levels[k].set.take_prefix(carve);
        const IntervalSet carrier = levels[j].set.unite(taken);
        parts.push_back({carrier, f.restrict(carrier)});

        levels[k].set = levels[k].set.difference(taken);
        levels.erase(levels.begin() + static_cast<long>(j));
        std::erase_if(levels, [](const Level& l) { return l.set.empty(); });
    }
    if (levels.size() == 1) throw Error("internal: single-value remainder in a balanced function");
    if (levels.size() == 2) {
        const IntervalSet carrier = levels[0].set.unite(levels[1].set);
        parts.push_back({carrier, f.restrict(carrier)});
    }
    return parts;
}

Json tower_json(const Tower& tower) {
    Json levels = Json::array();
    for (const auto& level : tower.levels) levels.push_back(to_json(level));
    return Json{{"height", tower.height()},
                {"levels", std::move(levels)},
                {"map", to_json(tower.map)}};
}

Tower tower_from_json(const Json& j) {
    Tower tower;
    if (!j.contains("levels") || !j.at("levels").is_array())
        throw ParseError("tower JSON needs a \"levels\" array");
    for (const auto& level : j.at("levels")) tower.levels.push_back(interval_set_from_json(level));
    tower.map = translation_from_json(j.at("map"));
    if (j.contains("height") && j.at("height").get<std::size_t>() != tower.height())
        throw ParseError("tower height disagrees with its level count");
    tower.validate();
    return tower;
}

std::vector<Tower> decompose_bounded(const StepFunction& f, std::vector<Rational> epsilons) {
    if (!f.integral().is_zero())
        throw UnbalancedInput("bounded decomposition needs a mean-zero function");
    if (f.is_zero()) return {};

    const auto parts = decompose_two_value(f);
    while (epsilons.size() < parts.size())
        epsilons.push_back(epsilons.empty() ? Rational(1, 2) : epsilons.back() / Rational(2));

    std::vector<Tower> towers;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        TowerPair pair = build_two_step_towers(parts[i].restricted, parts[i].carrier, 1, epsilons[i]);
        towers.push_back(std::move(pair.first));
        towers.push_back(std::move(pair.second));
    }
    return towers;
}

}  // namespace coboundary
