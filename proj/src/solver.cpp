#include "coboundary/solver.hpp"

#include <algorithm>
#include <string>

#include "coboundary/errors.hpp"

namespace coboundary {

VerifyOutcome verify(const StepFunction& f, const PiecewiseTranslation& T, const StepFunction& g) {
    const StepFunction h = g - pullback(g, T);
    const StepFunction defect = h - f;
    const IntervalSet witness = defect.support().unite(T.domain().complement());
    const IntervalSet exact = witness.complement();
    SolutionCertificate cert{f, T, g, exact, Rational(1) - exact.measure(), g.sup_norm()};
    return VerifyOutcome{std::move(cert), witness};
}

StepFunction induced_sum(const std::vector<Tower>& towers, const StepFunction& f) {
    StepFunction acc;
    for (const auto& tower : towers) acc = acc + tower_running_sums(tower, f).back();
    return acc;
}

std::pair<PiecewiseTranslation, StepFunction> extend_coboundary(const StepFunction& f,
                                                                const std::vector<Tower>& towers,
                                                                const PiecewiseTranslation& T_A,
                                                                const StepFunction& g_A) {
    std::vector<IntervalSet> bases;
    bases.reserve(towers.size());
    for (const auto& tower : towers) bases.push_back(tower.base());
    const IntervalSet A = unite_all(bases);
    if (T_A.domain() != A || T_A.image() != A)
        throw InvalidBaseSolution("base transformation must be a bijection of the tower bases");

    const StepFunction f_A = induced_sum(towers, f);
    const StepFunction gA = g_A.restrict(A);
    if (gA - pullback(gA, T_A) != f_A)
        throw InvalidBaseSolution("supplied transfer does not solve the induced equation exactly");

    PiecewiseTranslation T;
    StepFunction g;
    for (const auto& tower : towers) {
        const auto sums = tower_running_sums(tower, f);
        const PiecewiseTranslation to_top = tower.climb(tower.height() - 1);
        // Tower interior follows the tower map; tops re-enter through T_A.
        T = T.union_disjoint(tower.map);
        T = T.union_disjoint(compose(T_A.restrict_source(tower.base()), to_top.invert()));
        // g on level j is (g_A - sum of f over the first j levels), carried up.
        StepFunction base_part = gA.restrict(tower.base());
        g = g + base_part;
        for (std::size_t j = 1; j < tower.height(); ++j) {
            const StepFunction on_base = base_part - sums[j - 1];
            g = g + pullback(on_base, tower.climb(j).invert());
        }
    }
    return {std::move(T), std::move(g)};
}

namespace {

// Dyadic partition used to steer stage-n towers; depth is capped to keep
// cell counts tame.
std::vector<IntervalSet> dyadic_partition(int n) {
    const int depth = std::min(n, 5);
    const long cells = 1L << depth;
    std::vector<IntervalSet> q;
    q.reserve(static_cast<std::size_t>(cells));
    for (long i = 0; i < cells; ++i) q.emplace_back(Rational(i, cells), Rational(i + 1, cells));
    return q;
}

// Tower stack over A: stage towers plus the per-stage functions they sum.
struct StageChain {
    std::vector<Tower> towers;
    std::vector<StepFunction> fs;  // fs[0] = f, fs[k] = induced after stage k
};

StageChain build_chain(const StepFunction& f, const IntervalSet& A, const Rational& delta,
                       int stages) {
    StageChain chain;
    chain.fs.push_back(f.restrict(A));
    IntervalSet base = A;
    for (int n = 1; n <= stages; ++n) {
        const StepFunction& cur = chain.fs.back();
        if (n == 1 && cur.is_zero()) break;  // nothing to solve; identity closure suffices
        const Rational eps = delta / Rational::pow(Rational(2), n + 1);
        Tower tower = build_tub_tower(cur, base, eps, 1, dyadic_partition(n));
        base = tower.base();
        chain.fs.push_back(induced_sum({tower}, cur));
        chain.towers.push_back(std::move(tower));
    }
    return chain;
}

// Open glue of the stage towers: defined everywhere except the top of the
// deepest refinement (and wherever `closure` is undefined).
PiecewiseTranslation glue_open(const StageChain& chain, std::size_t upto,
                               const PiecewiseTranslation& closure) {
    PiecewiseTranslation T_base = closure;
    for (std::size_t k = upto; k-- > 0;) {
        const Tower& tower = chain.towers[k];
        const PiecewiseTranslation to_top = tower.climb(tower.height() - 1);
        PiecewiseTranslation T = tower.map;
        if (!T_base.empty()) {
            const PiecewiseTranslation top_part = to_top.restrict_source(T_base.domain());
            T = T.union_disjoint(compose(T_base, top_part.invert()));
        }
        T_base = std::move(T);
    }
    return T_base;
}

std::pair<PiecewiseTranslation, StepFunction> close_chain(const StageChain& chain,
                                                          std::size_t upto,
                                                          const IntervalSet& A) {
    IntervalSet deep_base = upto == 0 ? A : chain.towers[upto - 1].base();
    PiecewiseTranslation T = PiecewiseTranslation::identity(deep_base);
    StepFunction g;
    for (std::size_t k = upto; k-- > 0;) {
        auto [T2, g2] = extend_coboundary(chain.fs[k], {chain.towers[k]}, T, g);
        T = std::move(T2);
        g = std::move(g2);
    }
    return {std::move(T), std::move(g)};
}

BoundedSolution construct_bounded_on(const StepFunction& f, const IntervalSet& A,
                                     const Rational& delta, int stages) {
    if (stages < 1) throw Error("stage count must be positive");
    if (!(delta > Rational(0))) throw Error("delta must be positive");
    if (!f.integral_over(A).is_zero())
        throw UnbalancedInput("bounded construction needs a mean-zero function");

    const StageChain chain = build_chain(f, A, delta, stages);

    BoundedSolution out;
    for (std::size_t n = 1; n <= chain.towers.size(); ++n) {
        StageState st;
        st.stage_index = static_cast<int>(n);
        st.transformation = glue_open(chain, n, PiecewiseTranslation());
        st.residual = A.difference(st.transformation.domain());
        st.residual_measure_bound = st.residual.measure();
        st.transfer = close_chain(chain, n, A).second;
        st.towers = {chain.towers[n - 1]};
        out.stages.push_back(std::move(st));
    }

    auto [T, g] = close_chain(chain, chain.towers.size(), A);
    VerifyOutcome checked = verify(f.restrict(A), T, g);
    // Off A the certificate is silent; account for it in the residual.
    checked.certificate.exact_set = checked.certificate.exact_set.intersect(A);
    checked.certificate.residual_bound = A.measure() - checked.certificate.exact_set.measure();
    out.certificate = std::move(checked.certificate);

    if (!(out.certificate.sup_bound <= f.sup_norm() + delta))
        throw Error("internal: transfer bound exceeded ||f||_inf + delta");
    return out;
}

}  // namespace

BoundedSolution construct_bounded_solution(const StepFunction& f, const Rational& delta,
                                           int stages) {
    return construct_bounded_on(f, IntervalSet::full(), delta, stages);
}

Solvability check_solvability(const StepFunction& f) {
    Rational pos(0), neg(0);
    for (const auto& piece : f.pieces()) {
        const Rational mass = piece.value * piece.iv.measure();
        if (mass.sign() > 0)
            pos += mass;
        else
            neg -= mass;
    }
    return pos == neg ? Solvability::BalancedFinite : Solvability::Unbalanced;
}

namespace {

// Carves a subset of `candidate` with exact f-integral `target`; all values
// of f on `candidate` share one sign and `target` matches it.
IntervalSet carve_with_integral(const StepFunction& f, const IntervalSet& candidate,
                                const Rational& target) {
    IntervalSet out;
    Rational left = target;
    const StepFunction on = f.restrict(candidate);
    for (const auto& piece : on.pieces()) {
        if (left.is_zero()) break;
        const Rational mass = piece.value * piece.iv.measure();
        if (mass.abs() <= left.abs()) {
            out = out.unite(IntervalSet({piece.iv}));
            left -= mass;
        } else {
            const Rational need = left / piece.value;  // measure to take
            out = out.unite(IntervalSet(piece.iv.lo, piece.iv.lo + need));
            left = Rational(0);
        }
    }
    if (!left.is_zero()) throw Error("internal: band carve fell short");
    return out;
}

RationalBracket abs_pow_integral(const StepFunction& g, const IntervalSet& over,
                                 const Rational& expo) {
    RationalBracket acc = RationalBracket::point(Rational(0));
    for (const auto& [value, mass] : g.mass_by_value(over)) {
        if (value.is_zero()) continue;
        RationalBracket term =
            expo.is_integer()
                ? RationalBracket::point(Rational::pow(value.abs(), expo.num().get_si()))
                : pow_bracket(value.abs(), expo);
        acc = acc + term.mul_nonneg(RationalBracket::point(mass));
    }
    return acc;
}

}  // namespace

LpSolution construct_lp_solution(const StepFunction& f, const Rational& p,
                                 std::vector<Rational> delta_schedule, int stages) {
    if (p < Rational(1)) throw Error("p must be at least 1");
    if (!f.integral().is_zero())
        throw UnbalancedInput("banded construction needs a mean-zero function");

    LpSolution out;
    IntervalSet pos_rem = f.above(Rational(0));
    IntervalSet neg_rem = f.below(Rational(0));

    PiecewiseTranslation T;
    StepFunction g;
    std::size_t band_index = 0;
    while (!pos_rem.empty()) {
        if (neg_rem.empty()) throw Error("internal: sides exhausted unevenly");
        // smallest whole-number slabs still carrying mass
        Rational pos_min, neg_min;
        bool first = true;
        for (const auto& [value, mass] : f.mass_by_value(pos_rem)) {
            if (value.sign() <= 0) continue;
            pos_min = first ? value : min(pos_min, value);
            first = false;
        }
        first = true;
        for (const auto& [value, mass] : f.mass_by_value(neg_rem)) {
            if (value.sign() >= 0) continue;
            const Rational a = value.abs();
            neg_min = first ? a : min(neg_min, a);
            first = false;
        }
        const long k = static_cast<long>(pos_min.ceil().get_si());
        const long l = static_cast<long>(neg_min.ceil().get_si());

        const IntervalSet x_cand =
            pos_rem.intersect(f.above(Rational(k - 1)).difference(f.above(Rational(k))));
        const IntervalSet y_cand =
            neg_rem.intersect(f.below(Rational(1 - l)).difference(f.below(Rational(-l))));
        const Rational sp = f.integral_over(x_cand);
        const Rational sn = f.integral_over(y_cand);

        IntervalSet x_part, y_part;
        if ((sp + sn).sign() <= 0) {
            x_part = x_cand;
            y_part = carve_with_integral(f, y_cand, -sp);
        } else {
            y_part = y_cand;
            x_part = carve_with_integral(f, x_cand, -sn);
        }
        pos_rem = pos_rem.difference(x_part);
        neg_rem = neg_rem.difference(y_part);

        const IntervalSet band = x_part.unite(y_part);
        while (delta_schedule.size() <= band_index)
            delta_schedule.push_back(delta_schedule.empty() ? Rational(1, 2)
                                                            : delta_schedule.back() / Rational(2));
        const Rational eps = delta_schedule[band_index];
        const Rational m_i = Rational(std::max(k, l));
        // delta for the base solver: small against both the band bound and eps
        const Rational delta_i = min(eps / Rational(4), eps / (Rational(2) * (m_i + eps)));

        const StepFunction f_band = f.restrict(band);
        const auto towers = decompose_bounded(f_band, {eps / Rational(4)});
        const StepFunction f_A = induced_sum(towers, f_band);
        std::vector<IntervalSet> bases;
        for (const auto& t : towers) bases.push_back(t.base());
        const IntervalSet A = unite_all(bases);
        const auto base_sol = construct_bounded_on(f_A, A, delta_i, stages);
        auto [T_band, g_band] =
            extend_coboundary(f_band, towers, base_sol.certificate.transformation,
                              base_sol.certificate.transfer);

        BandReport report;
        report.k = k;
        report.l = l;
        report.x_part = x_part;
        report.y_part = y_part;
        report.epsilon = eps;
        report.bound = m_i + eps;
        report.transfer_sup = g_band.sup_norm();
        report.g_pow = p == Rational(1)
                           ? RationalBracket::point(g_band.support().intersect(band).measure())
                           : abs_pow_integral(g_band, band, p - Rational(1));
        if (!(report.transfer_sup < report.bound))
            throw Error("internal: band transfer exceeded max{k,l} + eps");
        out.bands.push_back(std::move(report));

        T = T.union_disjoint(T_band);
        g = g + g_band;
        ++band_index;
    }
    if (!neg_rem.empty()) throw Error("internal: negative mass left over");

    // the zero set rides along untouched
    const IntervalSet x0 = T.domain().complement();
    if (!x0.empty()) T = T.union_disjoint(PiecewiseTranslation::identity(x0));

    VerifyOutcome checked = verify(f, T, g);
    out.certificate = std::move(checked.certificate);

    // Comparison chain: drop leading bands until every remaining band has
    // m_i + eps_i <= 2(m_i - 1) and |f| >= ell_j >= 1 on its W side.
    auto w_floor = [&](std::size_t i) {
        const BandReport& b = out.bands[i];
        const IntervalSet& w = b.k >= b.l ? b.y_part : b.x_part;
        Rational lo;
        bool first = true;
        for (const auto& [value, mass] : f.mass_by_value(w)) {
            const Rational a = value.abs();
            lo = first ? a : min(lo, a);
            first = false;
        }
        return first ? Rational(0) : lo;
    };
    std::size_t j = 0;
    long ell = 0;
    for (; j <= out.bands.size(); ++j) {
        bool ok = true;
        Rational wmin;
        bool first = true;
        for (std::size_t i = j; i < out.bands.size() && ok; ++i) {
            const Rational m_i = Rational(std::max(out.bands[i].k, out.bands[i].l));
            ok = m_i + out.bands[i].epsilon <= Rational(2) * (m_i - Rational(1));
            const Rational wf = w_floor(i);
            wmin = first ? wf : min(wmin, wf);
            first = false;
        }
        if (ok && (first || wmin >= Rational(1))) {
            ell = first ? 1 : static_cast<long>(wmin.floor().get_si());
            break;
        }
    }
    out.j_star = j;
    out.ell_j = ell;
    out.head = RationalBracket::point(Rational(0));
    out.lhs = RationalBracket::point(Rational(0));
    for (std::size_t i = 0; i < out.bands.size(); ++i) {
        if (i < j)
            out.head = out.head + out.bands[i].g_pow;
        else
            out.lhs = out.lhs + out.bands[i].g_pow;
    }
    if (p == Rational(1)) {
        // the chain concerns higher integrability exponents; at p = 1 the
        // |g|^0 masses are all that is left and the bound is vacuous
        out.rhs = RationalBracket::point(Rational(2));
        out.chain_holds = true;
        return out;
    }
    RationalBracket fp1 = abs_pow_integral(f, IntervalSet::full(), p - Rational(1));
    RationalBracket fp = abs_pow_integral(f, IntervalSet::full(), p);
    RationalBracket c1 = p.is_integer()
                             ? RationalBracket::point(Rational::pow(Rational(2), p.num().get_si() - 1))
                             : pow_bracket(Rational(2), p - Rational(1));
    RationalBracket c2 = p.is_integer()
                             ? RationalBracket::point(Rational::pow(Rational(2), p.num().get_si()))
                             : pow_bracket(Rational(2), p);
    const Rational inv_ell = Rational(1) / Rational(ell);
    out.rhs = c1.mul_nonneg(fp1) +
              c2.mul_nonneg(RationalBracket::point(inv_ell)).mul_nonneg(fp);
    out.chain_holds = out.lhs.upper <= out.rhs.lower;
    return out;
}

Json certificate_json(const SolutionCertificate& cert) {
    return Json{{"exact_measure", cert.exact_set.measure().str()},
                {"residual_bound", cert.residual_bound.str()},
                {"sup_bound", cert.sup_bound.str()},
                {"transformation", to_json(cert.transformation)},
                {"transfer", to_json(cert.transfer)}};
}

Json refutation_json(const VerifyOutcome& outcome) {
    return Json{{"witness", to_json(outcome.witness)},
                {"witness_measure", outcome.witness.measure().str()},
                {"exact_measure", outcome.certificate.exact_set.measure().str()}};
}

}  // namespace coboundary
