#include "coboundary/analysis.hpp"

#include <algorithm>

#include "coboundary/errors.hpp"

namespace coboundary {

GrowthSequence GrowthSequence::factorial_pow2() { return GrowthSequence(); }

GrowthSequence GrowthSequence::from_table(std::vector<Rational> values) {
    if (values.empty()) throw Error("growth table must not be empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > Rational(0))) throw Error("growth table entries must be positive");
        if (i > 0 && !(values[i - 1] < values[i]))
            throw Error("growth table must be strictly increasing");
    }
    GrowthSequence g;
    g.table_ = std::move(values);
    return g;
}

mpz_class GrowthSequence::log2_exponent(int i) const {
    if (i < 1) throw Error("growth sequence index must be positive");
    mpz_class e;
    mpz_fac_ui(e.get_mpz_t(), static_cast<unsigned long>(i));
    return e;
}

Rational GrowthSequence::value(int i) const {
    if (i < 1) throw Error("growth sequence index must be positive");
    if (!table_.empty()) {
        if (static_cast<std::size_t>(i) > table_.size())
            throw TableTooShort("growth table has no index " + std::to_string(i));
        return table_[static_cast<std::size_t>(i) - 1];
    }
    const mpz_class e = log2_exponent(i);
    if (e > mpz_class(1) << 30)
        throw InvalidExponents("2^{" + std::to_string(i) + "!} is too large to materialize");
    return Rational::pow2(e);
}

Rational GrowthSequence::power(int i, const Rational& e) const {
    if (table_.empty()) {
        // 2^{i! e} is rational exactly when i! e is an integer
        const Rational expo = Rational(log2_exponent(i), mpz_class(1)) * e;
        if (!expo.is_integer())
            throw ExponentNotRepresentable("2^{" + std::to_string(i) + "! * " + e.str() +
                                           "} is irrational");
        if (expo.sign() >= 0) return Rational::pow2(expo.num());
        return Rational(1) / Rational::pow2(-expo.num());
    }
    return pow_exact(value(i), e);
}

RationalBracket GrowthSequence::power_bracket(int i, const Rational& e) const {
    try {
        return RationalBracket::point(power(i, e));
    } catch (const ExponentNotRepresentable&) {
        return pow_bracket(value(i), e);
    }
}

std::optional<int> GrowthSequence::growth_index(const Rational& alpha, int prefix_len) const {
    if (!(alpha > Rational(0))) throw Error("alpha must be positive");
    auto ok = [&](int i) {
        // a_i < a_{i+1}^alpha / 2
        if (table_.empty()) {
            const Rational lhs(log2_exponent(i), mpz_class(1));
            const Rational rhs = alpha * Rational(log2_exponent(i + 1), mpz_class(1)) - Rational(1);
            return lhs < rhs;
        }
        const long u = alpha.num().get_si();
        const long v = alpha.den().get_si();
        return Rational::pow(Rational(2) * value(i), v) < Rational::pow(value(i + 1), u);
    };
    std::optional<int> start;
    for (int i = 1; i + 1 <= prefix_len; ++i) {
        if (ok(i)) {
            if (!start) start = i;
        } else {
            start.reset();
        }
    }
    return start;
}

namespace {

void require_bijection(const PiecewiseTranslation& T) {
    if (!T.is_full_bijection())
        throw DomainMismatch("orbit sums need a measure-preserving bijection of [0,1)");
}

}  // namespace

Rational measure_within(const StepFunction& s, const Rational& M) {
    Rational acc(0);
    for (const auto& piece : s.pieces())
        if (piece.value.abs() <= M) acc += piece.iv.measure();
    if (M.sign() >= 0) acc += Rational(1) - s.support().measure();
    return acc;
}



BirkhoffReport birkhoff(const StepFunction& f, const PiecewiseTranslation& T, int n,
                        const std::vector<Rational>& thresholds) {
    require_bijection(T);
    if (n < 1) throw Error("iterate count must be positive");
    StepFunction sum = f;
    PiecewiseTranslation power = T;
    for (int i = 1; i < n; ++i) {
        sum = sum + pullback(f, power);
        power = compose(T, power);
    }
    BirkhoffReport report;
    report.n = n;
    report.sum = sum;
    for (const auto& M : thresholds) report.level_stats.emplace_back(M, measure_within(sum, M));
    return report;
}

Rational schmidt_statistic(const StepFunction& f, const PiecewiseTranslation& T, const Rational& M,
                           int n_max) {
    require_bijection(T);
    if (n_max < 1) throw Error("n_max must be positive");
    StepFunction sum = f;
    PiecewiseTranslation power = T;
    Rational best = measure_within(sum, M);
    for (int n = 2; n <= n_max; ++n) {
        sum = sum + pullback(f, power);
        power = compose(T, power);
        best = min(best, measure_within(sum, M));
    }
    return best;
}

DnResult dn_membership(const StepFunction& f, const PiecewiseTranslation& T, int n,
                       const Rational& eta, int k_max) {
    require_bijection(T);
    if (!(Rational(0) < eta && eta < Rational(1, 10)))
        throw Error("eta must lie in (0, 1/10)");
    if (n < 1) throw Error("n must be positive");
    StepFunction sum = f;
    PiecewiseTranslation power = T;
    for (int k = 2; k <= k_max; ++k) {
        sum = sum + pullback(f, power);
        power = compose(T, power);
        if (k <= n) continue;
        const Rational exceed = Rational(1) - measure_within(sum, Rational(n));
        if (exceed > eta) return {true, k};
    }
    return {false, 0};
}

GpVerdict gp_membership(const StepFunction& f, const Rational& p, int n, const GrowthSequence& a,
                        int i_max) {
    GpVerdict verdict;
    for (int i = n + 1; i <= i_max; ++i) {
        GpRow row;
        row.i = i;
        row.v_measure = f.above(a.value(i)).measure();
        row.u_measure = f.below(-a.value(i - 1)).measure();
        const Rational ii(static_cast<long>(i) * i);
        const RationalBracket ap_i = a.power_bracket(i, p);
        const RationalBracket ap_next = a.power_bracket(i + 1, p);
        row.v_threshold = {Rational(1) / (ap_i.upper * ii), Rational(1) / (ap_i.lower * ii),
                           ap_i.exact};
        row.u_threshold = {Rational(1) / (ap_next.upper * ii), Rational(1) / (ap_next.lower * ii),
                           ap_next.exact};
        // certified membership: compare against the unfavorable bracket end
        row.pass = row.v_measure > row.v_threshold.upper && row.u_measure < row.u_threshold.lower;
        verdict.rows.push_back(row);
        if (row.pass && !verdict.member) {
            verdict.member = true;
            verdict.witness = i;
            verdict.witness_at_boundary = (i == n + 1);
        }
    }
    return verdict;
}

GpDensifyResult gp_densify(const StepFunction& f, const Rational& p, int n, const Rational& epsilon,
                           const GrowthSequence& a) {
    if (!(epsilon > Rational(0))) throw Error("epsilon must be positive");
    if (!(p >= Rational(1))) throw Error("p must be at least 1");
    if (!f.integral().is_zero())
        throw UnbalancedInput("densification starts from a mean-zero function");

    const Rational f_sup = f.sup_norm();
    int i0 = n + 1;
    while (!(a.value(i0) > f_sup)) ++i0;

    // every index up to i1+1 must be materializable (the membership
    // thresholds reach one step past the witness)
    auto feasible = [&a](int i) {
        try {
            a.value(i + 1);
            return true;
        } catch (const Error&) {
            return false;
        }
    };

    // preferred start: smallest i1 with 2^{p+2}/i1^2 < eps/3, at least
    // i0+1 so the dip depth a_{i1-1} clears ||f||_inf; when the sequence
    // cannot host that index, start low and let the exact distance check
    // find the first admissible spot
    const RationalBracket two_pow = pow_bracket(Rational(2), p + Rational(2));
    const int floor_i = std::max(i0 + 1, n + 2);
    int formula_i = floor_i;
    while (!(two_pow.upper / Rational(static_cast<long>(formula_i) * formula_i) <
             epsilon / Rational(3)))
        ++formula_i;
    int i1 = feasible(formula_i) ? formula_i : floor_i;

    for (int attempt = 0; attempt < 100; ++attempt, ++i1) {
        if (!feasible(i1))
            throw InfeasibleEpsilon("growth family exhausted before the modification fit");
        Rational spike_measure, dip_measure;
        try {
            const Rational ap = a.power(i1, p);
            const Rational ap1 = a.power(i1, p - Rational(1));
            const Rational ii(static_cast<long>(i1) * i1);
            spike_measure = Rational(2) / (ap * ii);
            dip_measure = Rational(4) / (a.value(i1 - 1) * ap1 * ii);
        } catch (const ExponentNotRepresentable&) {
            continue;  // measures must be exact; a larger index clears the denominator
        }
        const Rational pocket = spike_measure + dip_measure;

        // carve a mean-zero pocket Y: zero region if present, otherwise a
        // two-level split solving one linear equation in the lengths
        IntervalSet Y;
        const IntervalSet zero_region = f.support().complement();
        if (zero_region.measure() >= pocket) {
            Y = zero_region.take_prefix(pocket);
        } else {
            if (f.pieces().empty()) throw InfeasibleEpsilon("no room to carve a balanced pocket");
            Rational vpos, vneg;
            for (const auto& piece : f.pieces()) {
                vpos = max(vpos, piece.value);
                vneg = min(vneg, piece.value);
            }
            if (!(vpos > Rational(0)) || !(vneg < Rational(0)))
                throw InfeasibleEpsilon("cannot balance a pocket in a one-sided function");
            const Rational t_pos = pocket * (-vneg) / (vpos - vneg);
            const Rational t_neg = pocket - t_pos;
            const IntervalSet pos_set = f.level_set(vpos);
            const IntervalSet neg_set = f.level_set(vneg);
            if (pos_set.measure() < t_pos || neg_set.measure() < t_neg)
                throw InfeasibleEpsilon("extremal level sets cannot host the pocket");
            Y = pos_set.take_prefix(t_pos).unite(neg_set.take_prefix(t_neg));
        }
        if (!f.integral_over(Y).is_zero()) throw Error("internal: pocket is not mean-zero");

        GpDensifyResult out;
        out.spike = Y.take_prefix(spike_measure);
        out.dip = Y.difference(out.spike);
        out.i0 = i0;
        out.i1 = i1;
        out.spike_measure = spike_measure;
        out.dip_measure = dip_measure;
        out.f1 = f.restrict(Y.complement()) +
                 StepFunction::indicator(out.spike, Rational(2) * a.value(i1)) +
                 StepFunction::indicator(out.dip, -a.value(i1 - 1));

        const StepFunction d = f - out.f1;
        out.distance_pow = lq_norm(d, p);
        const RationalBracket eps_pow = pow_bracket(epsilon, p);
        if (out.distance_pow.upper < eps_pow.lower) {
            out.audit.emplace_back("first_term", (epsilon / Rational(3)).str());
            out.audit.emplace_back("spike_term",
                                   (pow_bracket(Rational(2), p).upper * a.power_bracket(i1, p).upper *
                                    spike_measure)
                                       .str());
            out.audit.emplace_back("dip_term",
                                   (a.power_bracket(i1 - 1, p).upper * dip_measure).str());
            out.audit.emplace_back("distance_pow_upper", out.distance_pow.upper.str());
            return out;
        }
    }
    throw InfeasibleEpsilon("could not move the function inside the class within epsilon");
}

Rational gp_openness_radius(const StepFunction& f, const Rational& p, const GpWitness& w,
                            const GrowthSequence& a) {
    if (w.i < 1) throw InvalidWitness("witness index must be positive");
    const Rational ai = a.value(w.i);
    const Rational ai_prev = a.value(w.i - 1);
    if (!(w.a_prime > ai)) throw InvalidWitness("a' must exceed a_i");
    if (!(w.a_double > ai_prev)) throw InvalidWitness("a'' must exceed a_{i-1}");

    const Rational ii(static_cast<long>(w.i) * w.i);
    const RationalBracket v_thr = a.power_bracket(w.i, p);
    const RationalBracket u_thr = a.power_bracket(w.i + 1, p);
    const Rational v_threshold_hi = Rational(1) / (v_thr.lower * ii);
    const Rational u_threshold_lo = Rational(1) / (u_thr.upper * ii);

    if (!(f.above(w.a_prime).measure() > w.mu_prime))
        throw InvalidWitness("mu{f > a'} does not exceed mu'");
    if (!(w.mu_prime > v_threshold_hi)) throw InvalidWitness("mu' does not clear 1/(a_i^p i^2)");
    if (!(f.below(-w.a_double).measure() < w.nu_prime))
        throw InvalidWitness("mu{f < -a''} is not below nu'");
    if (!(w.nu_prime < u_threshold_lo)) throw InvalidWitness("nu' does not fit under 1/(a_{i+1}^p i^2)");

    // round every factor toward zero so the radius is certified
    const RationalBracket gap1 = pow_bracket(w.a_prime - ai, p);
    const RationalBracket gap2 = pow_bracket(w.a_double - ai_prev, p);
    const Rational first = (w.mu_prime - v_threshold_hi) * gap1.lower;
    const Rational second = (u_threshold_lo - w.nu_prime) * gap2.lower;
    return min(first, second);
}

Rational core_lower_bound(const Rational& p, const Rational& q, int n, const GrowthSequence& a,
                          int which_case) {
    if (!(q > p - Rational(1))) throw InvalidExponents("need q > p - 1");
    if (n < 2) throw Error("index must be at least 2");
    const Rational nn(static_cast<long>(n) * n);
    const Rational four_q = pow_exact(Rational(4), q);
    if (which_case == 1) {
        const Rational top = a.power(n, q + Rational(1) - p);
        return top / (Rational(32) * four_q * a.value(n - 1) * nn);
    }
    if (which_case == 2) {
        long k = std::max<long>(2, (p / q).floor().get_si() + 1);
        while (!(Rational(k) * q > p)) ++k;
        const Rational top = a.power(n, Rational(k) * q - p);
        const Rational bottom = a.power(n - 1, q * Rational(k - 1));
        return top / (nn * four_q * bottom);
    }
    throw Error("case selector must be 1 or 2");
}

bool CounterexampleSpec::all_pass() const {
    for (const auto& entry : audit)
        if (!entry.pass) return false;
    return true;
}

CounterexampleSpec generic_gp_generate(const StepFunction& f, const Rational& p, int n,
                                       const Rational& epsilon, const GrowthSequence& a) {
    const GpDensifyResult res = gp_densify(f, p, n, epsilon, a);

    CounterexampleSpec spec;
    spec.family = "generic-gp";
    spec.function = res.f1;

    const RationalBracket eps_pow = pow_bracket(epsilon, p);
    spec.audit.push_back({"distance", "||f - f1||_p^p = " + res.distance_pow.upper.str() +
                                          " < eps^p",
                          res.distance_pow.upper < eps_pow.lower});

    const auto verdict = gp_membership(res.f1, p, n, a, res.i1 + 1);
    spec.audit.push_back({"membership", "witness i = " + std::to_string(verdict.witness),
                          verdict.member && verdict.witness == res.i1});

    // canonical witness for the openness radius, straight off the spike/dip
    Rational radius(0);
    bool radius_ok = false;
    try {
        const Rational ii(static_cast<long>(res.i1) * res.i1);
        GpWitness w;
        w.i = res.i1;
        w.a_prime = a.value(res.i1) * Rational(3, 2);
        w.a_double = a.value(res.i1 - 1) * Rational(2);
        w.mu_prime = Rational(3, 2) / (a.power(res.i1, p) * ii);
        w.nu_prime = a.power_bracket(res.i1 + 1, p).exact
                         ? Rational(1, 2) / (a.power(res.i1 + 1, p) * ii)
                         : Rational(1, 2) / (a.power_bracket(res.i1 + 1, p).upper * ii);
        radius = gp_openness_radius(res.f1, p, w, a);
        radius_ok = radius > Rational(0);
    } catch (const Error&) {
        radius_ok = false;
    }
    spec.audit.push_back({"openness_radius", radius.str(), radius_ok});

    Json densify_audit = Json::array();
    for (const auto& [key, value] : res.audit) densify_audit.push_back({{key, value}});
    spec.parameters = Json{{"p", p.str()},
                           {"n", n},
                           {"epsilon", epsilon.str()},
                           {"i0", res.i0},
                           {"i1", res.i1},
                           {"spike_measure", res.spike_measure.str()},
                           {"dip_measure", res.dip_measure.str()},
                           {"radius", radius.str()},
                           {"densify", std::move(densify_audit)}};
    return spec;
}

CounterexampleSpec not_a_moment_generate(const std::vector<std::pair<Rational, Rational>>& phi_table,
                                         int depth) {
    if (phi_table.empty()) throw TableTooShort("phi table is empty");
    for (std::size_t i = 0; i + 1 < phi_table.size(); ++i) {
        if (!(phi_table[i].first < phi_table[i + 1].first))
            throw Error("phi table must be sorted by strictly increasing argument");
        if (phi_table[i].second > phi_table[i + 1].second)
            throw Error("phi table must be nondecreasing");
    }
    if (depth < 0) throw Error("depth must be nonnegative");

    // certified lower bound of phi at y: value at the largest tabulated
    // argument not exceeding y
    auto phi_floor = [&phi_table](const Rational& y) -> std::optional<Rational> {
        std::optional<Rational> best;
        for (const auto& [arg, val] : phi_table) {
            if (arg <= y)
                best = val;
            else
                break;
        }
        return best;
    };

    CounterexampleSpec spec;
    spec.family = "not-a-moment";

    // b_i: minimal 2^{j!} with a fresh j and phi(b_i/4) >= i 2^i
    std::vector<mpz_class> exponents;
    std::vector<Rational> bs;
    int j = 1;
    for (int i = 1; i <= depth; ++i) {
        const Rational target = Rational(i) * Rational::pow(Rational(2), i);
        for (;; ++j) {
            mpz_class e;
            mpz_fac_ui(e.get_mpz_t(), static_cast<unsigned long>(j));
            if (e > mpz_class(1) << 24)
                throw TableTooShort("growth family exhausted before condition met");
            const Rational b = Rational::pow2(e);
            const auto phi = phi_floor(b / Rational(4));
            if (phi && *phi >= target) {
                exponents.push_back(e);
                bs.push_back(b);
                ++j;
                break;
            }
        }
    }

    const IntervalSet A(Rational(0), Rational(1, 2));
    std::vector<StepFunction::Piece> pieces;
    for (const auto& iv : A.parts()) pieces.push_back({iv, Rational(1)});
    Rational lo(1, 2);
    std::vector<Rational> b_masses;
    for (int i = 1; i <= depth; ++i) {
        const Rational& b = bs[static_cast<std::size_t>(i - 1)];
        const Rational mass = Rational(1) / (b * Rational::pow(Rational(2), i + 1));
        pieces.push_back({Interval(lo, lo + mass), -b});
        lo += mass;
        b_masses.push_back(mass);
    }
    spec.function = StepFunction(std::move(pieces));

    // audits
    for (int i = 1; i + 1 <= depth; ++i) {
        // growth: b_i / b_{i+1}^alpha shrinking, checked in exponents for
        // alpha in {2, 1, 1/2}
        for (const Rational& alpha : {Rational(2), Rational(1), Rational(1, 2)}) {
            const Rational lhs(exponents[static_cast<std::size_t>(i - 1)], mpz_class(1));
            const Rational rhs = alpha * Rational(exponents[static_cast<std::size_t>(i)], mpz_class(1));
            spec.audit.push_back({"growth(alpha=" + alpha.str() + ") i=" + std::to_string(i),
                                  lhs.str() + " < " + rhs.str(), lhs < rhs});
        }
    }
    for (int i = 1; i <= depth; ++i) {
        const Rational& b = bs[static_cast<std::size_t>(i - 1)];
        const auto phi = phi_floor(b / Rational(4));
        const Rational target = Rational(i) * Rational::pow(Rational(2), i);
        spec.audit.push_back({"phi_growth i=" + std::to_string(i),
                              "phi(b_i/4) >= " + target.str(), phi && *phi >= target});
        const Rational expect = Rational(1) / (b * Rational::pow(Rational(2), i + 1));
        spec.audit.push_back({"mass i=" + std::to_string(i), expect.str(),
                              b_masses[static_cast<std::size_t>(i - 1)] == expect});
    }
    Rational l1(1, 2);
    for (int i = 1; i <= depth; ++i) l1 += Rational(1, 2) / Rational::pow(Rational(2), i);
    spec.audit.push_back({"l1_norm", l1.str(), spec.function.lp_norm_pow(1) == l1});
    const Rational tail = Rational(1) / Rational::pow(Rational(2), depth + 1);
    spec.audit.push_back({"tail_mass", tail.str(), spec.function.integral() == tail});

    Json b_json = Json::array();
    for (std::size_t i = 0; i < bs.size(); ++i)
        b_json.push_back({{"log2", exponents[i].get_str()},
                          {"mass", b_masses[i].str()}});
    spec.parameters = Json{{"depth", depth},
                           {"tail_mass", tail.str()},
                           {"b", std::move(b_json)}};
    return spec;
}

namespace {

// f-dependent quantity of the spiky family: n_k * integral of (f - n_k)^r
// over {f > n_k}, rounded downward when r or n_k force brackets.
RationalBracket kwapien_lk(const StepFunction& f, const RationalBracket& n_k, const Rational& r) {
    RationalBracket acc = RationalBracket::point(Rational(0));
    for (const auto& piece : f.pieces()) {
        if (!(piece.value > n_k.upper)) continue;  // conservative cut
        const RationalBracket gap_lo = r.is_integer()
                                           ? RationalBracket::point(Rational::pow(
                                                 piece.value - n_k.upper, r.num().get_si()))
                                           : pow_bracket(piece.value - n_k.upper, r);
        const RationalBracket gap_hi = r.is_integer()
                                           ? RationalBracket::point(Rational::pow(
                                                 piece.value - n_k.lower, r.num().get_si()))
                                           : pow_bracket(piece.value - n_k.lower, r);
        acc = acc + RationalBracket{gap_lo.lower * piece.iv.measure(),
                                    gap_hi.upper * piece.iv.measure(),
                                    gap_lo.exact && gap_hi.exact && n_k.exact};
    }
    return RationalBracket{n_k.lower * acc.lower, n_k.upper * acc.upper, acc.exact};
}

}  // namespace

CounterexampleSpec kwapien_generate(const Rational& p, const Rational& r,
                                    const std::vector<Rational>& n_table, int depth) {
    if (!(p >= Rational(2))) throw Error("p must be at least 2");
    if (!(r > p - Rational(1))) throw InvalidExponents("need r > p - 1");
    if (depth < 1) throw Error("depth must be positive");
    if (static_cast<int>(n_table.size()) < depth)
        throw TableTooShort("N table shorter than the requested depth");

    const Rational delta = (Rational(1) + r - p) / (Rational(2) * (r + Rational(1)));

    CounterexampleSpec spec;
    spec.family = "kwapien";

    // prefix of the summability condition, rounded upward
    RationalBracket prefix = RationalBracket::point(Rational(0));
    for (int k = 1; k <= depth; ++k) {
        const Rational& N = n_table[static_cast<std::size_t>(k - 1)];
        if (!N.is_integer() || N < Rational(2)) throw Error("N_k must be an integer at least 2");
        prefix = prefix + pow_bracket(N, -delta);
    }
    const RationalBracket gate = pow_bracket(Rational(2), -(p + Rational(1)));
    if (!(prefix.upper < gate.lower))
        throw Eqn2Violated("prefix sum " + prefix.upper.str() + " is not below 2^-(p+1)");
    spec.audit.push_back({"prefix_sum", prefix.upper.str() + " < " + gate.lower.str(), true});

    // E_k with measure N_k^{-p} (must be exact) and value 2 N_k^{1-delta}
    // (rounded down when irrational: the audit tracks the rounding)
    std::vector<Rational> masses, values;
    std::vector<RationalBracket> nks;
    Rational lo(0);
    std::vector<StepFunction::Piece> pieces;
    for (int k = 1; k <= depth; ++k) {
        const Rational& N = n_table[static_cast<std::size_t>(k - 1)];
        const Rational mass = pow_exact(N, -p);
        const RationalBracket nk = pow_bracket(N, Rational(1) - delta);
        const Rational value = Rational(2) * nk.lower;
        pieces.push_back({Interval(lo, lo + mass), value});
        lo += mass;
        masses.push_back(mass);
        values.push_back(value);
        nks.push_back(nk);
        if (!nk.exact)
            spec.audit.push_back({"value_rounded_down k=" + std::to_string(k), value.str(), true});
    }
    // balancing dip of height 1
    Rational fplus_mass(0);
    for (int k = 0; k < depth; ++k)
        fplus_mass += values[static_cast<std::size_t>(k)] * masses[static_cast<std::size_t>(k)];
    spec.audit.push_back({"fplus_mass", fplus_mass.str() + " < 1/2", fplus_mass < Rational(1, 2)});
    if (lo + fplus_mass > Rational(1)) throw Error("internal: spiky family does not fit in [0,1)");
    pieces.push_back({Interval(lo, lo + fplus_mass), Rational(-1)});
    spec.function = StepFunction(std::move(pieces));
    spec.audit.push_back({"mean_zero", spec.function.integral().str(),
                          spec.function.integral().is_zero()});

    // L_k growth: n_k int_{f > n_k} (f - n_k)^r >= N_k^{(r+1-p)/2}
    for (int k = 1; k <= depth; ++k) {
        const Rational& N = n_table[static_cast<std::size_t>(k - 1)];
        const RationalBracket lk = kwapien_lk(spec.function, nks[static_cast<std::size_t>(k - 1)], r);
        const RationalBracket target = pow_bracket(N, (r + Rational(1) - p) / Rational(2));
        spec.audit.push_back({"L_k k=" + std::to_string(k),
                              lk.lower.str() + " >= " + target.upper.str(),
                              lk.lower >= target.upper});
    }

    Json n_json = Json::array();
    for (int k = 0; k < depth; ++k)
        n_json.push_back({{"N", n_table[static_cast<std::size_t>(k)].str()},
                          {"mass", masses[static_cast<std::size_t>(k)].str()},
                          {"value", values[static_cast<std::size_t>(k)].str()}});
    spec.parameters = Json{{"p", p.str()},
                           {"r", r.str()},
                           {"delta", delta.str()},
                           {"depth", depth},
                           {"levels", std::move(n_json)}};
    return spec;
}

RationalBracket lq_norm(const StepFunction& g, const Rational& q) {
    if (!(q > Rational(0))) throw Error("q must be positive");
    RationalBracket acc = RationalBracket::point(Rational(0));
    for (const auto& piece : g.pieces()) {
        const Rational a = piece.value.abs();
        if (a.is_zero()) continue;
        const RationalBracket term =
            q.is_integer() ? RationalBracket::point(Rational::pow(a, q.num().get_si()))
                           : pow_bracket(a, q);
        acc = acc + term.mul_nonneg(RationalBracket::point(piece.iv.measure()));
    }
    return acc;
}

Json counterexample_json(const CounterexampleSpec& spec) {
    Json audit = Json::array();
    for (const auto& entry : spec.audit)
        audit.push_back({{"condition", entry.condition},
                         {"detail", entry.detail},
                         {"pass", entry.pass}});
    return Json{{"family", spec.family},
                {"parameters", spec.parameters},
                {"function", to_json(spec.function)},
                {"audit", std::move(audit)},
                {"all_pass", spec.all_pass()}};
}

}  // namespace coboundary
