#include "coboundary/step_function.hpp"

#include <algorithm>

#include "coboundary/errors.hpp"

namespace coboundary {

StepFunction::StepFunction(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    std::erase_if(pieces_, [](const Piece& p) { return p.value.is_zero(); });
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.iv.lo < b.iv.lo; });
    std::vector<Piece> merged;
    for (auto& p : pieces_) {
        if (!merged.empty()) {
            if (p.iv.lo < merged.back().iv.hi)
                throw Error("step function pieces overlap at " + p.iv.lo.str());
            if (p.iv.lo == merged.back().iv.hi && p.value == merged.back().value) {
                merged.back().iv.hi = p.iv.hi;
                continue;
            }
        }
        merged.push_back(std::move(p));
    }
    pieces_ = std::move(merged);
}

StepFunction StepFunction::indicator(const IntervalSet& s, const Rational& value) {
    std::vector<Piece> ps;
    ps.reserve(s.parts().size());
    for (const auto& iv : s.parts()) ps.push_back({iv, value});
    return StepFunction(std::move(ps));
}

Rational StepFunction::evaluate(const Rational& x) const {
    for (const auto& p : pieces_) {
        if (p.iv.contains(x)) return p.value;
        if (p.iv.lo > x) break;
    }
    return Rational(0);
}

Rational StepFunction::integral() const {
    Rational s(0);
    for (const auto& p : pieces_) s += p.value * p.iv.measure();
    return s;
}

Rational StepFunction::integral_over(const IntervalSet& s) const {
    Rational acc(0);
    for (const auto& p : pieces_) {
        const Rational m = s.intersect(IntervalSet({p.iv})).measure();
        if (!m.is_zero()) acc += p.value * m;
    }
    return acc;
}

Rational StepFunction::sup_norm() const {
    Rational m(0);
    for (const auto& p : pieces_) m = max(m, p.value.abs());
    return m;
}

Rational StepFunction::lp_norm_pow(long p) const {
    if (p <= 0) throw InvalidExponents("lp_norm_pow wants p >= 1");
    Rational s(0);
    for (const auto& piece : pieces_) s += Rational::pow(piece.value.abs(), p) * piece.iv.measure();
    return s;
}

IntervalSet StepFunction::support() const {
    std::vector<Interval> ivs;
    ivs.reserve(pieces_.size());
    for (const auto& p : pieces_) ivs.push_back(p.iv);
    return IntervalSet(std::move(ivs));
}

IntervalSet StepFunction::above(const Rational& a) const {
    std::vector<Interval> ivs;
    for (const auto& p : pieces_)
        if (p.value > a) ivs.push_back(p.iv);
    IntervalSet s(std::move(ivs));
    if (Rational(0) > a) s = s.unite(support().complement());
    return s;
}

IntervalSet StepFunction::below(const Rational& a) const {
    std::vector<Interval> ivs;
    for (const auto& p : pieces_)
        if (p.value < a) ivs.push_back(p.iv);
    IntervalSet s(std::move(ivs));
    if (Rational(0) < a) s = s.unite(support().complement());
    return s;
}

IntervalSet StepFunction::level_set(const Rational& v) const {
    if (v.is_zero()) return support().complement();
    std::vector<Interval> ivs;
    for (const auto& p : pieces_)
        if (p.value == v) ivs.push_back(p.iv);
    return IntervalSet(std::move(ivs));
}

std::vector<std::pair<Rational, Rational>> StepFunction::mass_by_value(const IntervalSet& where) const {
    std::vector<std::pair<Rational, Rational>> out;
    auto add = [&out](const Rational& v, const Rational& m) {
        for (auto& [val, mass] : out)
            if (val == v) {
                mass += m;
                return;
            }
        out.emplace_back(v, m);
    };
    Rational covered(0);
    for (const auto& p : pieces_) {
        const Rational m = where.intersect(IntervalSet({p.iv})).measure();
        if (!m.is_zero()) {
            add(p.value, m);
            covered += m;
        }
    }
    const Rational zero_mass = where.measure() - covered;
    if (!zero_mass.is_zero()) add(Rational(0), zero_mass);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

StepFunction StepFunction::restrict(const IntervalSet& s) const {
    std::vector<Piece> out;
    for (const auto& p : pieces_) {
        const IntervalSet cut = s.intersect(IntervalSet({p.iv}));
        for (const auto& iv : cut.parts()) out.push_back({iv, p.value});
    }
    return StepFunction(std::move(out));
}

StepFunction StepFunction::map_values(const std::function<Rational(const Rational&)>& fn) const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) out.push_back({p.iv, fn(p.value)});
    return StepFunction(std::move(out));
}

StepFunction StepFunction::operator-() const {
    return map_values([](const Rational& v) { return -v; });
}

StepFunction StepFunction::scale(const Rational& c) const {
    return map_values([&c](const Rational& v) { return v * c; });
}

StepFunction StepFunction::abs() const {
    return map_values([](const Rational& v) { return v.abs(); });
}

namespace {

// Sweep over the common refinement of two canonical piece lists.
StepFunction combine(const StepFunction& a, const StepFunction& b,
                     const std::function<Rational(const Rational&, const Rational&)>& op) {
    std::vector<Rational> cuts;
    cuts.reserve(2 * (a.pieces().size() + b.pieces().size()));
    for (const auto& p : a.pieces()) {
        cuts.push_back(p.iv.lo);
        cuts.push_back(p.iv.hi);
    }
    for (const auto& p : b.pieces()) {
        cuts.push_back(p.iv.lo);
        cuts.push_back(p.iv.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<StepFunction::Piece> out;
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Rational& x = cuts[i];
        while (ia < a.pieces().size() && a.pieces()[ia].iv.hi <= x) ++ia;
        while (ib < b.pieces().size() && b.pieces()[ib].iv.hi <= x) ++ib;
        const Rational va = (ia < a.pieces().size() && a.pieces()[ia].iv.contains(x))
                                ? a.pieces()[ia].value
                                : Rational(0);
        const Rational vb = (ib < b.pieces().size() && b.pieces()[ib].iv.contains(x))
                                ? b.pieces()[ib].value
                                : Rational(0);
        const Rational v = op(va, vb);
        if (!v.is_zero()) out.push_back({Interval(cuts[i], cuts[i + 1]), v});
    }
    return StepFunction(std::move(out));
}

}  // namespace

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, [](const Rational& x, const Rational& y) { return x + y; });
}

StepFunction operator-(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, [](const Rational& x, const Rational& y) { return x - y; });
}

}  // namespace coboundary
