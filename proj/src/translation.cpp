#include "coboundary/translation.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "coboundary/errors.hpp"

namespace coboundary {

std::size_t branch_limit() {
    static const std::size_t limit = [] {
        if (const char* s = std::getenv("COBOUNDARY_MAX_BRANCHES")) {
            const long v = std::atol(s);
            if (v > 0) return static_cast<std::size_t>(v);
        }
        return static_cast<std::size_t>(1000000);
    }();
    return limit;
}

PiecewiseTranslation::PiecewiseTranslation(std::vector<Branch> branches)
    : branches_(std::move(branches)) {
    if (branches_.size() > branch_limit())
        throw BranchLimitExceeded("translation would have " + std::to_string(branches_.size()) +
                                  " branches, over the configured limit");
    std::sort(branches_.begin(), branches_.end(),
              [](const Branch& a, const Branch& b) { return a.source.lo < b.source.lo; });
    std::vector<Branch> merged;
    for (auto& b : branches_) {
        b.image();  // validates the image stays inside [0,1]
        if (!merged.empty()) {
            if (b.source.lo < merged.back().source.hi)
                throw Error("translation branches have overlapping sources at " + b.source.lo.str());
            if (b.source.lo == merged.back().source.hi && b.offset == merged.back().offset) {
                merged.back().source.hi = b.source.hi;
                continue;
            }
        }
        merged.push_back(std::move(b));
    }
    branches_ = std::move(merged);

    // Injectivity: images must be pairwise disjoint.
    std::vector<Interval> images;
    images.reserve(branches_.size());
    for (const auto& b : branches_) images.push_back(b.image());
    std::sort(images.begin(), images.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i + 1 < images.size(); ++i)
        if (images[i + 1].lo < images[i].hi)
            throw NotBijective("translation branch images overlap at " + images[i + 1].lo.str());
}

PiecewiseTranslation PiecewiseTranslation::identity(const IntervalSet& on) {
    std::vector<Branch> bs;
    bs.reserve(on.parts().size());
    for (const auto& iv : on.parts()) bs.push_back({iv, Rational(0)});
    return PiecewiseTranslation(std::move(bs));
}

PiecewiseTranslation PiecewiseTranslation::rotation(const Rational& alpha) {
    Rational a = alpha - Rational(alpha.floor(), 1);
    if (a.is_zero()) return identity_full();
    return PiecewiseTranslation({{Interval(Rational(0), Rational(1) - a), a},
                                 {Interval(Rational(1) - a, Rational(1)), a - Rational(1)}});
}

IntervalSet PiecewiseTranslation::domain() const {
    std::vector<Interval> ivs;
    ivs.reserve(branches_.size());
    for (const auto& b : branches_) ivs.push_back(b.source);
    return IntervalSet(std::move(ivs));
}

IntervalSet PiecewiseTranslation::image() const {
    std::vector<Interval> ivs;
    ivs.reserve(branches_.size());
    for (const auto& b : branches_) ivs.push_back(b.image());
    return IntervalSet(std::move(ivs));
}

bool PiecewiseTranslation::is_full_bijection() const {
    return domain() == IntervalSet::full() && image() == IntervalSet::full();
}

Rational PiecewiseTranslation::apply(const Rational& x) const {
    for (const auto& b : branches_) {
        if (b.source.contains(x)) return x + b.offset;
        if (b.source.lo > x) break;
    }
    throw PointOutsideDomain("point " + x.str() + " is outside the translation domain");
}

PiecewiseTranslation PiecewiseTranslation::invert() const {
    std::vector<Branch> bs;
    bs.reserve(branches_.size());
    for (const auto& b : branches_) bs.push_back({b.image(), -b.offset});
    return PiecewiseTranslation(std::move(bs));
}

PiecewiseTranslation PiecewiseTranslation::restrict_source(const IntervalSet& s) const {
    std::vector<Branch> bs;
    for (const auto& b : branches_) {
        const IntervalSet cut = s.intersect(IntervalSet({b.source}));
        for (const auto& iv : cut.parts()) bs.push_back({iv, b.offset});
    }
    return PiecewiseTranslation(std::move(bs));
}

PiecewiseTranslation PiecewiseTranslation::union_disjoint(const PiecewiseTranslation& o) const {
    std::vector<Branch> bs(branches_);
    bs.insert(bs.end(), o.branches_.begin(), o.branches_.end());
    return PiecewiseTranslation(std::move(bs));
}

Rational PiecewiseTranslation::diff_measure(const PiecewiseTranslation& o) const {
    const IntervalSet d1 = domain(), d2 = o.domain();
    Rational diff = d1.difference(d2).measure() + d2.difference(d1).measure();
    // On the common domain, compare offsets over the branch refinement.
    for (const auto& a : branches_) {
        for (const auto& b : o.branches_) {
            if (a.offset == b.offset) continue;
            const Rational lo = max(a.source.lo, b.source.lo);
            const Rational hi = min(a.source.hi, b.source.hi);
            if (lo < hi) diff += hi - lo;
        }
    }
    return diff;
}

namespace {

// First branch whose source could overlap [lo, ...): branches are sorted by
// source, so binary search on the right endpoint applies.
std::size_t first_overlap(const std::vector<PiecewiseTranslation::Branch>& branches,
                          const Rational& lo) {
    std::size_t a = 0, b = branches.size();
    while (a < b) {
        const std::size_t mid = (a + b) / 2;
        if (branches[mid].source.hi <= lo)
            a = mid + 1;
        else
            b = mid;
    }
    return a;
}

}  // namespace

PiecewiseTranslation compose(const PiecewiseTranslation& T, const PiecewiseTranslation& S) {
    if (!S.image().difference(T.domain()).empty())
        throw DomainMismatch("compose: image of the inner map is not covered by the outer domain");
    std::vector<PiecewiseTranslation::Branch> bs;
    for (const auto& s : S.branches()) {
        const Interval j = s.image();
        for (std::size_t i = first_overlap(T.branches(), j.lo); i < T.branches().size(); ++i) {
            const auto& t = T.branches()[i];
            if (!(t.source.lo < j.hi)) break;
            const Rational lo = max(j.lo, t.source.lo);
            const Rational hi = min(j.hi, t.source.hi);
            if (lo < hi) bs.push_back({Interval(lo - s.offset, hi - s.offset), s.offset + t.offset});
        }
    }
    return PiecewiseTranslation(std::move(bs));
}

PiecewiseTranslation iterate(const PiecewiseTranslation& T, std::size_t k) {
    PiecewiseTranslation acc = PiecewiseTranslation::identity_full();
    for (std::size_t i = 0; i < k; ++i) acc = compose(T, acc);
    return acc;
}

StepFunction pullback(const StepFunction& f, const PiecewiseTranslation& T) {
    if (!f.support().difference(T.image()).empty())
        throw DomainMismatch("pullback: support of the function is not covered by the image");
    std::vector<StepFunction::Piece> ps;
    const auto& pieces = f.pieces();
    for (const auto& b : T.branches()) {
        const Interval j = b.image();
        // pieces are sorted; find the first one reaching past j.lo
        std::size_t a = 0, z = pieces.size();
        while (a < z) {
            const std::size_t mid = (a + z) / 2;
            if (pieces[mid].iv.hi <= j.lo)
                a = mid + 1;
            else
                z = mid;
        }
        for (std::size_t i = a; i < pieces.size() && pieces[i].iv.lo < j.hi; ++i) {
            const Rational lo = max(j.lo, pieces[i].iv.lo);
            const Rational hi = min(j.hi, pieces[i].iv.hi);
            if (lo < hi) ps.push_back({Interval(lo - b.offset, hi - b.offset), pieces[i].value});
        }
    }
    return StepFunction(std::move(ps));
}

PiecewiseTranslation transport(const IntervalSet& from, const IntervalSet& to) {
    if (from.measure() != to.measure())
        throw DomainMismatch("transport between sets of different measure (" +
                             from.measure().str() + " vs " + to.measure().str() + ")");
    std::vector<PiecewiseTranslation::Branch> bs;
    std::size_t i = 0, j = 0;
    Rational fi(0), tj(0);  // consumed prefix of the current pieces
    while (i < from.parts().size() && j < to.parts().size()) {
        const Interval& a = from.parts()[i];
        const Interval& b = to.parts()[j];
        const Rational alen = a.measure() - fi;
        const Rational blen = b.measure() - tj;
        const Rational step = min(alen, blen);
        const Rational src_lo = a.lo + fi;
        const Rational dst_lo = b.lo + tj;
        bs.push_back({Interval(src_lo, src_lo + step), dst_lo - src_lo});
        fi += step;
        tj += step;
        if (fi == a.measure()) {
            ++i;
            fi = Rational(0);
        }
        if (tj == b.measure()) {
            ++j;
            tj = Rational(0);
        }
    }
    return PiecewiseTranslation(std::move(bs));
}

}  // namespace coboundary
