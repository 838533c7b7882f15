#include "coboundary/interval.hpp"

#include <algorithm>

#include "coboundary/errors.hpp"

namespace coboundary {

Interval::Interval(Rational lo_, Rational hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo < Rational(0) || hi > Rational(1) || !(lo < hi))
        throw Error("interval [" + lo.str() + ", " + hi.str() + ") is not a valid subinterval of [0,1)");
}

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) {
    std::sort(parts_.begin(), parts_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (auto& iv : parts_) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            if (iv.hi > merged.back().hi) merged.back().hi = iv.hi;
        } else {
            merged.push_back(iv);
        }
    }
    parts_ = std::move(merged);
}

Rational IntervalSet::measure() const {
    Rational m(0);
    for (const auto& iv : parts_) m += iv.measure();
    return m;
}

bool IntervalSet::contains(const Rational& x) const {
    for (const auto& iv : parts_) {
        if (iv.contains(x)) return true;
        if (iv.lo > x) break;
    }
    return false;
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    std::vector<Interval> all(parts_);
    all.insert(all.end(), o.parts_.begin(), o.parts_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < o.parts_.size()) {
        const Interval& a = parts_[i];
        const Interval& b = o.parts_[j];
        const Rational lo = max(a.lo, b.lo);
        const Rational hi = min(a.hi, b.hi);
        if (lo < hi) out.emplace_back(lo, hi);
        if (a.hi < b.hi)
            ++i;
        else
            ++j;
    }
    return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::difference(const IntervalSet& o) const {
    std::vector<Interval> out;
    std::size_t j = 0;
    for (const auto& a : parts_) {
        Rational cur = a.lo;
        while (j < o.parts_.size() && o.parts_[j].hi <= cur) ++j;
        std::size_t k = j;
        while (k < o.parts_.size() && o.parts_[k].lo < a.hi) {
            if (cur < o.parts_[k].lo) out.emplace_back(cur, o.parts_[k].lo);
            cur = max(cur, o.parts_[k].hi);
            ++k;
        }
        if (cur < a.hi) out.emplace_back(cur, a.hi);
    }
    return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::complement() const { return full().difference(*this); }

IntervalSet IntervalSet::take_prefix(const Rational& m) const {
    if (m.sign() < 0 || m > measure())
        throw Error("take_prefix: requested measure " + m.str() + " out of range");
    std::vector<Interval> out;
    Rational left = m;
    for (const auto& iv : parts_) {
        if (left.is_zero()) break;
        const Rational len = iv.measure();
        if (len <= left) {
            out.push_back(iv);
            left -= len;
        } else {
            out.emplace_back(iv.lo, iv.lo + left);
            left = Rational(0);
        }
    }
    return IntervalSet(std::move(out));
}

std::vector<IntervalSet> IntervalSet::split_equal(std::size_t n) const {
    if (n == 0) throw Error("split_equal: n must be positive");
    const Rational cell = measure() / Rational(static_cast<long>(n));
    if (cell.is_zero()) throw DegenerateInput("split_equal on a null set");
    std::vector<IntervalSet> out;
    out.reserve(n);
    IntervalSet rest = *this;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        IntervalSet head = rest.take_prefix(cell);
        rest = rest.difference(head);
        out.push_back(std::move(head));
    }
    out.push_back(std::move(rest));
    return out;
}

IntervalSet unite_all(const std::vector<IntervalSet>& sets) {
    std::vector<Interval> all;
    for (const auto& s : sets) all.insert(all.end(), s.parts().begin(), s.parts().end());
    return IntervalSet(std::move(all));
}

}  // namespace coboundary
