#ifndef COBOUNDARY_INTERVAL_HPP
#define COBOUNDARY_INTERVAL_HPP

#include <vector>

#include "coboundary/rational.hpp"

namespace coboundary {

/// Half-open interval [lo, hi) inside the unit interval, with positive
/// length. Endpoint behavior is fixed by the half-open convention so
/// partitions tile exactly.
struct Interval {
    Rational lo;
    Rational hi;

    Interval(Rational lo_, Rational hi_);

    Rational measure() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x < hi; }

    friend bool operator==(const Interval& a, const Interval& b) = default;
};

/// Finite union of disjoint half-open intervals in canonical form:
/// sorted by left endpoint, adjacent pieces merged. Equality of sets is
/// structural equality of the canonical form.
class IntervalSet {
public:
    IntervalSet() = default;
    /// Canonicalizes (sorts, merges overlap and adjacency). Overlapping
    /// input intervals are tolerated and unioned.
    explicit IntervalSet(std::vector<Interval> parts);
    IntervalSet(Rational lo, Rational hi) : IntervalSet({Interval(std::move(lo), std::move(hi))}) {}

    static IntervalSet full() { return IntervalSet(Rational(0), Rational(1)); }

    const std::vector<Interval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    std::size_t piece_count() const { return parts_.size(); }
    Rational measure() const;
    bool contains(const Rational& x) const;

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet difference(const IntervalSet& o) const;
    IntervalSet complement() const;  // within [0,1)

    bool disjoint_from(const IntervalSet& o) const { return intersect(o).empty(); }
    bool subset_of(const IntervalSet& o) const { return difference(o).empty(); }

    /// Leftmost subset of exactly the given measure (0 <= m <= measure()).
    IntervalSet take_prefix(const Rational& m) const;
    /// Splits into n consecutive pieces of equal measure.
    std::vector<IntervalSet> split_equal(std::size_t n) const;

    friend bool operator==(const IntervalSet& a, const IntervalSet& b) = default;

private:
    std::vector<Interval> parts_;
};

/// Union of a family of pairwise results.
IntervalSet unite_all(const std::vector<IntervalSet>& sets);

}  // namespace coboundary

#endif
