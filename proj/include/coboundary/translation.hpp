#ifndef COBOUNDARY_TRANSLATION_HPP
#define COBOUNDARY_TRANSLATION_HPP

#include <cstddef>
#include <vector>

#include "coboundary/step_function.hpp"

namespace coboundary {

/// Finite piecewise translation of [0,1): an interval-exchange-style
/// partial injection. Each branch translates a source interval by a fixed
/// offset; sources are pairwise disjoint and so are images, so every value
/// of this type preserves Lebesgue measure on its domain. When the domain
/// has measure 1 the map is a measure-preserving bijection mod null sets.
///
/// Canonical form sorts branches by source and merges contiguous branches
/// with equal offsets, so structural equality is equality of maps mod null
/// sets. Construction enforces the branch budget (COBOUNDARY_MAX_BRANCHES).
class PiecewiseTranslation {
public:
    struct Branch {
        Interval source;
        Rational offset;
        Interval image() const { return Interval(source.lo + offset, source.hi + offset); }
        friend bool operator==(const Branch& a, const Branch& b) = default;
    };

    PiecewiseTranslation() = default;
    explicit PiecewiseTranslation(std::vector<Branch> branches);

    static PiecewiseTranslation identity(const IntervalSet& on);
    static PiecewiseTranslation identity_full() { return identity(IntervalSet::full()); }
    /// Rotation x -> x + alpha mod 1.
    static PiecewiseTranslation rotation(const Rational& alpha);

    const std::vector<Branch>& branches() const { return branches_; }
    bool empty() const { return branches_.empty(); }

    IntervalSet domain() const;
    IntervalSet image() const;
    bool is_full_bijection() const;

    /// Throws PointOutsideDomain when x is not covered by any source.
    Rational apply(const Rational& x) const;

    PiecewiseTranslation invert() const;
    PiecewiseTranslation restrict_source(const IntervalSet& s) const;
    /// Disjoint union of two partial maps (sources and images must stay disjoint).
    PiecewiseTranslation union_disjoint(const PiecewiseTranslation& o) const;

    /// Measure of the set where the two maps disagree; a point where
    /// exactly one of them is defined counts as disagreement.
    Rational diff_measure(const PiecewiseTranslation& o) const;

    friend bool operator==(const PiecewiseTranslation& a, const PiecewiseTranslation& b) = default;

private:
    std::vector<Branch> branches_;  // canonical
};

/// T after S: x -> T(S(x)). Throws DomainMismatch when the image of S is
/// not contained in the domain of T (mod null sets).
PiecewiseTranslation compose(const PiecewiseTranslation& T, const PiecewiseTranslation& S);

/// T^k for k >= 0 (k = 0 gives the identity on [0,1)).
PiecewiseTranslation iterate(const PiecewiseTranslation& T, std::size_t k);

/// f composed with T: x -> f(T x), zero off the domain of T. Throws
/// DomainMismatch when the support of f is not covered by the image of T.
StepFunction pullback(const StepFunction& f, const PiecewiseTranslation& T);

/// The order-preserving measure-preserving translation carrying `from`
/// onto `to`; both sets must have equal measure.
PiecewiseTranslation transport(const IntervalSet& from, const IntervalSet& to);

/// Current branch budget (COBOUNDARY_MAX_BRANCHES, default 10^6).
std::size_t branch_limit();

}  // namespace coboundary

#endif
