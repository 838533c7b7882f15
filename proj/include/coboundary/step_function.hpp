#ifndef COBOUNDARY_STEP_FUNCTION_HPP
#define COBOUNDARY_STEP_FUNCTION_HPP

#include <functional>
#include <utility>
#include <vector>

#include "coboundary/interval.hpp"

namespace coboundary {

/// Finite-step function on [0,1): finitely many disjoint half-open
/// intervals with rational values, implicitly 0 elsewhere. Canonical form
/// (sorted, zero pieces dropped, adjacent equal-valued pieces merged)
/// makes equality of functions structural equality.
class StepFunction {
public:
    struct Piece {
        Interval iv;
        Rational value;
        friend bool operator==(const Piece& a, const Piece& b) = default;
    };

    StepFunction() = default;
    /// Canonicalizes. Pieces must be pairwise disjoint.
    explicit StepFunction(std::vector<Piece> pieces);

    static StepFunction zero() { return StepFunction(); }
    static StepFunction indicator(const IntervalSet& s, const Rational& value);

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool is_zero() const { return pieces_.empty(); }

    Rational evaluate(const Rational& x) const;

    Rational integral() const;
    Rational integral_over(const IntervalSet& s) const;

    /// Essential supremum of |f| (0 for the zero function).
    Rational sup_norm() const;
    /// Exact integral of |f|^p for a positive integer p.
    Rational lp_norm_pow(long p) const;

    IntervalSet support() const;
    /// {x : f(x) > a} as an interval set (the implicit zero region counts).
    IntervalSet above(const Rational& a) const;
    /// {x : f(x) < a}.
    IntervalSet below(const Rational& a) const;
    /// {x : f(x) = v}.
    IntervalSet level_set(const Rational& v) const;

    /// Distinct values of f on `where` with their measures, including the
    /// value 0 when it occupies positive measure. Sorted by value.
    std::vector<std::pair<Rational, Rational>> mass_by_value(const IntervalSet& where) const;

    StepFunction restrict(const IntervalSet& s) const;
    StepFunction map_values(const std::function<Rational(const Rational&)>& fn) const;

    StepFunction operator-() const;
    StepFunction scale(const Rational& c) const;
    friend StepFunction operator+(const StepFunction& a, const StepFunction& b);
    friend StepFunction operator-(const StepFunction& a, const StepFunction& b);

    StepFunction abs() const;

    friend bool operator==(const StepFunction& a, const StepFunction& b) = default;

private:
    std::vector<Piece> pieces_;  // canonical
};

}  // namespace coboundary

#endif
