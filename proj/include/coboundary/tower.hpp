#ifndef COBOUNDARY_TOWER_HPP
#define COBOUNDARY_TOWER_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "coboundary/json_io.hpp"
#include "coboundary/translation.hpp"

namespace coboundary {

/// Rokhlin-type tower: equal-measure disjoint levels I_1..I_h and a
/// measure-preserving map carrying I_i onto I_{i+1} for i < h. A height-1
/// tower has an empty map.
struct Tower {
    std::vector<IntervalSet> levels;
    PiecewiseTranslation map;

    std::size_t height() const { return levels.size(); }
    const IntervalSet& base() const { return levels.front(); }
    const IntervalSet& top() const { return levels.back(); }
    IntervalSet span() const { return unite_all(levels); }

    /// The map base -> level i obtained by iterating the tower map
    /// (i = 0 is the identity on the base).
    PiecewiseTranslation climb(std::size_t i) const;

    /// Checks level disjointness, equal measures, and that the map carries
    /// each level onto the next; throws Error when violated.
    void validate() const;
};

/// Balanced uniform partition of a set A for a step function f: cells of
/// equal measure on which f is constant, plus an exceptional set. With
/// rational data the tiling is exact and the exceptional set is empty.
struct PubPartition {
    std::vector<IntervalSet> cells;
    IntervalSet exceptional;
    Rational epsilon;
};

struct TowerPair {
    Tower first;
    Tower second;
    Rational epsilon;
};

/// Two towers built from user-supplied integer pairs (p1,q1), (p2,q2)
/// with p_i*b - q_i*c small and of the same sign. Heights come out as
/// p2+q2 and (p2-p1)+(q2-q1).
struct ConvergentPair {
    long p1, q1;
    long p2, q2;
};

struct DecompositionPart {
    IntervalSet carrier;
    StepFunction restricted;
};
using Decomposition = std::vector<DecompositionPart>;

/// Equal-measure cells on which f is constant, tiling A exactly, refined
/// against the partition Q so each q in Q is exactly a union of cells.
/// At least `min_cells` cells are produced. Throws DegenerateInput when
/// mu(A) = 0.
PubPartition build_pub_partition(const StepFunction& f, const IntervalSet& A,
                                 const Rational& epsilon, std::size_t min_cells = 1,
                                 const std::vector<IntervalSet>& Q = {});

/// Balanced uniform tower for a mean-zero f on A with height > min_height:
/// f is constant on every level, running sums along the tower stay within
/// ||f||_inf, and the full sum is exactly 0 from every base point. Each
/// q in Q is exactly a union of levels. Throws UnbalancedInput when the
/// integral of f over A is nonzero, DegenerateInput when mu(A) = 0.
Tower build_tub_tower(const StepFunction& f, const IntervalSet& A, const Rational& epsilon,
                      std::size_t min_height, const std::vector<IntervalSet>& Q = {});

/// Orders cells so that a nonpositive prefix sum is always followed by a
/// nonnegative cell integral and vice versa; ties pick the lowest index.
/// All prefix sums stay within the largest single-cell |integral|.
/// Throws UnbalancedInput unless the integrals sum to zero.
std::vector<std::size_t> greedy_stack(const std::vector<std::pair<IntervalSet, Rational>>& cells);

/// Rebuilds the tower map by bucketing f into quantized values of width
/// 1/k (k the smallest integer above 3h/epsilon) and sorting each level
/// monotonically in alternating direction, so partial sums from any two
/// base points stay within epsilon of each other.
Tower refine_levels(const Tower& tower, const StepFunction& f, const Rational& epsilon);

/// Two towers that exactly partition A for a two-valued mean-zero f
/// (values b > 0 and -c < 0). Without convergent data b/c is treated via
/// its exact ratio (full tower sums are 0); with convergent data the
/// supplied pairs are validated and the split measures computed from them.
TowerPair build_two_step_towers(const StepFunction& f, const IntervalSet& A,
                                std::size_t min_height, const Rational& epsilon,
                                const std::optional<ConvergentPair>& convergents = std::nullopt);

/// Splits a mean-zero m-valued step function into at most m-1 disjoint
/// mean-zero parts carrying at most two values each.
Decomposition decompose_two_value(const StepFunction& f);

/// Covers the support of a bounded mean-zero f with disjoint towers whose
/// full sums vanish and whose running sums stay within ||f||_inf. The i-th
/// part uses epsilons[i] (extended by halving when the list runs short).
std::vector<Tower> decompose_bounded(const StepFunction& f, std::vector<Rational> epsilons);

/// Exact running sums of f along a tower: entry k is the step function on
/// the base whose value at x is sum_{i<=k} f(tower-map^i x).
std::vector<StepFunction> tower_running_sums(const Tower& tower, const StepFunction& f);

/// {"height": h, "levels": [[interval...], ...], "map": {branches...}},
/// deterministic through the canonical branch order.
Json tower_json(const Tower& tower);
Tower tower_from_json(const Json& j);

}  // namespace coboundary

#endif
