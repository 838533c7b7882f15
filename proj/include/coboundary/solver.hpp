#ifndef COBOUNDARY_SOLVER_HPP
#define COBOUNDARY_SOLVER_HPP

#include <utility>
#include <vector>

#include "coboundary/json_io.hpp"
#include "coboundary/tower.hpp"

namespace coboundary {

/// Certificate for f = g - g.T: the identity holds exactly on exact_set,
/// whose complement has measure at most residual_bound, and |g| <= sup_bound.
struct SolutionCertificate {
    StepFunction f;
    PiecewiseTranslation transformation;
    StepFunction transfer;
    IntervalSet exact_set;
    Rational residual_bound;
    Rational sup_bound;
};

struct VerifyOutcome {
    SolutionCertificate certificate;
    IntervalSet witness;  // points where the identity fails or T is undefined
    bool exact() const { return witness.empty(); }
};

/// Computes g - g.T exactly and compares with f piecewise.
VerifyOutcome verify(const StepFunction& f, const PiecewiseTranslation& T, const StepFunction& g);

/// Sum of f from the bottom to the top of each tower, as a function on the
/// union of the tower bases.
StepFunction induced_sum(const std::vector<Tower>& towers, const StepFunction& f);

/// Extends a solution of the induced equation on the tower bases to the
/// whole tower union: T follows the tower maps and re-enters the base
/// through T_A from the tops; g accumulates partial sums of f upward from
/// g_A. Throws InvalidBaseSolution unless g_A solves the induced equation
/// for induced_sum(towers, f) exactly.
std::pair<PiecewiseTranslation, StepFunction> extend_coboundary(const StepFunction& f,
                                                                const std::vector<Tower>& towers,
                                                                const PiecewiseTranslation& T_A,
                                                                const StepFunction& g_A);

struct StageState {
    int stage_index = 0;
    PiecewiseTranslation transformation;  // open stage map, undefined on the residual
    IntervalSet residual;                 // current tower top plus leftovers
    Rational residual_measure_bound;      // beta_n
    StepFunction transfer;                // transfer if the stage were closed here
    std::vector<Tower> towers;
};

struct BoundedSolution {
    SolutionCertificate certificate;
    std::vector<StageState> stages;
};

/// Iterative cut-and-stack construction for bounded mean-zero step
/// functions: ||g||_inf <= ||f||_inf + delta, with the stage maps agreeing
/// except on sets of measure beta_n. For rational step data the transfer
/// is exact after the first stage; later stages refine the tower against
/// dyadic partitions without disturbing the identity.
BoundedSolution construct_bounded_solution(const StepFunction& f, const Rational& delta,
                                           int stages);

enum class Solvability { BalancedFinite, BalancedInfinite, Unbalanced };

/// Compares the positive and negative mass of f exactly. BalancedInfinite
/// is reserved for symbolic inputs; finite step functions never produce it.
Solvability check_solvability(const StepFunction& f);

struct BandReport {
    long k = 0;               // positive side threshold: k-1 < f <= k
    long l = 0;               // negative side threshold: -l <= f < 1-l
    IntervalSet x_part;       // X_i'
    IntervalSet y_part;       // Y_i'
    Rational epsilon;         // eps_i budget for this band
    Rational bound;           // max{k,l} + eps_i
    Rational transfer_sup;    // achieved sup of |g| on the band
    RationalBracket g_pow;    // integral of |g|^{p-1} over the band
};

struct LpSolution {
    SolutionCertificate certificate;
    std::vector<BandReport> bands;
    std::size_t j_star = 0;    // bands up to this index sit outside the chain
    long ell_j = 0;            // the divisor in the chain's second term
    RationalBracket head;      // integral of |g|^{p-1} over bands <= j_star
    RationalBracket lhs;       // integral of |g|^{p-1} over bands > j_star
    RationalBracket rhs;       // 2^{p-1}||f||_{p-1}^{p-1} + (2^p/ell_j)||f||_p^p
    bool chain_holds = false;  // lhs <= rhs, compared conservatively
};

/// Band-by-band construction for mean-zero step f and p >= 1: each band
/// pairs a positive slab k-1 < f <= k with a balancing negative slab,
/// solves it through towers, and the transfer obeys |g| < max{k,l} + eps
/// per band. Reports the exact integral of |g|^{p-1} and the comparison
/// chain against 2^{p-1}||f||_{p-1}^{p-1} + (2^p/ell_j)||f||_p^p.
LpSolution construct_lp_solution(const StepFunction& f, const Rational& p,
                                 std::vector<Rational> delta_schedule, int stages);

Json certificate_json(const SolutionCertificate& cert);
Json refutation_json(const VerifyOutcome& outcome);

}  // namespace coboundary

#endif
