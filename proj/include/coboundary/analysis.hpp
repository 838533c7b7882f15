#ifndef COBOUNDARY_ANALYSIS_HPP
#define COBOUNDARY_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "coboundary/json_io.hpp"
#include "coboundary/translation.hpp"

namespace coboundary {

/// Fast-growing positive sequence a_1 < a_2 < ... used by the generic-class
/// machinery. The built-in family is a_i = 2^{i!}, whose growth conditions
/// reduce to exact integer-exponent comparisons.
class GrowthSequence {
public:
    static GrowthSequence factorial_pow2();
    static GrowthSequence from_table(std::vector<Rational> values);

    /// a_i, 1-based. The built-in family materializes 2^{i!} and refuses
    /// indices whose exponent would not fit in memory.
    Rational value(int i) const;
    bool is_factorial_family() const { return table_.empty(); }

    /// a_i^e as an exact rational; throws ExponentNotRepresentable when the
    /// power is irrational.
    Rational power(int i, const Rational& e) const;
    /// a_i^e with certified direction when the exact power does not exist.
    RationalBracket power_bracket(int i, const Rational& e) const;

    /// Smallest N (on the prefix 1..prefix_len) with a_i < a_{i+1}^alpha / 2
    /// for every N <= i < prefix_len; nullopt when no such N is witnessed.
    std::optional<int> growth_index(const Rational& alpha, int prefix_len) const;

private:
    std::vector<Rational> table_;  // empty for the factorial family
    mpz_class log2_exponent(int i) const;
};

/// mu{x : |s(x)| <= M}, counting the implicit zero region when M >= 0.
Rational measure_within(const StepFunction& s, const Rational& M);

struct BirkhoffReport {
    int n = 0;
    StepFunction sum;  // S_n f, exact
    std::vector<std::pair<Rational, Rational>> level_stats;  // (M, mu{|S_n f| <= M})
};

/// Exact Birkhoff sum S_n f = sum_{i<n} f.T^i with threshold statistics.
/// T must be a bijection of [0,1).
BirkhoffReport birkhoff(const StepFunction& f, const PiecewiseTranslation& T, int n,
                        const std::vector<Rational>& thresholds);

/// min over 1 <= n <= n_max of mu{|S_n f| <= M}; 1 minus the result is the
/// largest escape witnessed up to n_max.
Rational schmidt_statistic(const StepFunction& f, const PiecewiseTranslation& T, const Rational& M,
                           int n_max);

struct DnResult {
    bool found = false;
    int witness_k = 0;  // first k in (n, k_max] with mu{|S_k f| > n} > eta
};

/// Scans k in (n, k_max]. Requires 0 < eta < 1/10.
DnResult dn_membership(const StepFunction& f, const PiecewiseTranslation& T, int n,
                       const Rational& eta, int k_max);

struct GpRow {
    int i = 0;
    Rational v_measure;            // mu{f > a_i}
    RationalBracket v_threshold;   // 1/(a_i^p i^2)
    Rational u_measure;            // mu{f < -a_{i-1}}
    RationalBracket u_threshold;   // 1/(a_{i+1}^p i^2)
    bool pass = false;
};

struct GpVerdict {
    bool member = false;
    int witness = 0;
    bool witness_at_boundary = false;  // witness == n+1, flagged explicitly
    std::vector<GpRow> rows;
};

/// Membership scan for the heavy-positive/light-negative tail class: looks
/// for i in (n, i_max] with mu{f > a_i} > 1/(a_i^p i^2) and
/// mu{f < -a_{i-1}} < 1/(a_{i+1}^p i^2). Bracketed thresholds are compared
/// conservatively, so a reported member is certified.
GpVerdict gp_membership(const StepFunction& f, const Rational& p, int n, const GrowthSequence& a,
                        int i_max);

struct GpDensifyResult {
    StepFunction f1;
    int i0 = 0;
    int i1 = 0;
    IntervalSet spike;  // V, value 2 a_{i1}
    IntervalSet dip;    // U, value -a_{i1-1}
    Rational spike_measure;
    Rational dip_measure;
    RationalBracket distance_pow;  // integral of |f - f1|^p, exact when p is integral
    std::vector<std::pair<std::string, std::string>> audit;
};

/// Moves f within eps (in L^p) into the class witnessed at i1: carves a
/// mean-zero pocket Y, plants a spike of height 2 a_{i1} and a shallow dip
/// of depth a_{i1-1}. The output passes gp_membership at its own witness.
GpDensifyResult gp_densify(const StepFunction& f, const Rational& p, int n, const Rational& epsilon,
                           const GrowthSequence& a);

struct GpWitness {
    int i = 0;
    Rational a_prime;        // > a_i, level exceeded by the heavy tail
    Rational a_double;       // > a_{i-1}, level bounding the light tail
    Rational mu_prime;       // mu{f > a'} > mu' > 1/(a_i^p i^2)
    Rational nu_prime;       // mu{f < -a''} < nu' < 1/(a_{i+1}^p i^2)
};

/// Radius of the ball around f certified to stay inside the class:
/// min{(mu' - 1/(a_i^p i^2))(a' - a_i)^p, (1/(a_{i+1}^p i^2) - nu')(a'' - a_{i-1})^p}.
/// Rounded toward zero when the powers are irrational, so the returned
/// radius is always safe. Throws InvalidWitness when the data fails.
Rational gp_openness_radius(const StepFunction& f, const Rational& p, const GpWitness& witness,
                            const GrowthSequence& a);

/// Lower-bound evaluators for the transfer-norm blowup:
/// case 1: a_n^{q+1-p} / (32 * 4^q * a_{n-1} * n^2)
/// case 2: a_n^{kq-p} / (n^2 * 4^q * a_{n-1}^{q(k-1)}), k minimal with kq > p.
/// Requires q > p-1.
Rational core_lower_bound(const Rational& p, const Rational& q, int n, const GrowthSequence& a,
                          int which_case);

struct AuditEntry {
    std::string condition;
    std::string detail;
    bool pass = false;
};

struct CounterexampleSpec {
    std::string family;  // "not-a-moment" | "kwapien" | "generic-gp"
    StepFunction function;
    Json parameters;
    std::vector<AuditEntry> audit;

    bool all_pass() const;
};

/// Densifies f into the class and packages the result with its membership
/// and openness audits.
CounterexampleSpec generic_gp_generate(const StepFunction& f, const Rational& p, int n,
                                       const Rational& epsilon, const GrowthSequence& a);

/// f = I_A - sum b_i I_{B_i} with mu(A) = 1/2, b_i minimal from the 2^{j!}
/// family against the phi table, mu(B_i) = 1/(b_i 2^{i+1}), truncated at
/// `depth` with the exact geometric tail recorded.
CounterexampleSpec not_a_moment_generate(const std::vector<std::pair<Rational, Rational>>& phi_table,
                                         int depth);

/// Spiky L^p family: E_k of measure N_k^{-p} carrying value 2 N_k^{1-delta}
/// with delta = (1+r-p)/(2(r+1)), balanced by an indicator dip. Audits the
/// prefix sum condition, the f+ mass, and the L_k growth, all with
/// direction-safe rounding. Table entries are positive integers (held as
/// rationals since they grow past machine range).
CounterexampleSpec kwapien_generate(const Rational& p, const Rational& r,
                                    const std::vector<Rational>& n_table, int depth);

/// Exact integral of |g|^q when q is a positive integer, otherwise a
/// certified bracket.
RationalBracket lq_norm(const StepFunction& g, const Rational& q);

Json counterexample_json(const CounterexampleSpec& spec);

}  // namespace coboundary

#endif
