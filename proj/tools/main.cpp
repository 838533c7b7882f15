// coboundary: build, verify and probe solutions of f = g - g.T on [0,1)
// with exact rational arithmetic. Exit codes: 0 success, 1 error,
// 2 negative mathematical verdict (refutation, unsolvable, non-member).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coboundary/analysis.hpp"
#include "coboundary/errors.hpp"
#include "coboundary/solver.hpp"

using namespace coboundary;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    out << text;
}

void emit_json(const std::string& out_path, const Json& j) { emit(out_path, j.dump(2) + "\n"); }

StepFunction load_step(const std::string& path) {
    return step_function_from_json(load_json_file(path));
}

std::vector<Rational> parse_rational_list(const std::string& csv) {
    std::vector<Rational> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(Rational::parse(item));
    }
    return out;
}

// log2 table on powers of two, enough for the default moment family
std::vector<std::pair<Rational, Rational>> default_phi_table() {
    std::vector<std::pair<Rational, Rational>> table;
    table.reserve(721);
    for (long k = 0; k <= 720; ++k) table.emplace_back(Rational::pow2(mpz_class(k)), Rational(k));
    return table;
}

std::vector<std::pair<Rational, Rational>> load_phi_table(const std::string& path) {
    const Json j = load_json_file(path);
    if (!j.is_array()) throw ParseError("phi table must be an array of {y, phi} entries");
    std::vector<std::pair<Rational, Rational>> table;
    for (const auto& e : j)
        table.emplace_back(rational_from_json(e.at("y")), rational_from_json(e.at("phi")));
    return table;
}

// Smallest power-of-two ladder N_k = 2^{ck} whose summability prefix
// clears the gate; c runs over multiples of the delta denominator so the
// audited powers stay exact.
std::vector<Rational> default_kwapien_table(const Rational& p, const Rational& r, int depth) {
    const Rational delta = (Rational(1) + r - p) / (Rational(2) * (r + Rational(1)));
    const long base = delta.den().fits_slong_p() ? delta.den().get_si() : 0;
    if (base <= 0) throw Error("cannot derive a default ladder for these exponents");
    const RationalBracket gate = pow_bracket(Rational(2), -(p + Rational(1)));
    for (long t = 1; t <= 64; ++t) {
        const long c = base * t;
        RationalBracket prefix = RationalBracket::point(Rational(0));
        for (int k = 1; k <= depth; ++k)
            prefix = prefix + pow_bracket(Rational::pow2(mpz_class(c * k)), -delta);
        if (prefix.upper < gate.lower) {
            std::vector<Rational> table;
            for (int k = 1; k <= depth; ++k) table.push_back(Rational::pow2(mpz_class(c * k)));
            return table;
        }
    }
    throw Error("no power-of-two ladder satisfies the summability gate at this depth");
}

std::string csv_escape(const Rational& r) { return r.str(); }

int run(int argc, char** argv) {
    CLI::App app{"exact coboundary equation toolkit"};
    app.require_subcommand(1);

    std::string f_path, t_path, g_path, cert_path, out_path, phi_path;
    std::string schedule_csv, n_table_csv, thresholds_csv, format = "json";
    std::string delta_s = "1/4", m_s = "1", eta_s = "1/20", p_s = "2", q_s, r_s = "2", eps_s = "1/2";
    int stages = 3, n_param = 1, depth = 4, n_max = 50, i_max = 8, k_max = 50;

    auto* construct = app.add_subcommand("construct", "build a bounded transfer function");
    construct->add_option("--f", f_path, "step function JSON")->required();
    construct->add_option("--delta", delta_s, "sup-norm headroom (num/den)");
    construct->add_option("--stages", stages, "refinement stages");
    construct->add_option("--out", out_path, "output path (default stdout)");

    auto* lp = app.add_subcommand("construct-lp", "banded construction with the |g|^{p-1} report");
    lp->add_option("--f", f_path)->required();
    lp->add_option("--p", p_s, "integrability exponent (num/den)");
    lp->add_option("--stages", stages);
    lp->add_option("--schedule", schedule_csv, "comma-separated eps_i budgets");
    lp->add_option("--out", out_path);

    auto* verify_cmd = app.add_subcommand("verify", "check f = g - g.T exactly");
    verify_cmd->add_option("--f", f_path)->required();
    verify_cmd->add_option("--t", t_path, "transformation JSON");
    verify_cmd->add_option("--g", g_path, "transfer JSON");
    verify_cmd->add_option("--cert", cert_path, "certificate JSON carrying t and g");
    verify_cmd->add_option("--out", out_path);

    auto* schmidt = app.add_subcommand("schmidt", "orbit-sum tightness statistics");
    schmidt->add_option("--f", f_path)->required();
    schmidt->add_option("--t", t_path)->required();
    schmidt->add_option("--m", m_s, "threshold M (num/den)");
    schmidt->add_option("--n-max", n_max);
    schmidt->add_option("--thresholds", thresholds_csv, "extra thresholds for the report");
    schmidt->add_option("--format", format, "json or csv");
    schmidt->add_option("--out", out_path);

    auto* gp = app.add_subcommand("gp-audit", "membership scan for the heavy-tail class");
    gp->add_option("--f", f_path)->required();
    gp->add_option("--p", p_s);
    gp->add_option("--n", n_param);
    gp->add_option("--i-max", i_max);
    gp->add_option("--format", format);
    gp->add_option("--out", out_path);

    auto* gen_gp = app.add_subcommand("gen-gp", "densify a function into the heavy-tail class");
    gen_gp->add_option("--p", p_s);
    gen_gp->add_option("--n", n_param);
    gen_gp->add_option("--epsilon", eps_s);
    gen_gp->add_option("--f", f_path, "base function (default 0)");
    gen_gp->add_option("--out", out_path);

    auto* gen_moment = app.add_subcommand("gen-moment", "moment-breaking family");
    gen_moment->add_option("--depth", depth);
    gen_moment->add_option("--phi-table", phi_path, "JSON [{y, phi}] (default log2 ladder)");
    gen_moment->add_option("--out", out_path);

    auto* gen_kw = app.add_subcommand("gen-kwapien", "spiky integrability family");
    gen_kw->add_option("--p", p_s);
    gen_kw->add_option("--r", r_s);
    gen_kw->add_option("--depth", depth);
    gen_kw->add_option("--n-table", n_table_csv, "comma-separated N_k (default derived ladder)");
    gen_kw->add_option("--out", out_path);

    auto* solvable = app.add_subcommand("solvable", "balance verdict for measurable solvability");
    solvable->add_option("--f", f_path)->required();
    solvable->add_option("--out", out_path);

    auto* dn = app.add_subcommand("dn-scan", "escape-time scan over iterate counts");
    dn->add_option("--f", f_path)->required();
    dn->add_option("--t", t_path)->required();
    dn->add_option("--n", n_param);
    dn->add_option("--eta", eta_s);
    dn->add_option("--k-max", k_max);
    dn->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    if (construct->parsed()) {
        const auto sol =
            construct_bounded_solution(load_step(f_path), Rational::parse(delta_s), stages);
        emit_json(out_path, certificate_json(sol.certificate));
        return kExitOk;
    }

    if (lp->parsed()) {
        std::vector<Rational> schedule = parse_rational_list(schedule_csv);
        const auto sol =
            construct_lp_solution(load_step(f_path), Rational::parse(p_s), schedule, stages);
        Json bands = Json::array();
        for (const auto& band : sol.bands)
            bands.push_back({{"k", band.k},
                             {"l", band.l},
                             {"epsilon", band.epsilon.str()},
                             {"bound", band.bound.str()},
                             {"transfer_sup", band.transfer_sup.str()},
                             {"g_pow_lower", band.g_pow.lower.str()},
                             {"g_pow_upper", band.g_pow.upper.str()}});
        emit_json(out_path, Json{{"certificate", certificate_json(sol.certificate)},
                                 {"bands", std::move(bands)},
                                 {"j_star", sol.j_star},
                                 {"ell_j", sol.ell_j},
                                 {"head_upper", sol.head.upper.str()},
                                 {"lhs_upper", sol.lhs.upper.str()},
                                 {"rhs_lower", sol.rhs.lower.str()},
                                 {"chain_holds", sol.chain_holds}});
        return kExitOk;
    }

    if (verify_cmd->parsed()) {
        PiecewiseTranslation T;
        StepFunction g;
        if (!cert_path.empty()) {
            const Json cert = load_json_file(cert_path);
            T = translation_from_json(cert.at("transformation"));
            g = step_function_from_json(cert.at("transfer"));
        } else if (!t_path.empty() && !g_path.empty()) {
            T = translation_from_json(load_json_file(t_path));
            g = step_function_from_json(load_json_file(g_path));
        } else {
            throw Error("verify needs either --cert or both --t and --g");
        }
        const auto outcome = verify(load_step(f_path), T, g);
        if (outcome.exact()) {
            emit_json(out_path, certificate_json(outcome.certificate));
            return kExitOk;
        }
        emit_json(out_path, refutation_json(outcome));
        return kExitNegative;
    }

    if (schmidt->parsed()) {
        const auto f = load_step(f_path);
        const auto T = translation_from_json(load_json_file(t_path));
        const Rational M = Rational::parse(m_s);
        std::vector<Rational> thresholds{M};
        for (auto& extra : parse_rational_list(thresholds_csv)) thresholds.push_back(extra);

        std::vector<std::vector<Rational>> rows;  // per n: measures per threshold
        if (!T.is_full_bijection()) throw DomainMismatch("schmidt needs a bijection of [0,1)");
        StepFunction sum = f;
        PiecewiseTranslation power = T;
        Rational statistic(1);
        for (int n = 1; n <= n_max; ++n) {
            if (n > 1) {
                sum = sum + pullback(f, power);
                power = compose(T, power);
            }
            std::vector<Rational> row;
            for (const auto& thr : thresholds) row.push_back(measure_within(sum, thr));
            statistic = min(statistic, row.front());
            rows.push_back(std::move(row));
        }

        if (format == "csv") {
            std::string csv = "n,threshold,measure_le\n";
            for (int n = 1; n <= n_max; ++n)
                for (std::size_t t = 0; t < thresholds.size(); ++t)
                    csv += std::to_string(n) + "," + csv_escape(thresholds[t]) + "," +
                           csv_escape(rows[static_cast<std::size_t>(n - 1)][t]) + "\n";
            emit(out_path, csv);
        } else {
            Json jrows = Json::array();
            for (int n = 1; n <= n_max; ++n)
                for (std::size_t t = 0; t < thresholds.size(); ++t)
                    jrows.push_back({{"n", n},
                                     {"threshold", thresholds[t].str()},
                                     {"measure_le", rows[static_cast<std::size_t>(n - 1)][t].str()}});
            emit_json(out_path, Json{{"statistic", statistic.str()}, {"rows", std::move(jrows)}});
        }
        return kExitOk;
    }

    if (gp->parsed()) {
        const auto verdict = gp_membership(load_step(f_path), Rational::parse(p_s), n_param,
                                           GrowthSequence::factorial_pow2(), i_max);
        if (format == "csv") {
            std::string csv = "i,v_measure,v_threshold,u_measure,u_threshold,pass\n";
            for (const auto& row : verdict.rows)
                csv += std::to_string(row.i) + "," + csv_escape(row.v_measure) + "," +
                       csv_escape(row.v_threshold.upper) + "," + csv_escape(row.u_measure) + "," +
                       csv_escape(row.u_threshold.lower) + "," + (row.pass ? "1" : "0") + "\n";
            emit(out_path, csv);
        } else {
            Json jrows = Json::array();
            for (const auto& row : verdict.rows)
                jrows.push_back({{"i", row.i},
                                 {"v_measure", row.v_measure.str()},
                                 {"v_threshold", row.v_threshold.upper.str()},
                                 {"u_measure", row.u_measure.str()},
                                 {"u_threshold", row.u_threshold.lower.str()},
                                 {"pass", row.pass}});
            emit_json(out_path, Json{{"member", verdict.member},
                                     {"witness", verdict.witness},
                                     {"witness_at_boundary", verdict.witness_at_boundary},
                                     {"rows", std::move(jrows)}});
        }
        return verdict.member ? kExitOk : kExitNegative;
    }

    if (gen_gp->parsed()) {
        const StepFunction base = f_path.empty() ? StepFunction::zero() : load_step(f_path);
        const auto spec = generic_gp_generate(base, Rational::parse(p_s), n_param,
                                              Rational::parse(eps_s),
                                              GrowthSequence::factorial_pow2());
        emit_json(out_path, counterexample_json(spec));
        return spec.all_pass() ? kExitOk : kExitNegative;
    }

    if (gen_moment->parsed()) {
        const auto table = phi_path.empty() ? default_phi_table() : load_phi_table(phi_path);
        const auto spec = not_a_moment_generate(table, depth);
        emit_json(out_path, counterexample_json(spec));
        return spec.all_pass() ? kExitOk : kExitNegative;
    }

    if (gen_kw->parsed()) {
        const Rational p = Rational::parse(p_s);
        const Rational r = Rational::parse(r_s);
        const auto table = n_table_csv.empty() ? default_kwapien_table(p, r, depth)
                                               : parse_rational_list(n_table_csv);
        const auto spec = kwapien_generate(p, r, table, depth);
        emit_json(out_path, counterexample_json(spec));
        return spec.all_pass() ? kExitOk : kExitNegative;
    }

    if (solvable->parsed()) {
        const auto verdict = check_solvability(load_step(f_path));
        const bool ok = verdict == Solvability::BalancedFinite;
        emit_json(out_path, Json{{"verdict", ok ? "BalancedFinite" : "Unbalanced"}});
        return ok ? kExitOk : kExitNegative;
    }

    if (dn->parsed()) {
        const auto res = dn_membership(load_step(f_path), translation_from_json(load_json_file(t_path)),
                                       n_param, Rational::parse(eta_s), k_max);
        emit_json(out_path, Json{{"found", res.found}, {"witness_k", res.witness_k}});
        return res.found ? kExitOk : kExitNegative;
    }

    return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError&) {
        return kExitError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitError;
    }
}
