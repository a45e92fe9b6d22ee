// Command-line front end: class groups, canonical Hecke characters, CM newform
// coefficients, reference-table verification, and exponent-bounded field search.
//
// Exit codes: 0 success, 1 verification mismatch, 2 bad input (including a
// non-fundamental discriminant), 3 class-group exponent does not divide the
// requested infinity-type.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cmforms/classgroup.hpp"
#include "cmforms/fieldsearch.hpp"
#include "cmforms/heckechar.hpp"
#include "cmforms/newform.hpp"
#include "cmforms/tables.hpp"

namespace {

using cmforms::arith::i64;
using cmforms::quadfield::QuadField;

// "C1" for the trivial group, else invariant factors grouped with exponents,
// e.g. {3} -> "C3", {2,2,4} -> "C2^2xC4".
std::string group_notation(const std::vector<i64>& factors) {
    if (factors.empty()) return "C1";
    std::string out;
    std::size_t i = 0;
    while (i < factors.size()) {
        std::size_t j = i;
        while (j < factors.size() && factors[j] == factors[i]) ++j;
        if (!out.empty()) out += "x";
        out += "C" + std::to_string(factors[i]);
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

int run_classgroup(i64 disc) {
    const QuadField K(disc);
    const auto G = cmforms::classgroup::build_group(K);
    std::vector<i64> factors = G.factors;
    std::sort(factors.begin(), factors.end());
    std::cout << "D=" << -disc << " h=" << G.h() << ' ' << group_notation(factors)
              << " e=" << G.exponent() << '\n';
    for (const auto& f : cmforms::classgroup::reduced_forms(K)) {
        std::cout << '(' << f.a << ", " << f.b << ", " << f.c << ")\n";
    }
    return 0;
}

std::vector<int> parse_signs(const std::string& text) {
    std::vector<int> signs;
    signs.reserve(text.size());
    for (const char c : text) {
        if (c == '+') {
            signs.push_back(1);
        } else if (c == '-') {
            signs.push_back(-1);
        } else {
            throw std::domain_error(std::string("bad sign character '") + c +
                                    "': expected '+' or '-'");
        }
    }
    return signs;
}

// Calibration targets for a table row: every listed coefficient that is
// nonzero.  A sign flip never creates or destroys a zero coefficient, so a
// sign vector matching all nonzero entries matches the row everywhere signs
// have any effect; the remaining (zero) entries are checked separately.
std::vector<std::pair<i64, i64>> nonzero_targets(const cmforms::tables::TableRow& row) {
    std::vector<std::pair<i64, i64>> targets;
    for (const auto& [p, ap] : row.coeffs) {
        if (ap != 0) targets.emplace_back(p, ap);
    }
    if (targets.empty()) targets = row.coeffs;
    return targets;
}

int run_newform(i64 disc, i64 weight, bool have_signs, const std::string& signs_text,
                bool calibrate, i64 nmax, bool all) {
    if (nmax < 1) throw std::domain_error("--nmax must be at least 1");
    const QuadField K(disc);
    const i64 l = weight - 1;

    std::vector<int> signs;
    if (calibrate) {
        const auto& table = cmforms::tables::embedded_table(weight);
        const cmforms::tables::TableRow* row = nullptr;
        for (const auto& r : table) {
            if (r.delta == disc) {
                row = &r;
                break;
            }
        }
        if (row == nullptr) {
            throw std::domain_error("no reference row for discriminant -" +
                                    std::to_string(disc) + " at weight " +
                                    std::to_string(weight));
        }
        signs = cmforms::newform::calibrate_signs(K, l, nonzero_targets(*row)).signs;
    } else if (have_signs) {
        signs = parse_signs(signs_text);
    }

    const auto psi = cmforms::heckechar::build_canonical(K, l, signs);
    const auto nf = cmforms::newform::q_expansion(psi, nmax);
    std::cout << "N=" << nf.level << " k=" << nf.weight << " eps="
              << (nf.nebentypus.trivial ? "triv" : "chiK") << " CM=" << nf.cm_disc
              << '\n';
    if (all) {
        for (i64 n = 1; n <= nmax; ++n) {
            std::cout << n << '\t' << nf.coeffs[static_cast<std::size_t>(n)] << '\n';
        }
    } else {
        for (i64 p = 2; p <= nmax; ++p) {
            if (!cmforms::arith::is_prime(p)) continue;
            std::cout << p << '\t' << nf.coeffs[static_cast<std::size_t>(p)] << '\n';
        }
    }
    return 0;
}

// Recomputes one table row from scratch and reports the first discrepancy.
std::string verify_row(const cmforms::tables::TableRow& row, i64 weight, bool* pass) {
    *pass = false;
    std::ostringstream out;
    out << "FAIL N=" << row.level;
    try {
        const QuadField K(row.delta);
        const auto cal =
            cmforms::newform::calibrate_signs(K, weight - 1, nonzero_targets(row));
        const auto psi = cmforms::heckechar::build_canonical(K, weight - 1, cal.signs);
        const auto [level, neb] = cmforms::newform::level_nebentypus(psi);
        if (level != row.level) {
            out << " level expected=" << row.level << " got=" << level;
            return out.str();
        }
        if (neb.trivial != (weight % 2 == 0)) {
            out << " nebentypus";
            return out.str();
        }
        for (const auto& [p, want] : row.coeffs) {
            const i64 got = cmforms::newform::coefficient_ap(psi, p);
            if (got != want) {
                out << " p=" << p << " expected=" << want << " got=" << got;
                return out.str();
            }
        }
    } catch (const cmforms::no_match&) {
        out << " no sign vector matches the listed coefficients";
        return out.str();
    } catch (const std::exception& e) {
        out << ' ' << e.what();
        return out.str();
    }
    *pass = true;
    return "PASS N=" + std::to_string(row.level);
}

int run_verify(const std::string& table, const std::string& file, i64 jobs) {
    i64 weight = 0;
    if (table == "wt3") {
        weight = 3;
    } else if (table == "wt4") {
        weight = 4;
    } else {
        throw std::domain_error("--table must be wt3 or wt4");
    }
    if (jobs < 1) throw std::domain_error("--jobs must be at least 1");

    std::vector<cmforms::tables::TableRow> rows;
    if (file.empty()) {
        rows = cmforms::tables::embedded_table(weight);
    } else {
        std::ifstream in(file);
        if (!in) throw std::domain_error("cannot open table file: " + file);
        std::ostringstream text;
        text << in.rdbuf();
        rows = cmforms::tables::parse_table(text.str());
    }

    std::vector<std::string> lines(rows.size());
    std::vector<char> pass(rows.size(), 0);
    const auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < rows.size(); i += stride) {
            bool ok = false;
            lines[i] = verify_row(rows[i], weight, &ok);
            pass[i] = ok ? 1 : 0;
        }
    };
    const auto nworkers =
        static_cast<std::size_t>(std::min<i64>(jobs, static_cast<i64>(rows.size())));
    if (nworkers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(nworkers);
        for (std::size_t j = 0; j < nworkers; ++j) {
            workers.emplace_back(work, j, nworkers);
        }
        for (auto& w : workers) w.join();
    }

    std::size_t npass = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::cout << lines[i] << '\n';
        if (pass[i]) ++npass;
    }
    std::cout << npass << '/' << rows.size() << " PASS\n";
    return npass == rows.size() ? 0 : 1;
}

int run_search(i64 l, i64 bound, i64 jobs) {
    if (l < 1) throw std::domain_error("--exponent-divides must be at least 1");
    if (bound < 3) throw std::domain_error("--max-disc must be at least 3");
    if (jobs < 1) throw std::domain_error("--jobs must be at least 1");
    for (const i64 delta : cmforms::fieldsearch::search(l, bound, static_cast<int>(jobs))) {
        std::cout << delta << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imaginary quadratic class groups and CM newforms with rational coefficients"};
    app.require_subcommand(0, 1);

    auto* cg = app.add_subcommand(
        "classgroup", "Class group of Q(sqrt(-D)) for a fundamental discriminant -D");
    i64 cg_disc = 0;
    cg->add_option("--disc", cg_disc, "Positive D with -D a fundamental discriminant")
        ->required();

    auto* nf = app.add_subcommand(
        "newform", "q-expansion of the canonical CM newform attached to Q(sqrt(-D))");
    i64 nf_disc = 0;
    i64 nf_weight = 0;
    i64 nf_nmax = 113;
    std::string nf_signs;
    bool nf_all = false;
    bool nf_calibrate = false;
    nf->add_option("--disc", nf_disc, "Positive D with -D a fundamental discriminant")
        ->required();
    nf->add_option("--weight", nf_weight, "Weight k; the infinity-type is k-1")
        ->required();
    auto* signs_opt = nf->add_option(
        "--signs", nf_signs,
        "Sign choices, one '+' or '-' per even-order generator (default all '+')");
    nf->add_option("--nmax", nf_nmax, "Largest index to print (default 113)");
    nf->add_flag("--all", nf_all, "Print a_n for every n up to nmax, not only primes");
    auto* cal_opt = nf->add_flag(
        "--calibrate", nf_calibrate,
        "Choose signs so that the embedded reference row for this field is matched");
    signs_opt->excludes(cal_opt);
    cal_opt->excludes(signs_opt);

    auto* vf = app.add_subcommand(
        "verify", "Recompute a coefficient table from scratch and compare");
    std::string vf_table;
    std::string vf_file;
    i64 vf_jobs = 1;
    vf->add_option("--table", vf_table, "Which reference table: wt3 or wt4")->required();
    vf->add_option("--table-file", vf_file,
                   "Read rows from this file instead of the embedded table");
    vf->add_option("--jobs", vf_jobs, "Number of worker threads (default 1)");

    auto* sc = app.add_subcommand(
        "search", "All fundamental -D (3 <= D <= bound) with class-group exponent dividing l");
    i64 sc_l = 0;
    i64 sc_max = 0;
    i64 sc_jobs = 1;
    sc->add_option("--exponent-divides", sc_l, "Divisor bound l on the class-group exponent")
        ->required();
    sc->add_option("--max-disc", sc_max, "Largest D to scan")->required();
    sc->add_option("--jobs", sc_jobs, "Number of worker threads (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cg->parsed()) return run_classgroup(cg_disc);
        if (nf->parsed()) {
            return run_newform(nf_disc, nf_weight, signs_opt->count() > 0, nf_signs,
                               nf_calibrate, nf_nmax, nf_all);
        }
        if (vf->parsed()) return run_verify(vf_table, vf_file, vf_jobs);
        if (sc->parsed()) return run_search(sc_l, sc_max, sc_jobs);
        std::cerr << app.help();
        return 2;
    } catch (const cmforms::exponent_mismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
