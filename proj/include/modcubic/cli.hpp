#pragma once

// Command-line front door. Every library operation is reachable through a
// subcommand, each with human, json and csv output. Exit codes: 0 success,
// 1 usage error, 2 invalid mathematical input (composite modulus, a = 0,
// u = 0), 3 I/O error. Errors go to the error stream only.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modcubic/charsum.hpp"
#include "modcubic/cubic.hpp"
#include "modcubic/modarith.hpp"
#include "modcubic/prng.hpp"
#include "modcubic/scan.hpp"

namespace modcubic::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kMathDomain = 2;
inline constexpr int kIo = 3;

namespace detail {

enum class Format { human, json, csv };

inline Format parse_format(const std::string& name) {
    if (name == "json") return Format::json;
    if (name == "csv") return Format::csv;
    return Format::human;
}

inline std::string scalar_text(const nlohmann::ordered_json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

// Flat documents render uniformly: json as-is, csv as header plus one row,
// human as "key: value" lines.
inline void emit_flat(std::ostream& out, Format fmt,
                      const nlohmann::ordered_json& doc) {
    switch (fmt) {
        case Format::json:
            out << doc.dump(2) << '\n';
            return;
        case Format::csv: {
            std::string header, row;
            for (auto it = doc.begin(); it != doc.end(); ++it) {
                if (!header.empty()) {
                    header += ',';
                    row += ',';
                }
                header += it.key();
                row += scalar_text(it.value());
            }
            out << header << '\n' << row << '\n';
            return;
        }
        case Format::human:
            for (auto it = doc.begin(); it != doc.end(); ++it)
                out << it.key() << ": " << scalar_text(it.value()) << '\n';
            return;
    }
}

inline void witness_fields(nlohmann::ordered_json& doc, const BoxWitness& w) {
    doc["u"] = w.u;
    doc["v_signed"] = w.v_signed;
    doc["x1"] = w.p1.x;
    doc["y1"] = w.p1.y;
    doc["x2"] = w.p2.x;
    doc["y2"] = w.p2.y;
    doc["anchor_x"] = w.anchor_x;
    doc["anchor_y"] = w.anchor_y;
    doc["side"] = w.side;
}

inline void print_witness(std::ostream& out, const BoxWitness& w) {
    out << "points (" << w.p1.x << ", " << w.p1.y << ") and (" << w.p2.x
        << ", " << w.p2.y << ")\n"
        << "offsets u=" << w.u << " v=" << w.v_signed << '\n'
        << "box anchor (" << w.anchor_x << ", " << w.anchor_y << ") side "
        << w.side << '\n';
}

// Numeric flags are decimal only; this turns away the 0x/0b prefixes that
// the stock integer parser would accept.
inline const CLI::Validator decimal_only{
    [](std::string& s) {
        std::size_t i = s.size() > 1 && (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return std::string("not a decimal integer: ") + s;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                return std::string("not a decimal integer: ") + s;
        return std::string();
    },
    "DECIMAL"};

inline unsigned default_threads() {
    if (const char* env = std::getenv("MODCUBIC_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"modcubic: exact detection of two points of y = a x^3 + c x "
                 "(mod p) inside small boxes, plus a character-sum lab"};
    app.require_subcommand(1);
    std::string format_name = "human";
    app.add_option("--format", format_name, "output format")
        ->check(CLI::IsMember({"human", "json", "csv"}))
        ->capture_default_str();

    // normalize
    auto* nrm = app.add_subcommand(
        "normalize", "depress a general cubic a x^3 + b x^2 + c x + d");
    struct {
        std::uint64_t p = 0;
        std::int64_t a = 1, b = 0, c = 0, d = 0;
    } nrm_opt;
    nrm->add_option("--p", nrm_opt.p, "prime modulus")->required();
    nrm->add_option("--a", nrm_opt.a, "cubic coefficient")->required();
    nrm->add_option("--b", nrm_opt.b, "quadratic coefficient");
    nrm->add_option("--c", nrm_opt.c, "linear coefficient");
    nrm->add_option("--d", nrm_opt.d, "constant coefficient");

    // condition
    auto* cnd = app.add_subcommand(
        "condition", "the four-symbol solvability condition at offset (u, v)");
    struct {
        std::uint64_t p = 0;
        std::int64_t a = 1, c = 0, u = 1, v = 0;
    } cnd_opt;
    cnd->add_option("--p", cnd_opt.p, "prime modulus")->required();
    cnd->add_option("--a", cnd_opt.a, "cubic coefficient")->required();
    cnd->add_option("--c", cnd_opt.c, "linear coefficient");
    cnd->add_option("--u", cnd_opt.u, "x offset")->required();
    cnd->add_option("--v", cnd_opt.v, "y offset (negative values reduce mod p)")
        ->required();

    // detect
    auto* det = app.add_subcommand(
        "detect", "find two curve points inside some H x H box");
    struct {
        std::uint64_t p = 0, side = 0;
        std::int64_t a = 1, c = 0;
    } det_opt;
    det->add_option("--p", det_opt.p, "prime modulus")->required();
    det->add_option("--a", det_opt.a, "cubic coefficient")->required();
    det->add_option("--c", det_opt.c, "linear coefficient");
    det->add_option("--H", det_opt.side, "box side")->required();

    // minbox
    auto* mbx = app.add_subcommand(
        "minbox", "smallest box side holding two curve points");
    struct {
        std::uint64_t p = 0;
        std::int64_t a = 1, c = 0;
        bool brute = false;
    } mbx_opt;
    mbx->add_option("--p", mbx_opt.p, "prime modulus")->required();
    mbx->add_option("--a", mbx_opt.a, "cubic coefficient")->required();
    mbx->add_option("--c", mbx_opt.c, "linear coefficient");
    mbx->add_flag("--brute", mbx_opt.brute,
                  "use the quadratic pair scan instead of the criterion");

    // charsum
    auto* chs = app.add_subcommand(
        "charsum", "moment report for a spaced family of partial sums");
    struct {
        std::uint64_t p = 0;
        std::optional<std::uint64_t> window;
        unsigned r = 3;
        double eps = 0.1;
        std::string family = "random";
        std::optional<std::uint64_t> count;
        std::uint64_t seed = 1;
        std::int64_t a = 1, c = 0;
    } chs_opt;
    chs->add_option("--p", chs_opt.p, "prime modulus")->required();
    chs->add_option("--H", chs_opt.window,
                    "partial-sum window (default: ceil(p^(1/3)))");
    chs->add_option("--r", chs_opt.r, "moment order (uses the 2r-th power)")
        ->capture_default_str();
    chs->add_option("--eps", chs_opt.eps, "epsilon in the bound exponent")
        ->capture_default_str();
    chs->add_option("--family", chs_opt.family, "family kind")
        ->check(CLI::IsMember({"random", "curve"}))
        ->capture_default_str();
    chs->add_option("--count", chs_opt.count,
                    "candidate points before spacing (default: p/(2H), "
                    "capped at 500)");
    chs->add_option("--seed", chs_opt.seed, "stream seed for random families")
        ->capture_default_str();
    chs->add_option("--a", chs_opt.a, "cubic coefficient for curve families")
        ->capture_default_str();
    chs->add_option("--c", chs_opt.c, "linear coefficient for curve families")
        ->capture_default_str();

    // pv
    auto* pv = app.add_subcommand(
        "pv", "largest interval character sum against the sqrt(p) ln p budget");
    struct {
        std::uint64_t p = 0;
    } pv_opt;
    pv->add_option("--p", pv_opt.p, "prime modulus")->required();

    // scan
    auto* scn = app.add_subcommand(
        "scan", "sweep primes and random curves, write records, fit the "
                "growth exponent");
    ScanConfig scn_cfg;
    bool scn_moments = false;
    std::optional<unsigned> scn_threads;
    scn->add_option("--pmin", scn_cfg.prime_lo, "lower end of the prime range")
        ->capture_default_str();
    scn->add_option("--pmax", scn_cfg.prime_hi, "upper end of the prime range")
        ->capture_default_str();
    scn->add_option("--per-decade", scn_cfg.primes_per_decade,
                    "primes sampled per factor of ten")
        ->capture_default_str();
    scn->add_option("--primes", scn_cfg.explicit_primes,
                    "explicit prime list (overrides the range)")
        ->delimiter(',');
    scn->add_option("--curves", scn_cfg.curves_per_prime,
                    "random curves per prime")
        ->capture_default_str();
    scn->add_option("--seed", scn_cfg.seed, "stream seed")
        ->capture_default_str();
    scn->add_option("--threads", scn_threads,
                    "worker count (default: MODCUBIC_THREADS, else 1)");
    scn->add_option("--out", scn_cfg.out_path,
                    "records file; .json extension selects JSON, anything "
                    "else CSV")
        ->required();
    scn->add_option("--a", scn_cfg.fixed_a, "pin the cubic coefficient");
    scn->add_option("--c", scn_cfg.fixed_c, "pin the linear coefficient");
    scn->add_flag("--moments", scn_moments,
                  "emit moment reports instead of minimal box sides");
    scn->add_option("--r-values", scn_cfg.r_values,
                    "moment orders for --moments")
        ->delimiter(',');
    scn->add_option("--eps", scn_cfg.epsilon, "epsilon for --moments")
        ->capture_default_str();
    scn->add_option("--H", scn_cfg.moment_window,
                    "moment window override for --moments");
    scn->add_flag("--timing", scn_cfg.record_timing,
                  "record wall-clock micros per record (breaks byte-level "
                  "reproducibility)");

    // fit
    auto* fit = app.add_subcommand(
        "fit", "fit the growth exponent from a records file");
    struct {
        std::string in_path;
    } fit_opt;
    fit->add_option("--in", fit_opt.in_path, "records file (csv or json)")
        ->required();

    for (CLI::App* sub : app.get_subcommands(nullptr)) {
        sub->fallthrough();
        for (CLI::Option* opt : sub->get_options()) {
            const std::string type = opt->get_type_name();
            if (type.find("INT") != std::string::npos)
                opt->check(detail::decimal_only);
        }
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
        const detail::Format fmt = detail::parse_format(format_name);

        if (*nrm) {
            const Modulus m(nrm_opt.p);
            const GeneralCubic g(m, m.reduce_signed(nrm_opt.a),
                                 m.reduce_signed(nrm_opt.b),
                                 m.reduce_signed(nrm_opt.c),
                                 m.reduce_signed(nrm_opt.d));
            const NormalizedCubic n = normalize(g);
            nlohmann::ordered_json doc{{"p", nrm_opt.p},
                                       {"a", g.a()},
                                       {"b", g.b()},
                                       {"c", g.c()},
                                       {"d", g.d()},
                                       {"reduced_a", n.curve.a()},
                                       {"reduced_c", n.curve.c()},
                                       {"dx", n.shift.dx},
                                       {"dy", n.shift.dy}};
            detail::emit_flat(out, fmt, doc);
            return kOk;
        }

        if (*cnd) {
            const Modulus m(cnd_opt.p);
            const ReducedCubic cur(m, m.reduce_signed(cnd_opt.a),
                                   m.reduce_signed(cnd_opt.c));
            const std::uint64_t u = m.reduce_signed(cnd_opt.u);
            const std::uint64_t v = m.reduce_signed(cnd_opt.v);
            const ConditionFactors f = pair_condition_factors(cur, u, v);
            const std::uint64_t rhs = difference_rhs(cur, u, v);
            nlohmann::ordered_json doc{
                {"p", cnd_opt.p},
                {"a", cur.a()},
                {"c", cur.c()},
                {"u", u},
                {"v", v},
                {"symbol_minus3", f.minus_three},
                {"symbol_a", f.a},
                {"symbol_u", f.u},
                {"symbol_poly", f.poly},
                {"poly", f.poly_value},
                {"condition", f.product()},
                {"difference_rhs", rhs},
                {"legendre_rhs", legendre(static_cast<std::int64_t>(rhs), m)},
                {"x_solutions", count_x_solutions(cur, u, v)}};
            if (fmt == detail::Format::human) {
                out << "(-3/p) = " << f.minus_three << '\n'
                    << "(a/p) = " << f.a << '\n'
                    << "(u/p) = " << f.u << '\n'
                    << "((a u^3 + 4 c u - 4 v)/p) = " << f.poly
                    << "   [a u^3 + 4 c u - 4 v = " << f.poly_value << "]\n"
                    << "condition = " << f.product() << '\n'
                    << "difference_rhs = " << rhs << " with symbol "
                    << doc["legendre_rhs"].get<int>() << '\n'
                    << "x solutions: " << doc["x_solutions"].get<int>()
                    << '\n';
            } else {
                detail::emit_flat(out, fmt, doc);
            }
            return kOk;
        }

        if (*det) {
            const Modulus m(det_opt.p);
            const ReducedCubic cur(m, m.reduce_signed(det_opt.a),
                                   m.reduce_signed(det_opt.c));
            const auto witness = detect_in_box(cur, det_opt.side);
            nlohmann::ordered_json doc{{"p", det_opt.p},
                                       {"a", cur.a()},
                                       {"c", cur.c()},
                                       {"H", det_opt.side},
                                       {"found", witness.has_value()}};
            if (witness) detail::witness_fields(doc, *witness);
            if (fmt == detail::Format::human) {
                if (!witness)
                    out << "none\n";
                else
                    detail::print_witness(out, *witness);
            } else {
                detail::emit_flat(out, fmt, doc);
            }
            return kOk;
        }

        if (*mbx) {
            const Modulus m(mbx_opt.p);
            const ReducedCubic cur(m, m.reduce_signed(mbx_opt.a),
                                   m.reduce_signed(mbx_opt.c));
            std::uint64_t h_min = 0;
            BoxWitness witness;
            if (mbx_opt.brute) {
                h_min = brute_min_box_side(cur);
                witness = *brute_detect_in_box(cur, h_min);
            } else {
                const MinBoxResult res = min_box_side(cur);
                h_min = res.h_min;
                witness = res.witness;
            }
            nlohmann::ordered_json doc{
                {"p", mbx_opt.p},
                {"a", cur.a()},
                {"c", cur.c()},
                {"method", mbx_opt.brute ? "brute" : "criterion"},
                {"h_min", h_min}};
            detail::witness_fields(doc, witness);
            if (fmt == detail::Format::human) {
                out << "h_min: " << h_min << '\n';
                detail::print_witness(out, witness);
            } else {
                detail::emit_flat(out, fmt, doc);
            }
            return kOk;
        }

        if (*chs) {
            const Modulus m(chs_opt.p);
            const std::uint64_t window =
                chs_opt.window ? *chs_opt.window : ceil_cbrt(chs_opt.p);
            const std::uint64_t count =
                chs_opt.count ? *chs_opt.count
                              : std::clamp<std::uint64_t>(
                                    chs_opt.p / (2 * std::max<std::uint64_t>(
                                                         window, 1)),
                                    1, 500);
            std::vector<std::uint64_t> values;
            if (chs_opt.family == "random") {
                SplitMix64 rng = family_stream(chs_opt.seed, chs_opt.p, 0);
                for (std::uint64_t i = 0; i < count; ++i)
                    values.push_back(rng.next() % chs_opt.p);
            } else {
                const ReducedCubic cur(m, m.reduce_signed(chs_opt.a),
                                       m.reduce_signed(chs_opt.c));
                for (std::uint64_t up = 1; up <= count; ++up)
                    values.push_back(cur.eval(up));
            }
            const SpacedFamily fam = greedy_spaced_family(m, values, window);
            const MomentReport rep =
                make_moment_report(fam, chs_opt.r, chs_opt.eps, chs_opt.family);
            detail::emit_flat(out, fmt, ::modcubic::detail::moment_json(rep));
            return kOk;
        }

        if (*pv) {
            const Modulus m(pv_opt.p);
            const std::uint64_t maxima = polya_vinogradov_max(m);
            const double budget = std::sqrt(static_cast<double>(pv_opt.p)) *
                                  std::log(static_cast<double>(pv_opt.p));
            nlohmann::ordered_json doc{
                {"p", pv_opt.p},
                {"max_abs_partial_sum", maxima},
                {"budget", budget},
                {"within_budget", static_cast<double>(maxima) <= budget}};
            detail::emit_flat(out, fmt, doc);
            return kOk;
        }

        if (*scn) {
            scn_cfg.threads = scn_threads ? *scn_threads
                                          : detail::default_threads();
            const RecordFormat file_fmt =
                ::modcubic::detail::format_for_path(scn_cfg.out_path);
            if (scn_moments) {
                const std::vector<MomentReport> reports =
                    run_moment_scan(scn_cfg);
                write_moment_reports(reports, file_fmt, scn_cfg.out_path);
                double max_ratio = 0.0;
                for (const MomentReport& r : reports)
                    max_ratio = std::max(max_ratio, r.ratio);
                nlohmann::ordered_json doc{{"reports", reports.size()},
                                           {"out", scn_cfg.out_path},
                                           {"max_ratio", max_ratio}};
                detail::emit_flat(out, fmt, doc);
                return kOk;
            }
            const MinboxScan scan = run_minbox_scan(scn_cfg);
            write_records(scan.records, file_fmt, scn_cfg.out_path);
            nlohmann::ordered_json summary = nlohmann::ordered_json::array();
            for (const PrimeSummary& s : scan.summary)
                summary.push_back({{"p", s.p},
                                   {"curves", s.curves},
                                   {"h_worst", s.h_worst},
                                   {"h_mean", s.h_mean}});
            nlohmann::ordered_json doc{{"records", scan.records.size()},
                                       {"out", scn_cfg.out_path},
                                       {"summary", summary}};
            if (scan.summary.size() >= 2) {
                const FitResult f = fit_exponent_of_summary(scan.summary);
                doc["fit"] = {{"slope", f.slope},
                              {"intercept", f.intercept},
                              {"r_squared", f.r_squared},
                              {"n_points", f.n_points}};
            }
            if (fmt == detail::Format::json) {
                out << doc.dump(2) << '\n';
            } else if (fmt == detail::Format::csv) {
                out << "p,curves,h_worst,h_mean\n";
                for (const PrimeSummary& s : scan.summary)
                    out << s.p << ',' << s.curves << ',' << s.h_worst << ','
                        << s.h_mean << '\n';
            } else {
                out << "wrote " << scan.records.size() << " records to "
                    << scn_cfg.out_path << '\n';
                for (const PrimeSummary& s : scan.summary)
                    out << "p=" << s.p << " curves=" << s.curves
                        << " h_worst=" << s.h_worst << " h_mean=" << s.h_mean
                        << '\n';
                if (doc.contains("fit"))
                    out << "fit: slope=" << doc["fit"]["slope"].get<double>()
                        << " intercept="
                        << doc["fit"]["intercept"].get<double>()
                        << " r_squared="
                        << doc["fit"]["r_squared"].get<double>()
                        << " n_points="
                        << doc["fit"]["n_points"].get<std::size_t>() << '\n';
            }
            return kOk;
        }

        if (*fit) {
            const std::vector<ScanRecord> records =
                read_records(fit_opt.in_path);
            std::map<std::uint64_t, std::uint64_t> worst;
            for (const ScanRecord& r : records)
                worst[r.p] = std::max(worst[r.p], r.h_min);
            std::vector<std::pair<double, double>> pts;
            for (const auto& [p, h] : worst)
                pts.emplace_back(static_cast<double>(p),
                                 static_cast<double>(h));
            const FitResult f = fit_exponent(pts);
            nlohmann::ordered_json doc{{"in", fit_opt.in_path},
                                       {"n_records", records.size()},
                                       {"slope", f.slope},
                                       {"intercept", f.intercept},
                                       {"r_squared", f.r_squared},
                                       {"n_points", f.n_points}};
            detail::emit_flat(out, fmt, doc);
            return kOk;
        }

        err << "error: no subcommand selected\n";
        return kUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kMathDomain;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace modcubic::cli
