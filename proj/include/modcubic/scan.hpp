#pragma once

// Experiment orchestration: sweep primes and random curves, record minimal
// box sides with their witnesses, build moment reports, fit the growth
// exponent. Output is canonical: records are sorted by (p, a, c) before
// writing, so the bytes do not depend on the worker count. Timing is only
// recorded when asked for, since wall-clock values would break that
// determinism.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "modcubic/charsum.hpp"
#include "modcubic/cubic.hpp"
#include "modcubic/modarith.hpp"
#include "modcubic/prng.hpp"

namespace modcubic {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScanConfig {
    std::uint64_t prime_lo = 1000;
    std::uint64_t prime_hi = 1000000;
    unsigned primes_per_decade = 14;
    std::vector<std::uint64_t> explicit_primes;  // overrides the range
    unsigned curves_per_prime = 50;
    std::optional<std::uint64_t> fixed_a;
    std::optional<std::uint64_t> fixed_c;
    std::uint64_t seed = 1;
    std::vector<unsigned> r_values = {1, 2, 3};
    double epsilon = 0.1;
    std::optional<std::uint64_t> moment_window;  // default: ceil(p^(1/3))
    unsigned threads = 1;
    std::string out_path;  // empty: no file written
    bool record_timing = false;
};

struct ScanRecord {
    std::uint64_t p = 0, a = 0, c = 0, h_min = 0;
    std::uint64_t u = 0;
    std::int64_t v_signed = 0;
    std::uint64_t x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    std::uint64_t anchor_x = 0, anchor_y = 0;
    std::uint64_t micros = 0;
};

struct PrimeSummary {
    std::uint64_t p = 0;
    unsigned curves = 0;
    std::uint64_t h_worst = 0;
    double h_mean = 0.0;
};

struct MinboxScan {
    std::vector<ScanRecord> records;
    std::vector<PrimeSummary> summary;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

inline std::uint64_t next_prime(std::uint64_t n) {
    if (n < 2) return 2;
    while (!is_prime(n)) ++n;
    return n;
}

// Log-uniform prime ladder: per_decade targets per factor of ten, each
// rounded up to the next prime, deduped.
inline std::vector<std::uint64_t> log_spaced_primes(std::uint64_t lo,
                                                    std::uint64_t hi,
                                                    unsigned per_decade) {
    if (lo < 5 || lo > hi || per_decade < 1)
        throw std::invalid_argument("log_spaced_primes: bad range");
    std::vector<std::uint64_t> primes;
    const double lg = std::log10(static_cast<double>(lo));
    for (unsigned k = 0;; ++k) {
        const double target = std::pow(10.0, lg + static_cast<double>(k) /
                                                     per_decade);
        if (target > static_cast<double>(hi) + 0.5) break;
        const std::uint64_t p =
            next_prime(static_cast<std::uint64_t>(std::ceil(target)));
        if (p <= hi && (primes.empty() || p != primes.back()))
            primes.push_back(p);
    }
    return primes;
}

inline std::uint64_t ceil_cbrt(std::uint64_t n) {
    auto h = static_cast<std::uint64_t>(std::ceil(std::cbrt(
        static_cast<double>(n))));
    while (h > 1 && (h - 1) * (h - 1) * (h - 1) >= n) --h;
    while (h * h * h < n) ++h;
    return h;
}

namespace detail {

inline void validate_config(const ScanConfig& cfg) {
    if (cfg.explicit_primes.empty()) {
        if (cfg.prime_lo < 5)
            throw std::invalid_argument("scan config: prime range must start at 5 or above");
        if (cfg.prime_hi >= Modulus::kLimit)
            throw std::invalid_argument("scan config: prime range must stay below 2^62");
        if (cfg.prime_lo > cfg.prime_hi)
            throw std::invalid_argument("scan config: empty prime range");
        if (cfg.primes_per_decade < 1)
            throw std::invalid_argument("scan config: primes per decade must be >= 1");
    } else {
        for (const std::uint64_t p : cfg.explicit_primes)
            if (p <= 3 || p >= Modulus::kLimit || !is_prime(p))
                throw std::invalid_argument(
                    "scan config: explicit prime list entry " +
                    std::to_string(p) + " fails the is_prime check");
    }
    if (cfg.curves_per_prime < 1)
        throw std::invalid_argument("scan config: curves per prime must be >= 1");
    if (cfg.r_values.empty())
        throw std::invalid_argument("scan config: no r values");
    for (const unsigned r : cfg.r_values)
        if (r < 1)
            throw std::invalid_argument("scan config: r values must be >= 1");
    if (cfg.epsilon < 0.0)
        throw std::invalid_argument("scan config: epsilon must be >= 0");
    if (cfg.fixed_a && *cfg.fixed_a == 0)
        throw std::invalid_argument("scan config: fixed a must be nonzero");
}

inline std::vector<std::uint64_t> config_primes(const ScanConfig& cfg) {
    if (!cfg.explicit_primes.empty()) {
        std::vector<std::uint64_t> ps = cfg.explicit_primes;
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        return ps;
    }
    return log_spaced_primes(cfg.prime_lo, cfg.prime_hi,
                             cfg.primes_per_decade);
}

inline std::pair<std::uint64_t, std::uint64_t> curve_coefficients(
    const ScanConfig& cfg, std::uint64_t p, std::uint64_t index) {
    SplitMix64 rng = curve_stream(cfg.seed, p, index);
    auto [a, c] = sample_coefficients(rng, p);
    if (cfg.fixed_a) a = *cfg.fixed_a % p;
    if (cfg.fixed_c) c = *cfg.fixed_c % p;
    return {a, c};
}

// Run fn(i) for i in [0, n) on the configured number of workers. The first
// exception from any worker is rethrown on the caller's thread.
inline void parallel_for(unsigned threads, std::uint64_t n,
                         const std::function<void(std::uint64_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, n)));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> cursor{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::uint64_t i = cursor.fetch_add(1); i < n;
                     i = cursor.fetch_add(1))
                    fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// Sweep every (prime, curve index) work unit, independent and
// schedule-free: coefficients come from the counter-based stream keyed by
// (seed, p, index), results land in their own slot and are sorted
// canonically afterwards.
inline MinboxScan run_minbox_scan(const ScanConfig& cfg) {
    detail::validate_config(cfg);
    const std::vector<std::uint64_t> primes = detail::config_primes(cfg);
    const std::uint64_t n =
        static_cast<std::uint64_t>(primes.size()) * cfg.curves_per_prime;
    std::vector<ScanRecord> records(n);
    detail::parallel_for(cfg.threads, n, [&](std::uint64_t i) {
        const std::uint64_t p = primes[i / cfg.curves_per_prime];
        const std::uint64_t index = i % cfg.curves_per_prime;
        const auto [a, c] = detail::curve_coefficients(cfg, p, index);
        const ReducedCubic curve(Modulus(p), a, c);
        const auto t0 = std::chrono::steady_clock::now();
        const MinBoxResult res = min_box_side(curve);
        const auto t1 = std::chrono::steady_clock::now();
        ScanRecord& rec = records[i];
        rec.p = p;
        rec.a = a;
        rec.c = c;
        rec.h_min = res.h_min;
        rec.u = res.witness.u;
        rec.v_signed = res.witness.v_signed;
        rec.x1 = res.witness.p1.x;
        rec.y1 = res.witness.p1.y;
        rec.x2 = res.witness.p2.x;
        rec.y2 = res.witness.p2.y;
        rec.anchor_x = res.witness.anchor_x;
        rec.anchor_y = res.witness.anchor_y;
        rec.micros =
            cfg.record_timing
                ? static_cast<std::uint64_t>(
                      std::chrono::duration_cast<std::chrono::microseconds>(
                          t1 - t0)
                          .count())
                : 0;
    });
    std::stable_sort(records.begin(), records.end(),
                     [](const ScanRecord& l, const ScanRecord& r) {
                         return std::tie(l.p, l.a, l.c) <
                                std::tie(r.p, r.a, r.c);
                     });
    MinboxScan out;
    out.records = std::move(records);
    for (const std::uint64_t p : primes) {
        PrimeSummary s;
        s.p = p;
        double total = 0.0;
        for (const ScanRecord& rec : out.records) {
            if (rec.p != p) continue;
            ++s.curves;
            total += static_cast<double>(rec.h_min);
            s.h_worst = std::max(s.h_worst, rec.h_min);
        }
        s.h_mean = s.curves ? total / s.curves : 0.0;
        out.summary.push_back(s);
    }
    return out;
}

// Per prime, one random spaced family and one curve-value family, each
// reported at every r. Reports come out sorted by (p, r, family).
inline std::vector<MomentReport> run_moment_scan(const ScanConfig& cfg) {
    detail::validate_config(cfg);
    std::vector<MomentReport> reports;
    for (const std::uint64_t p : detail::config_primes(cfg)) {
        const Modulus m(p);
        const std::uint64_t window =
            cfg.moment_window ? *cfg.moment_window : ceil_cbrt(p);
        const std::uint64_t count = std::clamp<std::uint64_t>(
            p / (2 * window), 1, 500);

        SplitMix64 rng = family_stream(cfg.seed, p, 0);
        std::vector<std::uint64_t> values;
        values.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i)
            values.push_back(rng.next() % p);
        const SpacedFamily random_fam = greedy_spaced_family(m, values, window);

        const auto [a, c] = detail::curve_coefficients(cfg, p, 0);
        const ReducedCubic curve(m, a, c);
        values.clear();
        for (std::uint64_t up = 1; up <= count; ++up)
            values.push_back(curve.eval(up));
        const SpacedFamily curve_fam = greedy_spaced_family(m, values, window);

        for (const unsigned r : cfg.r_values) {
            reports.push_back(
                make_moment_report(random_fam, r, cfg.epsilon, "random"));
            reports.push_back(
                make_moment_report(curve_fam, r, cfg.epsilon, "curve"));
        }
    }
    std::sort(reports.begin(), reports.end(),
              [](const MomentReport& l, const MomentReport& r) {
                  return std::tie(l.p, l.r, l.family) <
                         std::tie(r.p, r.r, r.family);
              });
    return reports;
}

// Ordinary least squares on (ln p, ln H). The slope is the empirical
// growth exponent.
inline FitResult fit_exponent(
    const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("fit_exponent: need at least two points");
    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& [p, h] : points) {
        if (!(p > 0.0) || !(h >= 1.0))
            throw std::invalid_argument(
                "fit_exponent: points must have p > 0 and H >= 1");
        xs.push_back(std::log(p));
        ys.push_back(std::log(h));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument(
            "fit_exponent: degenerate input, all p equal");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_points = points.size();
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = fit.intercept + fit.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

inline FitResult fit_exponent_of_summary(
    const std::vector<PrimeSummary>& summary) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(summary.size());
    for (const PrimeSummary& s : summary)
        pts.emplace_back(static_cast<double>(s.p),
                         static_cast<double>(s.h_worst));
    return fit_exponent(pts);
}

enum class RecordFormat { csv, json };

inline constexpr const char* kRecordHeader =
    "p,a,c,h_min,u,v_signed,x1,y1,x2,y2,anchor_x,anchor_y,micros";

namespace detail {

inline RecordFormat format_for_path(const std::string& path) {
    return path.size() >= 5 && path.substr(path.size() - 5) == ".json"
               ? RecordFormat::json
               : RecordFormat::csv;
}

template <typename T>
inline std::string dec(T value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline BoxWitness witness_of_record(const ScanRecord& rec) {
    BoxWitness w;
    w.p1 = {rec.x1, rec.y1};
    w.p2 = {rec.x2, rec.y2};
    w.u = rec.u;
    w.v_signed = rec.v_signed;
    w.anchor_x = rec.anchor_x;
    w.anchor_y = rec.anchor_y;
    w.side = rec.h_min;
    return w;
}

// Witness membership is always re-checked; minimality is re-proved with
// the detector for small p and trusted to the binary search above that.
inline void verify_record(const ScanRecord& rec) {
    const ReducedCubic curve(Modulus(rec.p), rec.a, rec.c);
    if (!witness_ok(curve, witness_of_record(rec)))
        throw std::logic_error("scan record failed witness re-verification");
    if (rec.p <= 10000) {
        if (!detect_in_box(curve, rec.h_min) ||
            detect_in_box(curve, rec.h_min - 1))
            throw std::logic_error(
                "scan record failed minimality re-verification");
    }
}

inline nlohmann::ordered_json record_json(const ScanRecord& r) {
    return nlohmann::ordered_json{
        {"p", r.p},           {"a", r.a},
        {"c", r.c},           {"h_min", r.h_min},
        {"u", r.u},           {"v_signed", r.v_signed},
        {"x1", r.x1},         {"y1", r.y1},
        {"x2", r.x2},         {"y2", r.y2},
        {"anchor_x", r.anchor_x}, {"anchor_y", r.anchor_y},
        {"micros", r.micros}};
}

}  // namespace detail

inline void write_records(const std::vector<ScanRecord>& records,
                          RecordFormat format, const std::string& path) {
    for (const ScanRecord& rec : records) detail::verify_record(rec);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open " + path + " for writing");
    if (format == RecordFormat::csv) {
        out << kRecordHeader << '\n';
        for (const ScanRecord& r : records) {
            out << detail::dec(r.p) << ',' << detail::dec(r.a) << ','
                << detail::dec(r.c) << ',' << detail::dec(r.h_min) << ','
                << detail::dec(r.u) << ',' << detail::dec(r.v_signed) << ','
                << detail::dec(r.x1) << ',' << detail::dec(r.y1) << ','
                << detail::dec(r.x2) << ',' << detail::dec(r.y2) << ','
                << detail::dec(r.anchor_x) << ',' << detail::dec(r.anchor_y)
                << ',' << detail::dec(r.micros) << '\n';
        }
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const ScanRecord& r : records) arr.push_back(detail::record_json(r));
        out << arr.dump(2) << '\n';
    }
    if (!out.flush())
        throw io_error("write failed for " + path);
}

inline std::vector<ScanRecord> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path + " for reading");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<ScanRecord> records;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        throw io_error("empty records file: " + path);
    if (text[first] == '[') {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw io_error("cannot parse " + path + ": " + e.what());
        }
        for (const auto& j : arr) {
            ScanRecord r;
            r.p = j.at("p");
            r.a = j.at("a");
            r.c = j.at("c");
            r.h_min = j.at("h_min");
            r.u = j.at("u");
            r.v_signed = j.at("v_signed");
            r.x1 = j.at("x1");
            r.y1 = j.at("y1");
            r.x2 = j.at("x2");
            r.y2 = j.at("y2");
            r.anchor_x = j.at("anchor_x");
            r.anchor_y = j.at("anchor_y");
            r.micros = j.at("micros");
            records.push_back(r);
        }
        return records;
    }
    std::istringstream lines(text);
    std::string line;
    if (!std::getline(lines, line) ||
        (!line.empty() && line.back() == '\r' ? line.substr(0, line.size() - 1)
                                              : line) != kRecordHeader)
        throw io_error("missing records header in " + path);
    std::size_t lineno = 1;
    while (std::getline(lines, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 13)
            throw io_error("bad record at " + path + ":" +
                           std::to_string(lineno));
        try {
            ScanRecord r;
            r.p = std::stoull(cells[0]);
            r.a = std::stoull(cells[1]);
            r.c = std::stoull(cells[2]);
            r.h_min = std::stoull(cells[3]);
            r.u = std::stoull(cells[4]);
            r.v_signed = std::stoll(cells[5]);
            r.x1 = std::stoull(cells[6]);
            r.y1 = std::stoull(cells[7]);
            r.x2 = std::stoull(cells[8]);
            r.y2 = std::stoull(cells[9]);
            r.anchor_x = std::stoull(cells[10]);
            r.anchor_y = std::stoull(cells[11]);
            r.micros = std::stoull(cells[12]);
            records.push_back(r);
        } catch (const std::exception&) {
            throw io_error("bad record at " + path + ":" +
                           std::to_string(lineno));
        }
    }
    return records;
}

inline constexpr const char* kMomentHeader =
    "p,H,r,epsilon,family,J,lhs_moment,rhs_bound,ratio";

namespace detail {

inline std::string dec_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json moment_json(const MomentReport& r) {
    return nlohmann::ordered_json{
        {"p", r.p},
        {"H", r.window},
        {"r", r.r},
        {"epsilon", r.epsilon},
        {"family", r.family},
        {"J", r.family_size},
        {"lhs_moment", r.lhs_moment},
        {"rhs_bound", r.rhs_bound},
        {"ratio", r.ratio}};
}

}  // namespace detail

inline void write_moment_reports(const std::vector<MomentReport>& reports,
                                 RecordFormat format,
                                 const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open " + path + " for writing");
    if (format == RecordFormat::csv) {
        out << kMomentHeader << '\n';
        for (const MomentReport& r : reports) {
            out << detail::dec(r.p) << ',' << detail::dec(r.window) << ','
                << detail::dec(r.r) << ',' << detail::dec_double(r.epsilon)
                << ',' << r.family << ',' << detail::dec(r.family_size) << ','
                << detail::dec_double(r.lhs_moment) << ','
                << detail::dec_double(r.rhs_bound) << ','
                << detail::dec_double(r.ratio) << '\n';
        }
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const MomentReport& r : reports)
            arr.push_back(detail::moment_json(r));
        out << arr.dump(2) << '\n';
    }
    if (!out.flush())
        throw io_error("write failed for " + path);
}

}  // namespace modcubic
