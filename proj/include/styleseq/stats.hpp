#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "styleseq/alphabet.hpp"
#include "styleseq/patterns.hpp"
#include "styleseq/util.hpp"

namespace styleseq {

/// Presence/absence counts for one pattern across two series:
/// a = sequences in A containing it, b = in A lacking it, c/d likewise for B.
struct ContingencyTable {
    std::uint64_t a = 0, b = 0, c = 0, d = 0;

    std::uint64_t total() const { return a + b + c + d; }
    bool operator==(const ContingencyTable&) const = default;
};

inline void check_table(const ContingencyTable& t) {
    if (t.a + t.b < 1 || t.c + t.d < 1)
        throw validation_error("contingency table: each series needs at least one sequence");
}

namespace detail {

/// log(n!) with a lazily grown per-thread cache, so parallel pattern tests
/// never contend or observe a vector mid-reallocation.
inline double log_factorial(std::uint64_t n) {
    thread_local std::vector<double> table{0.0, 0.0};  // 0!, 1!
    while (table.size() <= n)
        table.push_back(table.back() + std::log(static_cast<double>(table.size())));
    return table[n];
}

inline double log_choose(std::uint64_t n, std::uint64_t k) {
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace detail

/// Two-sided Fisher exact test by the probability-mass rule: the p-value sums
/// hypergeometric probabilities of every table with the observed margins whose
/// probability does not exceed the observed table's (with 1e-12 relative slack
/// so algebraically tied tables are never dropped to rounding). Log-space
/// throughout; exact enough for totals well beyond 5000.
inline double fisher_exact_two_sided(const ContingencyTable& t) {
    check_table(t);
    const std::uint64_t r1 = t.a + t.b;  // size of series A
    const std::uint64_t r2 = t.c + t.d;  // size of series B
    const std::uint64_t cs = t.a + t.c;  // sequences containing the pattern
    const std::uint64_t n = t.total();

    const double log_denom = detail::log_choose(n, cs);
    auto log_prob = [&](std::uint64_t x) {
        return detail::log_choose(r1, x) + detail::log_choose(r2, cs - x) - log_denom;
    };

    const std::uint64_t x_lo = cs > r2 ? cs - r2 : 0;
    const std::uint64_t x_hi = std::min(r1, cs);
    const double log_obs = log_prob(t.a);
    const double cutoff = log_obs + 1e-12;  // log1p(1e-12) to first order

    double p = 0.0;
    for (std::uint64_t x = x_lo; x <= x_hi; ++x) {
        double lp = log_prob(x);
        if (lp <= cutoff) p += std::exp(lp);
    }
    return std::min(p, 1.0);
}

struct OddsRatio {
    double value = 1.0;
    bool corrected = false;  // Haldane-Anscombe +0.5 applied to all cells
};

/// (a*d)/(b*c). A zero anywhere adds 0.5 to all four cells and sets the flag;
/// the correction never feeds back into the p-value computation.
inline OddsRatio odds_ratio(const ContingencyTable& t) {
    check_table(t);
    if (t.a == 0 || t.b == 0 || t.c == 0 || t.d == 0) {
        double a = t.a + 0.5, b = t.b + 0.5, c = t.c + 0.5, d = t.d + 0.5;
        return {(a * d) / (b * c), true};
    }
    return {(static_cast<double>(t.a) * static_cast<double>(t.d)) /
                (static_cast<double>(t.b) * static_cast<double>(t.c)),
            false};
}

struct HolmResult {
    double p_adjusted = 1.0;
    bool reject = false;
};

/// Holm step-down correction. Sort p ascending; adjusted(i) = running max of
/// min(1, (m-i)*p(i)); reject while adjusted <= alpha. Results are returned in
/// the input order.
inline std::vector<HolmResult> holm_correct(const std::vector<double>& p_values, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw validation_error("holm_correct: alpha must be in (0,1)");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw validation_error("holm_correct: p-values must lie in [0,1]");

    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

    std::vector<HolmResult> results(m);
    double running = 0.0;
    bool rejecting = true;
    for (std::size_t rank = 0; rank < m; ++rank) {
        double adj = std::min(1.0, static_cast<double>(m - rank) * p_values[order[rank]]);
        running = std::max(running, adj);
        rejecting = rejecting && running <= alpha;
        results[order[rank]] = {running, rejecting};
    }
    return results;
}

/// Presence/absence table of one pattern across two series of sequences.
inline ContingencyTable presence_table(const std::vector<SymbolSequence>& series_a,
                                       const std::vector<SymbolSequence>& series_b,
                                       const std::string& pattern) {
    if (series_a.empty() || series_b.empty())
        throw validation_error("presence_table: both series must be nonempty");
    auto contains = [&](const SymbolSequence& s) {
        return s.codes.find(pattern) != std::string::npos;
    };
    ContingencyTable t;
    for (const auto& s : series_a) (contains(s) ? t.a : t.b)++;
    for (const auto& s : series_b) (contains(s) ? t.c : t.d)++;
    return t;
}

struct TestResult {
    std::string pattern;
    std::size_t size = 0;
    ContingencyTable table;
    double odds_ratio = 1.0;
    bool corrected = false;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool significant = false;
};

struct CompareOptions {
    std::vector<std::size_t> sizes{1, 2, 3};
    double alpha = 0.05;
    /// Holm family scope: per size by default; pooled runs one family across
    /// all sizes of the comparison.
    bool pool_sizes = false;
};

/// Tests every pattern of each requested size occurring in either series.
/// Results are sorted by (size, descending odds ratio, pattern).
inline std::vector<TestResult> compare_series(const std::vector<SymbolSequence>& series_a,
                                              const std::vector<SymbolSequence>& series_b,
                                              const CompareOptions& opt = {}) {
    if (series_a.empty() || series_b.empty())
        throw validation_error("compare_series: both series must be nonempty");

    std::vector<TestResult> results;
    std::vector<std::pair<std::size_t, std::size_t>> size_ranges;  // [begin,end) per size
    for (std::size_t size : opt.sizes) {
        std::set<std::string> vocab;
        for (const auto& s : distinct_substrings(series_a, size).inventory) vocab.insert(s);
        for (const auto& s : distinct_substrings(series_b, size).inventory) vocab.insert(s);

        std::size_t begin = results.size();
        std::vector<std::string> patterns(vocab.begin(), vocab.end());
        std::vector<TestResult> batch(patterns.size());
        util::parallel_for(patterns.size(), [&](std::size_t i) {
            TestResult r;
            r.pattern = patterns[i];
            r.size = size;
            r.table = presence_table(series_a, series_b, patterns[i]);
            OddsRatio orr = odds_ratio(r.table);
            r.odds_ratio = orr.value;
            r.corrected = orr.corrected;
            r.p_raw = fisher_exact_two_sided(r.table);
            batch[i] = std::move(r);
        });
        for (auto& r : batch) results.push_back(std::move(r));
        size_ranges.emplace_back(begin, results.size());
    }

    auto apply_holm = [&](std::size_t begin, std::size_t end) {
        std::vector<double> ps;
        ps.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) ps.push_back(results[i].p_raw);
        std::vector<HolmResult> hr = holm_correct(ps, opt.alpha);
        for (std::size_t i = begin; i < end; ++i) {
            results[i].p_adjusted = hr[i - begin].p_adjusted;
            results[i].significant = hr[i - begin].reject;
        }
    };
    if (opt.pool_sizes) {
        if (!results.empty()) apply_holm(0, results.size());
    } else {
        for (auto [begin, end] : size_ranges)
            if (end > begin) apply_holm(begin, end);
    }

    std::sort(results.begin(), results.end(), [](const TestResult& x, const TestResult& y) {
        if (x.size != y.size) return x.size < y.size;
        if (x.odds_ratio != y.odds_ratio) return x.odds_ratio > y.odds_ratio;
        return x.pattern < y.pattern;
    });
    return results;
}

}  // namespace styleseq
