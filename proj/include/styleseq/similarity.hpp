#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "styleseq/corpus.hpp"
#include "styleseq/patterns.hpp"
#include "styleseq/util.hpp"

namespace styleseq {

namespace detail {

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

}  // namespace detail

/// Cosine of the angle between the two frequency vectors over the union
/// vocabulary of both profiles. Counts are nonnegative, so the value lies in
/// [0, 1]. Conventions for degenerate inputs: both profiles empty -> 1,
/// exactly one empty -> 0.
inline double cosine_similarity(std::string_view s1, std::string_view s2, std::size_t min_len,
                                std::size_t max_len) {
    SubstringProfile p1 = substrings(s1, min_len, max_len);
    SubstringProfile p2 = substrings(s2, min_len, max_len);
    if (p1.counts.empty() && p2.counts.empty()) return 1.0;
    if (p1.counts.empty() || p2.counts.empty()) return 0.0;
    std::vector<std::string> vocab = union_vocabulary({p1, p2});
    std::vector<double> x = frequency_vector(p1, vocab);
    std::vector<double> y = frequency_vector(p2, vocab);
    return detail::dot(x, y) / (detail::norm2(x) * detail::norm2(y));
}

inline double cosine_similarity(const SymbolSequence& s1, const SymbolSequence& s2,
                                std::size_t min_len, std::size_t max_len) {
    return cosine_similarity(std::string_view(s1.codes), std::string_view(s2.codes), min_len,
                             max_len);
}

/// |presence1 ∩ presence2| / |presence1 ∪ presence2|; both empty -> 1.
inline double jaccard_similarity(std::string_view s1, std::string_view s2, std::size_t min_len,
                                 std::size_t max_len) {
    PresenceProfile p1 = presence_profile(substrings(s1, min_len, max_len));
    PresenceProfile p2 = presence_profile(substrings(s2, min_len, max_len));
    if (p1.present.empty() && p2.present.empty()) return 1.0;
    std::size_t inter = 0;
    for (const std::string& p : p1.present) inter += p2.present.count(p);
    std::size_t uni = p1.present.size() + p2.present.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double jaccard_similarity(const SymbolSequence& s1, const SymbolSequence& s2,
                                 std::size_t min_len, std::size_t max_len) {
    return jaccard_similarity(std::string_view(s1.codes), std::string_view(s2.codes), min_len,
                              max_len);
}

/// L2 distance between frequency vectors. With normalize set, both vectors are
/// L2-normalized first, which ties the result to cosine: distance^2 =
/// 2 * (1 - cosine). Degenerate inputs under normalize: both empty -> 0, one
/// empty -> sqrt(2) (cosine 0).
inline double euclidean_distance(std::string_view s1, std::string_view s2, std::size_t min_len,
                                 std::size_t max_len, bool normalize = false) {
    SubstringProfile p1 = substrings(s1, min_len, max_len);
    SubstringProfile p2 = substrings(s2, min_len, max_len);
    if (p1.counts.empty() && p2.counts.empty()) return 0.0;
    std::vector<std::string> vocab = union_vocabulary({p1, p2});
    std::vector<double> x = frequency_vector(p1, vocab);
    std::vector<double> y = frequency_vector(p2, vocab);
    if (normalize) {
        if (p1.counts.empty() || p2.counts.empty()) return std::sqrt(2.0);
        double nx = detail::norm2(x), ny = detail::norm2(y);
        for (double& v : x) v /= nx;
        for (double& v : y) v /= ny;
    }
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double euclidean_distance(const SymbolSequence& s1, const SymbolSequence& s2,
                                 std::size_t min_len, std::size_t max_len,
                                 bool normalize = false) {
    return euclidean_distance(std::string_view(s1.codes), std::string_view(s2.codes), min_len,
                              max_len, normalize);
}

enum class Metric { cosine, jaccard, euclidean };

inline Metric metric_from_name(const std::string& name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "jaccard") return Metric::jaccard;
    if (name == "euclidean") return Metric::euclidean;
    throw validation_error("unknown metric '" + name + "' (expected cosine, jaccard or euclidean)");
}

inline std::string metric_name(Metric m) {
    switch (m) {
        case Metric::cosine: return "cosine";
        case Metric::jaccard: return "jaccard";
        case Metric::euclidean: return "euclidean";
    }
    return "?";
}

/// Symmetric pairwise distances, rows ordered by record id. Distance is
/// 1 - similarity for cosine and Jaccard and the normalized L2 distance for
/// euclidean, so every entry lies in [0, 2] with a zero diagonal.
struct DistanceMatrix {
    std::vector<std::string> ids;
    std::size_t n = 0;
    std::vector<double> data;  // row-major n*n

    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
};

inline DistanceMatrix distance_matrix(std::vector<NarrativeRecord> records, Metric metric,
                                      std::size_t min_len, std::size_t max_len) {
    if (records.empty()) throw validation_error("distance_matrix: need at least one record");
    std::stable_sort(records.begin(), records.end(),
                     [](const NarrativeRecord& a, const NarrativeRecord& b) { return a.id < b.id; });

    const std::size_t n = records.size();
    std::vector<SubstringProfile> profiles(n);
    util::parallel_for(n, [&](std::size_t i) {
        profiles[i] = substrings(records[i].sequence, min_len, max_len, records[i].id);
    });

    // Global sorted vocabulary. Zero entries contribute exactly 0.0 to sums, so
    // results match the pairwise union-vocabulary calls bit for bit.
    std::vector<std::string> vocab = union_vocabulary(profiles);
    std::vector<std::vector<double>> vecs(n);
    std::vector<double> norms(n, 0.0);
    util::parallel_for(n, [&](std::size_t i) {
        vecs[i] = frequency_vector(profiles[i], vocab);
        norms[i] = detail::norm2(vecs[i]);
    });

    DistanceMatrix m;
    m.n = n;
    m.data.assign(n * n, 0.0);
    for (const auto& r : records) m.ids.push_back(r.id);

    // Each entry is a pure function of two rows; the fill is schedule-independent.
    util::parallel_for(n, [&](std::size_t i) {
        const bool empty_i = profiles[i].counts.empty();
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool empty_j = profiles[j].counts.empty();
            double d = 0;
            switch (metric) {
                case Metric::cosine:
                    if (empty_i && empty_j) d = 0.0;
                    else if (empty_i || empty_j) d = 1.0;
                    else d = 1.0 - detail::dot(vecs[i], vecs[j]) / (norms[i] * norms[j]);
                    break;
                case Metric::jaccard: {
                    if (empty_i && empty_j) { d = 0.0; break; }
                    std::size_t inter = 0, nz_i = 0, nz_j = 0;
                    for (std::size_t t = 0; t < vocab.size(); ++t) {
                        nz_i += vecs[i][t] > 0;
                        nz_j += vecs[j][t] > 0;
                        inter += vecs[i][t] > 0 && vecs[j][t] > 0;
                    }
                    d = 1.0 - static_cast<double>(inter) /
                                  static_cast<double>(nz_i + nz_j - inter);
                    break;
                }
                case Metric::euclidean: {
                    if (empty_i && empty_j) { d = 0.0; break; }
                    if (empty_i || empty_j) { d = std::sqrt(2.0); break; }
                    double s = 0;
                    for (std::size_t t = 0; t < vocab.size(); ++t) {
                        double diff = vecs[i][t] / norms[i] - vecs[j][t] / norms[j];
                        s += diff * diff;
                    }
                    d = std::sqrt(s);
                    break;
                }
            }
            m.at(i, j) = d;
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m.at(j, i) = m.at(i, j);
    return m;
}

}  // namespace styleseq
