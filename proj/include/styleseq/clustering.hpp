#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "styleseq/corpus.hpp"
#include "styleseq/patterns.hpp"
#include "styleseq/similarity.hpp"
#include "styleseq/util.hpp"

namespace styleseq {

struct Merge {
    int left = 0;   // node id, always < right
    int right = 0;  // node id
    double height = 0.0;
    int size = 0;  // leaves under the merged node
};

/// Agglomeration history. Leaves are nodes 0..n-1 in row order of the inputs;
/// merge t creates node n+t. Ward heights are monotone nondecreasing.
struct Dendrogram {
    int n_leaves = 0;
    std::vector<Merge> merges;  // exactly n_leaves-1 entries
};

/// Relative band within which candidate distances count as tied; ties resolve
/// to the lexicographically smallest node-id pair. The naive oracle in the
/// test suite applies the identical rule, so merge order is reproducible even
/// when two algebraically equal distances differ in the last float bit.
inline constexpr double ward_tie_band = 1e-9;

namespace detail {

/// Scans pairs (i,j), i<j, over slot-ordered clusters (node ids strictly
/// increase with slot index) and returns the first pair within the tie band of
/// the minimum.
template <typename D2At>
inline std::pair<std::size_t, std::size_t> min_pair(std::size_t m, D2At&& d2) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) best = std::min(best, d2(i, j));
    const double band = best + ward_tie_band * std::max(1.0, best);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (d2(i, j) <= band) return {i, j};
    return {0, 1};  // unreachable for m >= 2
}

}  // namespace detail

/// Ward agglomeration over points by the Lance-Williams update. Initial
/// squared distances are ||x_i - x_j||^2; merge heights are the square roots
/// of the Ward criterion, so two singletons merge at their plain Euclidean
/// distance.
inline Dendrogram hac_ward_points(const std::vector<std::vector<double>>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw validation_error("hac_ward: need at least 2 records");
    for (const auto& p : points)
        if (p.size() != points[0].size())
            throw validation_error("hac_ward: points must share one dimension");

    // Active clusters in creation order; node ids strictly increase with slot.
    std::vector<int> ids(n);
    std::vector<int> sizes(n, 1);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i);

    std::vector<std::vector<double>> d2(n, std::vector<double>(n, 0.0));
    util::parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0;
            for (std::size_t t = 0; t < points[i].size(); ++t) {
                double diff = points[i][t] - points[j][t];
                s += diff * diff;
            }
            d2[i][j] = s;
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d2[j][i] = d2[i][j];

    Dendrogram dend;
    dend.n_leaves = static_cast<int>(n);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        const std::size_t m = ids.size();
        auto [bi, bj] = detail::min_pair(m, [&](std::size_t i, std::size_t j) { return d2[i][j]; });

        const double si = sizes[bi], sj = sizes[bj];
        const double dij = d2[bi][bj];
        dend.merges.push_back({ids[bi], ids[bj], std::sqrt(std::max(0.0, dij)),
                               static_cast<int>(si + sj)});

        // Lance-Williams Ward update against every other active cluster.
        std::vector<double> merged_row;
        merged_row.reserve(m - 2);
        for (std::size_t k = 0; k < m; ++k) {
            if (k == bi || k == bj) continue;
            const double sk = sizes[k];
            merged_row.push_back(((sk + si) * d2[bi][k] + (sk + sj) * d2[bj][k] - sk * dij) /
                                 (si + sj + sk));
        }

        // Drop the two merged slots, append the new cluster at the end.
        auto drop2 = [&](auto& v) {
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(bj));
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(bi));
        };
        for (auto& row : d2) drop2(row);
        drop2(d2);
        drop2(ids);
        drop2(sizes);

        ids.push_back(static_cast<int>(n + step));
        sizes.push_back(static_cast<int>(si + sj));
        for (std::size_t k = 0; k < d2.size(); ++k) d2[k].push_back(merged_row[k]);
        merged_row.push_back(0.0);
        d2.push_back(std::move(merged_row));
    }
    return dend;
}

/// L2-normalized substring-count vectors for Ward clustering: with unit
/// vectors, squared Euclidean distance is 2*(1 - cosine similarity), which
/// reconciles Ward linkage with a cosine notion of similarity. Records are
/// ordered by id (ties keep input order), matching distance_matrix.
inline std::vector<std::vector<double>> ward_feature_vectors(
    std::vector<NarrativeRecord> records, std::size_t min_len, std::size_t max_len,
    std::vector<std::string>* ids_out = nullptr) {
    std::stable_sort(records.begin(), records.end(),
                     [](const NarrativeRecord& a, const NarrativeRecord& b) { return a.id < b.id; });
    std::vector<SubstringProfile> profiles(records.size());
    util::parallel_for(records.size(), [&](std::size_t i) {
        profiles[i] = substrings(records[i].sequence, min_len, max_len, records[i].id);
    });
    std::vector<std::string> vocab = union_vocabulary(profiles);
    std::vector<std::vector<double>> points(records.size());
    util::parallel_for(records.size(), [&](std::size_t i) {
        points[i] = frequency_vector(profiles[i], vocab);
        double norm = detail::norm2(points[i]);
        if (norm > 0)
            for (double& v : points[i]) v /= norm;
        // empty profiles stay at the origin
    });
    if (ids_out) {
        ids_out->clear();
        for (const auto& r : records) ids_out->push_back(r.id);
    }
    return points;
}

inline Dendrogram hac_ward(const std::vector<NarrativeRecord>& records, std::size_t min_len,
                           std::size_t max_len) {
    return hac_ward_points(ward_feature_vectors(records, min_len, max_len));
}

struct ClusterCut {
    int k = 0;
    std::vector<int> leaf_labels;            // label per leaf, leaf order
    std::map<std::string, int> assignment;   // id -> label (when ids known)
    std::vector<int> sizes;                  // per label
};

/// Undoes the last k-1 merges. Labels are assigned by founding order: scanning
/// leaves 0..n-1, each newly seen cluster takes the next label.
inline ClusterCut cut(const Dendrogram& dend, int k, const std::vector<std::string>& ids = {}) {
    const int n = dend.n_leaves;
    if (k < 1 || k > n) throw validation_error("cut: k must be in [1, n]");
    if (!ids.empty() && static_cast<int>(ids.size()) != n)
        throw validation_error("cut: ids must match leaf count");

    // Union-find over node ids after applying the first n-k merges.
    std::vector<int> parent(static_cast<std::size_t>(2 * n - 1));
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int t = 0; t < n - k; ++t) {
        const Merge& mg = dend.merges[static_cast<std::size_t>(t)];
        int root = n + t;
        parent[find(mg.left)] = root;
        parent[find(mg.right)] = root;
    }

    ClusterCut c;
    c.k = k;
    c.leaf_labels.assign(static_cast<std::size_t>(n), -1);
    std::map<int, int> label_of_root;
    for (int leaf = 0; leaf < n; ++leaf) {
        int root = find(leaf);
        auto [it, fresh] = label_of_root.try_emplace(root, static_cast<int>(label_of_root.size()));
        c.leaf_labels[static_cast<std::size_t>(leaf)] = it->second;
        if (fresh) c.sizes.push_back(0);
        ++c.sizes[static_cast<std::size_t>(it->second)];
        if (!ids.empty()) c.assignment[ids[static_cast<std::size_t>(leaf)]] = it->second;
    }
    return c;
}

struct SilhouetteResult {
    double mean = 0.0;
    std::vector<double> per_point;
    std::vector<double> per_cluster_mean;
};

/// s(i) = (b(i) - a(i)) / max(a(i), b(i)); singletons (and 0/0 cases) score 0.
inline SilhouetteResult silhouette(const ClusterCut& c, const DistanceMatrix& dm) {
    if (c.k < 2) throw validation_error("silhouette: needs k >= 2");
    const std::size_t n = dm.n;
    if (c.leaf_labels.size() != n)
        throw validation_error("silhouette: cut and matrix disagree on point count");

    SilhouetteResult res;
    res.per_point.assign(n, 0.0);
    std::vector<double> cluster_sum(static_cast<std::size_t>(c.k), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int own = c.leaf_labels[i];
        if (c.sizes[static_cast<std::size_t>(own)] <= 1) {
            res.per_point[i] = 0.0;  // singleton convention
            continue;
        }
        std::vector<double> sum(static_cast<std::size_t>(c.k), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum[static_cast<std::size_t>(c.leaf_labels[j])] += dm.at(i, j);
        double a = sum[static_cast<std::size_t>(own)] /
                   static_cast<double>(c.sizes[static_cast<std::size_t>(own)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int l = 0; l < c.k; ++l) {
            if (l == own || c.sizes[static_cast<std::size_t>(l)] == 0) continue;
            b = std::min(b, sum[static_cast<std::size_t>(l)] /
                                static_cast<double>(c.sizes[static_cast<std::size_t>(l)]));
        }
        double denom = std::max(a, b);
        res.per_point[i] = denom > 0 ? (b - a) / denom : 0.0;
    }
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += res.per_point[i];
        cluster_sum[static_cast<std::size_t>(c.leaf_labels[i])] += res.per_point[i];
    }
    res.mean = total / static_cast<double>(n);
    for (int l = 0; l < c.k; ++l)
        res.per_cluster_mean.push_back(
            cluster_sum[static_cast<std::size_t>(l)] /
            static_cast<double>(std::max(1, c.sizes[static_cast<std::size_t>(l)])));
    return res;
}

struct CutChoice {
    int k_star = 2;
    std::vector<std::pair<int, double>> scores;  // (k, mean silhouette) for k = 2..k_max
};

/// Picks the cut with maximal mean silhouette over k in [2, k_max]; ties take
/// the smallest k. k_max is clamped to the leaf count.
inline CutChoice choose_cut(const Dendrogram& dend, const DistanceMatrix& dm, int k_max,
                            const std::vector<std::string>& ids = {}) {
    if (k_max < 2) throw validation_error("choose_cut: k_max must be >= 2");
    k_max = std::min(k_max, dend.n_leaves);
    CutChoice choice;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= k_max; ++k) {
        double score = silhouette(cut(dend, k, ids), dm).mean;
        choice.scores.emplace_back(k, score);
        if (score > best) {
            best = score;
            choice.k_star = k;
        }
    }
    return choice;
}

/// Clusters sorted by descending size (label order on ties); returns the
/// minimal prefix of labels whose sizes sum to at least threshold * n.
inline std::vector<int> select_by_coverage(const ClusterCut& c, double threshold) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw validation_error("select_by_coverage: threshold must be in (0, 1]");
    std::size_t n = 0;
    for (int s : c.sizes) n += static_cast<std::size_t>(s);
    std::vector<int> labels(c.sizes.size());
    std::iota(labels.begin(), labels.end(), 0);
    std::sort(labels.begin(), labels.end(), [&](int x, int y) {
        if (c.sizes[static_cast<std::size_t>(x)] != c.sizes[static_cast<std::size_t>(y)])
            return c.sizes[static_cast<std::size_t>(x)] > c.sizes[static_cast<std::size_t>(y)];
        return x < y;
    });
    std::vector<int> selected;
    double covered = 0;
    for (int l : labels) {
        if (covered >= threshold * static_cast<double>(n)) break;
        selected.push_back(l);
        covered += static_cast<double>(c.sizes[static_cast<std::size_t>(l)]);
    }
    return selected;
}

struct RepresentativeEntry {
    std::string id;
    std::string sequence;
    int cluster = 0;
    std::size_t cluster_size = 0;
    double mean_distance = 0.0;              // to the other cluster members
    std::map<char, std::size_t> symbol_counts;
};

/// Medoid of a cluster: the member with the smallest mean distance to the
/// others (lexicographically smallest id on ties). `members` are row indices
/// into the distance matrix; sequences are looked up by id.
inline RepresentativeEntry representative(const std::vector<std::size_t>& members,
                                          const DistanceMatrix& dm,
                                          const std::vector<NarrativeRecord>& records,
                                          int cluster_label = 0) {
    if (members.empty()) throw validation_error("representative: empty cluster");
    std::map<std::string, const NarrativeRecord*> by_id;
    for (const auto& r : records) by_id.try_emplace(r.id, &r);

    std::size_t best = members[0];
    double best_mean = std::numeric_limits<double>::infinity();
    for (std::size_t i : members) {
        double sum = 0;
        for (std::size_t j : members)
            if (j != i) sum += dm.at(i, j);
        double mean = members.size() > 1 ? sum / static_cast<double>(members.size() - 1) : 0.0;
        if (mean < best_mean || (mean == best_mean && dm.ids[i] < dm.ids[best])) {
            best = i;
            best_mean = mean;
        }
    }

    RepresentativeEntry e;
    e.id = dm.ids[best];
    e.cluster = cluster_label;
    e.cluster_size = members.size();
    e.mean_distance = best_mean;
    auto it = by_id.find(e.id);
    if (it == by_id.end()) throw validation_error("representative: no record with id " + e.id);
    e.sequence = it->second->sequence.codes;
    for (char ch : e.sequence) ++e.symbol_counts[ch];
    return e;
}

}  // namespace styleseq
