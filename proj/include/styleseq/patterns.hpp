#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "styleseq/alphabet.hpp"
#include "styleseq/util.hpp"

namespace styleseq {

/// Occurrence counts of every substring of the sequence with length in
/// [min_len, max_len], counted with overlap (sliding window). For a sequence of
/// length L the counts of n-patterns sum to max(L-n+1, 0).
struct SubstringProfile {
    std::string sequence_id;
    std::size_t min_len = 1;
    std::size_t max_len = 1;
    std::map<std::string, std::size_t> counts;

    std::size_t total_windows() const {
        std::size_t t = 0;
        for (const auto& [_, c] : counts) t += c;
        return t;
    }
};

/// The set of patterns occurring at least once (presence/absence view used by
/// the statistics module).
struct PresenceProfile {
    std::string sequence_id;
    std::set<std::string> present;
};

inline SubstringProfile substrings(std::string_view codes, std::size_t min_len,
                                   std::size_t max_len, std::string sequence_id = {}) {
    if (min_len < 1) throw validation_error("substrings: min_len must be >= 1");
    if (min_len > max_len) throw validation_error("substrings: min_len must be <= max_len");
    SubstringProfile profile{std::move(sequence_id), min_len, max_len, {}};
    for (std::size_t n = min_len; n <= max_len && n <= codes.size(); ++n)
        for (std::size_t i = 0; i + n <= codes.size(); ++i)
            ++profile.counts[std::string(codes.substr(i, n))];
    return profile;
}

inline SubstringProfile substrings(const SymbolSequence& seq, std::size_t min_len,
                                   std::size_t max_len, std::string sequence_id = {}) {
    return substrings(std::string_view(seq.codes), min_len, max_len, std::move(sequence_id));
}

inline PresenceProfile presence_profile(const SubstringProfile& profile) {
    PresenceProfile p{profile.sequence_id, {}};
    for (const auto& [pattern, _] : profile.counts) p.present.insert(pattern);
    return p;
}

/// True iff pattern embeds into seq order-preservingly (contiguity not
/// required).
inline bool subsequence_present(std::string_view codes, std::string_view pattern) {
    if (pattern.empty()) throw validation_error("subsequence_present: empty pattern");
    std::size_t j = 0;
    for (std::size_t i = 0; i < codes.size() && j < pattern.size(); ++i)
        if (codes[i] == pattern[j]) ++j;
    return j == pattern.size();
}

inline bool subsequence_present(const SymbolSequence& seq, std::string_view pattern) {
    return subsequence_present(std::string_view(seq.codes), pattern);
}

struct DistinctSubstrings {
    std::size_t count = 0;
    std::vector<std::string> inventory;  // sorted
};

/// Distinct patterns of exactly `size` across all sequences of a series.
inline DistinctSubstrings distinct_substrings(const std::vector<SymbolSequence>& series,
                                              std::size_t size) {
    if (size < 1) throw validation_error("distinct_substrings: size must be >= 1");
    std::set<std::string> inv;
    for (const SymbolSequence& seq : series) {
        std::string_view codes(seq.codes);
        for (std::size_t i = 0; i + size <= codes.size(); ++i)
            inv.insert(std::string(codes.substr(i, size)));
    }
    DistinctSubstrings out;
    out.inventory.assign(inv.begin(), inv.end());
    out.count = out.inventory.size();
    return out;
}

/// Dense counts aligned to the given vocabulary; absent patterns contribute 0.
inline std::vector<double> frequency_vector(const SubstringProfile& profile,
                                            const std::vector<std::string>& vocabulary) {
    std::vector<double> v(vocabulary.size(), 0.0);
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        auto it = profile.counts.find(vocabulary[i]);
        if (it != profile.counts.end()) v[i] = static_cast<double>(it->second);
    }
    return v;
}

/// Sorted union of the profiles' pattern sets.
inline std::vector<std::string> union_vocabulary(const std::vector<SubstringProfile>& profiles) {
    std::set<std::string> vocab;
    for (const SubstringProfile& p : profiles)
        for (const auto& [pattern, _] : p.counts) vocab.insert(pattern);
    return {vocab.begin(), vocab.end()};
}

}  // namespace styleseq
