#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "styleseq/alphabet.hpp"
#include "styleseq/util.hpp"

namespace styleseq {

struct NarrativeRecord {
    std::string id;
    std::string series;
    SymbolSequence sequence;
    std::optional<std::string> text;
};

/// Sequences grouped by series, all over one alphabet. Series order is
/// first-appearance order in the input file; record order within a series is
/// file order. Immutable after load.
class SeriesCorpus {
public:
    explicit SeriesCorpus(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

    void add(NarrativeRecord record) {
        declare_series(record.series);
        series_[record.series].push_back(std::move(record));
    }

    /// Registers a series that may stay empty (e.g., expected but unseen).
    void declare_series(const std::string& name) {
        if (!series_.count(name)) {
            series_names_.push_back(name);
            series_[name];
        }
    }

    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<std::string>& series_names() const { return series_names_; }

    const std::vector<NarrativeRecord>& series(const std::string& name) const {
        auto it = series_.find(name);
        if (it == series_.end()) throw validation_error("unknown series '" + name + "'");
        return it->second;
    }

    bool has_series(const std::string& name) const { return series_.count(name) > 0; }

    std::size_t total_records() const {
        std::size_t n = 0;
        for (const auto& [_, recs] : series_) n += recs.size();
        return n;
    }

    std::vector<NarrativeRecord> all_records() const {
        std::vector<NarrativeRecord> out;
        out.reserve(total_records());
        for (const std::string& name : series_names_)
            for (const NarrativeRecord& r : series_.at(name)) out.push_back(r);
        return out;
    }

private:
    Alphabet alphabet_;
    std::vector<std::string> series_names_;
    std::map<std::string, std::vector<NarrativeRecord>> series_;
};

inline std::vector<SymbolSequence> sequences_of(const std::vector<NarrativeRecord>& records) {
    std::vector<SymbolSequence> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.sequence);
    return out;
}

namespace detail {

// Minimal RFC-4180 row parser, enough for our own exports plus hand-made files.
inline std::vector<std::string> parse_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline NarrativeRecord record_from_fields(const std::string& id, const std::string& series,
                                          const std::string& codes,
                                          const std::optional<std::string>& text,
                                          const Alphabet& alphabet) {
    if (id.empty()) throw validation_error("record with empty id");
    if (series.empty()) throw validation_error("record '" + id + "': empty series");
    SymbolSequence seq;
    try {
        seq = make_sequence(codes, alphabet);
    } catch (const validation_error& e) {
        throw validation_error("record '" + id + "': " + e.what());
    }
    return NarrativeRecord{id, series, std::move(seq), text};
}

}  // namespace detail

/// Loads a sequence corpus. JSON Lines by default: one object per line with
/// fields id, series, sequence and optional text. Files ending in .csv are read
/// as CSV with a header row naming the same columns.
inline SeriesCorpus load_sequences(const std::filesystem::path& path, const Alphabet& alphabet) {
    std::string content = util::read_file(path);
    SeriesCorpus corpus(alphabet);
    std::vector<std::string> lines = util::split(content, '\n');
    const bool csv = path.extension() == ".csv";

    std::size_t lineno = 0;
    int id_col = -1, series_col = -1, seq_col = -1, text_col = -1;
    for (const std::string& raw : lines) {
        ++lineno;
        std::string line = util::trim(raw);
        if (line.empty()) continue;
        try {
            if (csv) {
                auto fields = detail::parse_csv_row(raw);
                if (id_col < 0) {  // header row
                    for (std::size_t i = 0; i < fields.size(); ++i) {
                        std::string h = util::trim(fields[i]);
                        if (h == "id") id_col = static_cast<int>(i);
                        else if (h == "series") series_col = static_cast<int>(i);
                        else if (h == "sequence") seq_col = static_cast<int>(i);
                        else if (h == "text") text_col = static_cast<int>(i);
                    }
                    if (id_col < 0 || series_col < 0 || seq_col < 0)
                        throw validation_error("header must name id, series and sequence columns");
                    continue;
                }
                auto need = [&](int col) -> std::string {
                    if (col >= static_cast<int>(fields.size()))
                        throw validation_error("row has too few columns");
                    return fields[static_cast<std::size_t>(col)];
                };
                std::optional<std::string> text;
                if (text_col >= 0 && text_col < static_cast<int>(fields.size()) &&
                    !fields[static_cast<std::size_t>(text_col)].empty())
                    text = fields[static_cast<std::size_t>(text_col)];
                corpus.add(detail::record_from_fields(need(id_col), need(series_col),
                                                      need(seq_col), text, alphabet));
            } else {
                nlohmann::json j = nlohmann::json::parse(line);
                std::optional<std::string> text;
                if (j.contains("text") && j["text"].is_string())
                    text = j["text"].get<std::string>();
                corpus.add(detail::record_from_fields(j.at("id").get<std::string>(),
                                                      j.at("series").get<std::string>(),
                                                      j.at("sequence").get<std::string>(), text,
                                                      alphabet));
            }
        } catch (const nlohmann::json::exception& e) {
            throw validation_error(path.string() + ":" + std::to_string(lineno) +
                                   ": malformed record: " + e.what());
        } catch (const validation_error& e) {
            throw validation_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return corpus;
}

inline void save_sequences(const std::filesystem::path& path,
                           const std::vector<NarrativeRecord>& records) {
    std::string out;
    for (const NarrativeRecord& r : records) {
        nlohmann::json j{{"id", r.id}, {"series", r.series}, {"sequence", r.sequence.codes}};
        if (r.text) j["text"] = *r.text;
        out += j.dump();
        out += '\n';
    }
    util::write_file(path, out);
}

/// Draws min(per_series, series size) records from every series without
/// replacement and relabels them as series "norm". Sampling is a pure function
/// of (corpus, per_series, seed): series are visited in sorted name order and
/// indices come from a single mt19937_64 stream. Record ids are prefixed with
/// their source series so they stay unique.
inline std::vector<NarrativeRecord> build_norm(const SeriesCorpus& corpus, std::size_t per_series,
                                               std::uint64_t seed,
                                               std::vector<std::string>* warnings = nullptr) {
    if (per_series < 1) throw validation_error("build_norm: per_series must be >= 1");
    if (corpus.total_records() == 0) throw validation_error("build_norm: empty corpus");

    std::vector<std::string> names(corpus.series_names());
    std::sort(names.begin(), names.end());

    std::mt19937_64 rng(seed);
    std::vector<NarrativeRecord> norm;
    for (const std::string& name : names) {
        const auto& recs = corpus.series(name);
        if (per_series > recs.size() && warnings)
            warnings->push_back("series '" + name + "' has only " + std::to_string(recs.size()) +
                                " records; taking all of them");
        for (std::size_t i : util::sample_without_replacement(recs.size(), per_series, rng)) {
            NarrativeRecord r = recs[i];
            r.id = name + "/" + r.id;
            r.series = "norm";
            norm.push_back(std::move(r));
        }
    }
    return norm;
}

struct LengthSummary {
    std::string series;
    std::size_t count = 0;
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    double median = 0.0;
    std::map<std::size_t, std::size_t> histogram;  // length -> number of sequences
};

struct LengthStats {
    std::vector<LengthSummary> per_series;
    LengthSummary pooled;
    std::vector<std::string> warnings;
};

namespace detail {

inline LengthSummary summarize_lengths(const std::string& series,
                                       std::vector<std::size_t> lengths) {
    LengthSummary s;
    s.series = series;
    s.count = lengths.size();
    if (lengths.empty()) return s;
    std::sort(lengths.begin(), lengths.end());
    s.min = lengths.front();
    s.max = lengths.back();
    double sum = 0;
    for (std::size_t l : lengths) {
        sum += static_cast<double>(l);
        ++s.histogram[l];
    }
    s.mean = sum / static_cast<double>(lengths.size());
    std::size_t mid = lengths.size() / 2;
    s.median = lengths.size() % 2 ? static_cast<double>(lengths[mid])
                                  : (static_cast<double>(lengths[mid - 1]) +
                                     static_cast<double>(lengths[mid])) / 2.0;
    return s;
}

}  // namespace detail

inline LengthStats length_stats(const SeriesCorpus& corpus) {
    if (corpus.total_records() == 0) throw validation_error("length_stats: empty corpus");
    LengthStats stats;
    std::vector<std::size_t> pooled;
    for (const std::string& name : corpus.series_names()) {
        const auto& recs = corpus.series(name);
        if (recs.empty()) {
            stats.warnings.push_back("series '" + name + "' is empty; excluded from summary");
            continue;
        }
        std::vector<std::size_t> lengths;
        lengths.reserve(recs.size());
        for (const auto& r : recs) lengths.push_back(r.sequence.size());
        pooled.insert(pooled.end(), lengths.begin(), lengths.end());
        stats.per_series.push_back(detail::summarize_lengths(name, std::move(lengths)));
    }
    stats.pooled = detail::summarize_lengths("all", std::move(pooled));
    return stats;
}

}  // namespace styleseq
