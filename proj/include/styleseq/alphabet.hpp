#pragma once

#include <array>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "styleseq/util.hpp"

namespace styleseq {

/// One choice in a finite choice system: a single printable code character
/// plus a human-readable label ("a" / "action").
struct Symbol {
    char code;
    std::string label;
};

/// A finite, ordered symbol system. Codes and labels are pairwise distinct and
/// iteration order is declaration order, so downstream output is stable.
/// Immutable after construction; safe to share across threads.
class Alphabet {
public:
    Alphabet(std::string name, std::vector<Symbol> symbols)
        : name_(std::move(name)), symbols_(std::move(symbols)) {
        if (symbols_.empty())
            throw validation_error("alphabet '" + name_ + "': needs at least one symbol");
        code_index_.fill(-1);
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            const Symbol& s = symbols_[i];
            if (std::isspace(static_cast<unsigned char>(s.code)) || s.code == '\0')
                throw validation_error("alphabet '" + name_ + "': code may not be whitespace");
            if (s.label.empty())
                throw validation_error("alphabet '" + name_ + "': empty label for code '" +
                                       std::string(1, s.code) + "'");
            if (code_index_[static_cast<unsigned char>(s.code)] >= 0)
                throw validation_error("alphabet '" + name_ + "': duplicate code '" +
                                       std::string(1, s.code) + "'");
            if (label_index_.count(s.label))
                throw validation_error("alphabet '" + name_ + "': duplicate label '" + s.label + "'");
            code_index_[static_cast<unsigned char>(s.code)] = static_cast<int>(i);
            label_index_[s.label] = static_cast<int>(i);
        }
    }

    const std::string& name() const { return name_; }
    const std::vector<Symbol>& symbols() const { return symbols_; }
    std::size_t size() const { return symbols_.size(); }

    bool has_code(char c) const { return code_index_[static_cast<unsigned char>(c)] >= 0; }
    bool has_label(const std::string& label) const { return label_index_.count(label) > 0; }

    char code_of(const std::string& label) const {
        auto it = label_index_.find(label);
        if (it == label_index_.end())
            throw validation_error("alphabet '" + name_ + "': unknown label '" + label + "'");
        return symbols_[static_cast<std::size_t>(it->second)].code;
    }

    const std::string& label_of(char code) const {
        int i = code_index_[static_cast<unsigned char>(code)];
        if (i < 0)
            throw validation_error("alphabet '" + name_ + "': unknown code '" +
                                   std::string(1, code) + "'");
        return symbols_[static_cast<std::size_t>(i)].label;
    }

private:
    std::string name_;
    std::vector<Symbol> symbols_;
    std::array<int, 256> code_index_{};
    std::map<std::string, int> label_index_;
};

/// A word over an alphabet, stored as the compact code string ("amv").
struct SymbolSequence {
    std::string alphabet_name;
    std::string codes;

    std::size_t size() const { return codes.size(); }
    bool empty() const { return codes.empty(); }
    bool operator==(const SymbolSequence&) const = default;
};

inline Alphabet build_alphabet(std::string name,
                               const std::vector<std::pair<char, std::string>>& entries) {
    if (entries.empty())
        throw validation_error("alphabet '" + name + "': empty entry list");
    std::vector<Symbol> symbols;
    symbols.reserve(entries.size());
    for (const auto& [code, label] : entries) symbols.push_back({code, label});
    return Alphabet(std::move(name), std::move(symbols));
}

/// The default process-type alphabet shipped with the library.
inline Alphabet process_alphabet() {
    return build_alphabet("process",
                          {{'a', "action"}, {'m', "mental"}, {'v', "verbal"}, {'s', "state"}});
}

namespace detail {

/// 94 printable ASCII codes: letters first, then digits, then the remaining
/// punctuation in ascending byte order.
inline const std::string& default_code_pool() {
    static const std::string pool = [] {
        std::string p = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
        for (int c = 0x21; c <= 0x7e; ++c)
            if (p.find(static_cast<char>(c)) == std::string::npos) p.push_back(static_cast<char>(c));
        return p;
    }();
    return pool;
}

}  // namespace detail

using ProductCodeMap = std::vector<std::pair<std::pair<char, char>, char>>;

/// Cartesian product of two alphabets. Pair order is a-major, b-minor; labels
/// become "labelA+labelB". Default codes come from the printable pool; products
/// larger than the pool need an explicit code_map covering every pair.
inline Alphabet product(const Alphabet& a, const Alphabet& b,
                        const std::optional<ProductCodeMap>& code_map = std::nullopt) {
    const std::size_t n = a.size() * b.size();
    std::map<std::pair<char, char>, char> assigned;
    if (code_map) {
        for (const auto& [pair, code] : *code_map) assigned[pair] = code;
        if (assigned.size() != n)
            throw validation_error("product: code_map must cover all " + std::to_string(n) +
                                   " pairs exactly once");
    } else if (n > detail::default_code_pool().size()) {
        throw validation_error("product: " + std::to_string(n) +
                               " symbols exceed the printable code pool; supply a code_map");
    }

    std::vector<Symbol> symbols;
    symbols.reserve(n);
    std::size_t next = 0;
    for (const Symbol& sa : a.symbols()) {
        for (const Symbol& sb : b.symbols()) {
            char code;
            if (code_map) {
                auto it = assigned.find({sa.code, sb.code});
                if (it == assigned.end())
                    throw validation_error(std::string("product: code_map missing pair ('") +
                                           sa.code + "','" + sb.code + "')");
                code = it->second;
            } else {
                code = detail::default_code_pool()[next++];
            }
            symbols.push_back({code, sa.label + "+" + sb.label});
        }
    }
    return Alphabet(a.name() + "x" + b.name(), std::move(symbols));
}

inline SymbolSequence encode(const std::vector<std::string>& labels, const Alphabet& alphabet) {
    SymbolSequence seq{alphabet.name(), {}};
    seq.codes.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!alphabet.has_label(labels[i]))
            throw validation_error("encode: unknown label '" + labels[i] + "' at clause " +
                                   std::to_string(i));
        seq.codes.push_back(alphabet.code_of(labels[i]));
    }
    return seq;
}

inline std::vector<std::string> decode(const SymbolSequence& seq, const Alphabet& alphabet) {
    std::vector<std::string> labels;
    labels.reserve(seq.codes.size());
    for (std::size_t i = 0; i < seq.codes.size(); ++i) {
        if (!alphabet.has_code(seq.codes[i]))
            throw validation_error("decode: unknown code '" + std::string(1, seq.codes[i]) +
                                   "' at position " + std::to_string(i));
        labels.push_back(alphabet.label_of(seq.codes[i]));
    }
    return labels;
}

/// Validates a raw code string against the alphabet and wraps it.
inline SymbolSequence make_sequence(std::string codes, const Alphabet& alphabet) {
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!alphabet.has_code(codes[i]))
            throw validation_error("sequence: unknown code '" + std::string(1, codes[i]) +
                                   "' at position " + std::to_string(i));
    }
    return SymbolSequence{alphabet.name(), std::move(codes)};
}

/// Alphabet declaration file: '#' comments, a "name = <alphabet>" header line,
/// then one "<code> = <label>" line per symbol in declaration order.
inline Alphabet load_alphabet(const std::filesystem::path& path) {
    std::string content = util::read_file(path);
    std::string name;
    std::vector<std::pair<char, std::string>> entries;
    std::size_t lineno = 0;
    for (const std::string& raw : util::split(content, '\n')) {
        ++lineno;
        std::string line = util::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error(path.string() + ":" + std::to_string(lineno) +
                                   ": expected 'key = value'");
        std::string key = util::trim(line.substr(0, eq));
        std::string value = util::trim(line.substr(eq + 1));
        if (key == "name") {
            name = value;
        } else if (key.size() == 1) {
            entries.emplace_back(key[0], value);
        } else {
            throw validation_error(path.string() + ":" + std::to_string(lineno) +
                                   ": code must be a single character, got '" + key + "'");
        }
    }
    if (name.empty())
        throw validation_error(path.string() + ": missing 'name = ...' header");
    return build_alphabet(name, entries);
}

}  // namespace styleseq
