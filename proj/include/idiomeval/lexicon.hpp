#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "idiomeval/error.hpp"
#include "idiomeval/normalize.hpp"

namespace idiomeval {

/// Many-to-many word translation map. All keys and values are stored in
/// normalized form; lookups normalize on the way in, so the table is
/// case- and accent-insensitive. Immutable after loading.
class BilingualLexicon {
  public:
    BilingualLexicon() = default;

    void add(std::string_view source, std::string_view target) {
        const std::string s = normalize(source);
        const std::string t = normalize(target);
        if (s.empty() || t.empty()) return;
        entries_[s].insert(t);
    }

    /// Translations of `word`; the empty set for out-of-vocabulary words.
    const std::set<std::string>& lookup(std::string_view word) const {
        static const std::set<std::string> empty;
        const auto it = entries_.find(normalize(word));
        return it == entries_.end() ? empty : it->second;
    }

    bool contains(std::string_view word) const {
        return entries_.find(normalize(word)) != entries_.end();
    }

    std::size_t source_vocab_size() const { return entries_.size(); }

    std::size_t pair_count() const {
        std::size_t n = 0;
        for (const auto& [s, ts] : entries_) n += ts.size();
        return n;
    }

    std::size_t skipped_lines() const { return skipped_lines_; }

    const std::map<std::string, std::set<std::string>>& entries() const { return entries_; }

    /// Parses MUSE-layout dictionary text: one "source target" pair per
    /// line, whitespace separated. Lines with any other field count are
    /// skipped and tallied.
    static BilingualLexicon parse(std::istream& in) {
        BilingualLexicon lex;
        std::string line;
        std::size_t valid = 0;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::istringstream fields(line);
            std::string src, tgt, extra;
            if (!(fields >> src >> tgt) || (fields >> extra)) {
                if (!line.empty()) ++lex.skipped_lines_;
                continue;
            }
            lex.add(src, tgt);
            ++valid;
        }
        if (valid == 0) throw input_error("dictionary contains no valid entries");
        return lex;
    }

    static BilingualLexicon load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw input_error("cannot open dictionary file: " + path);
        try {
            return parse(in);
        } catch (const input_error&) {
            throw input_error("dictionary contains no valid entries: " + path);
        }
    }

    void save(std::ostream& out) const {
        for (const auto& [s, ts] : entries_)
            for (const auto& t : ts) out << s << ' ' << t << '\n';
    }

  private:
    std::map<std::string, std::set<std::string>> entries_;
    std::size_t skipped_lines_ = 0;
};

}  // namespace idiomeval
