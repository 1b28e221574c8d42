#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idiomeval/error.hpp"

namespace idiomeval {

using SentencePair = std::pair<std::vector<std::string>, std::vector<std::string>>;

inline constexpr std::string_view kNullToken = "<NULL>";

/// Lexical translation probabilities t(target | source) with a NULL source
/// token. Rows are normalized after every M-step; `lambda` records the
/// diagonal prior strength the table was trained with (0 = uniform prior).
class TranslationTable {
  public:
    double prob(std::string_view source, std::string_view target) const {
        const auto s = src_index_.find(std::string(source));
        if (s == src_index_.end()) return 0.0;
        const auto t = tgt_index_.find(std::string(target));
        if (t == tgt_index_.end()) return 0.0;
        const auto& row = rows_[s->second];
        const auto it = row.find(t->second);
        return it == row.end() ? 0.0 : it->second;
    }

    double lambda() const { return lambda_; }
    const std::vector<double>& iteration_loglik() const { return loglik_; }
    std::size_t source_vocab_size() const { return src_vocab_.size(); }

    /// Entries as (source, target, probability), sorted; NULL spelled <NULL>.
    std::vector<std::tuple<std::string, std::string, double>> entries() const {
        std::vector<std::tuple<std::string, std::string, double>> out;
        for (const auto& [s, sid] : src_index_)
            for (const auto& [tid, p] : rows_[sid]) out.emplace_back(s, tgt_vocab_[tid], p);
        return out;
    }

    void save(std::ostream& out) const {
        out << "# lambda " << std::setprecision(17) << lambda_ << '\n';
        for (const auto& [s, t, p] : entries())
            out << s << ' ' << t << ' ' << std::setprecision(17) << p << '\n';
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw input_error("cannot open output file: " + path);
        save(out);
    }

    static TranslationTable load_stream(std::istream& in) {
        TranslationTable table;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line.front() == '#') {
                std::istringstream hdr(line.substr(1));
                std::string key;
                double value = 0.0;
                if (hdr >> key >> value && key == "lambda") table.lambda_ = value;
                continue;
            }
            std::istringstream fields(line);
            std::string s, t;
            double p = 0.0;
            if (!(fields >> s >> t >> p)) throw input_error("malformed table line: " + line);
            table.rows_[table.src_id(s)][table.tgt_id(t)] = p;
        }
        return table;
    }

    static TranslationTable load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw input_error("cannot open table file: " + path);
        return load_stream(in);
    }

  private:
    friend TranslationTable train_aligner(const std::vector<SentencePair>&, int, double, double);

    int src_id(const std::string& w) {
        const auto [it, inserted] = src_index_.emplace(w, static_cast<int>(src_vocab_.size()));
        if (inserted) {
            src_vocab_.push_back(w);
            rows_.emplace_back();
        }
        return it->second;
    }

    int tgt_id(const std::string& w) {
        const auto [it, inserted] = tgt_index_.emplace(w, static_cast<int>(tgt_vocab_.size()));
        if (inserted) tgt_vocab_.push_back(w);
        return it->second;
    }

    std::vector<std::string> src_vocab_;
    std::vector<std::string> tgt_vocab_;
    std::map<std::string, int> src_index_;
    std::map<std::string, int> tgt_index_;
    std::vector<std::map<int, double>> rows_;  // source id -> target id -> prob
    double lambda_ = 0.0;
    std::vector<double> loglik_;
};

/// Fixed probability mass of the NULL source token in the alignment prior.
inline constexpr double kNullProb = 0.08;

namespace detail {

// Alignment prior over source positions {NULL, 1..n} for target position j
// (0-based) in a target sentence of length m. NULL keeps the fixed mass
// kNullProb; the real positions share the rest proportionally to
// exp(-lambda * |i/n - (j+1)/m|). lambda = 0 is the uniform Model 1 prior.
inline std::vector<double> alignment_prior(std::size_t n, std::size_t j, std::size_t m,
                                           double lambda) {
    std::vector<double> weights(n + 1);
    weights[0] = kNullProb;
    if (n == 0) return weights;
    const double jr = static_cast<double>(j + 1) / static_cast<double>(m);
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double ir = static_cast<double>(i) / static_cast<double>(n);
        weights[i] = std::exp(-lambda * std::abs(ir - jr));
        sum += weights[i];
    }
    for (std::size_t i = 1; i <= n; ++i) weights[i] *= (1.0 - kNullProb) / sum;
    return weights;
}

}  // namespace detail

/// Model 1 expectation-maximization over a tokenized bitext, with uniform
/// initialization, a NULL source token, add-alpha smoothing of the expected
/// counts and an optional diagonal alignment prior. Each iteration's corpus
/// log-likelihood (measured with the table entering the iteration) is kept.
inline TranslationTable train_aligner(const std::vector<SentencePair>& bitext, int iterations,
                                      double alpha, double lambda) {
    if (bitext.empty()) throw input_error("empty bitext");
    if (iterations < 1) throw input_error("iterations must be >= 1");
    if (alpha < 0.0) throw input_error("smoothing alpha must be >= 0");
    if (lambda < 0.0) throw input_error("lambda must be >= 0");

    TranslationTable table;
    table.lambda_ = lambda;
    table.src_id(std::string(kNullToken));  // id 0

    // encode sentences and collect co-occurrence support
    std::vector<std::pair<std::vector<int>, std::vector<int>>> encoded;
    encoded.reserve(bitext.size());
    for (const auto& [src, tgt] : bitext) {
        std::vector<int> s, t;
        s.reserve(src.size());
        t.reserve(tgt.size());
        for (const auto& w : src) s.push_back(table.src_id(w));
        for (const auto& w : tgt) t.push_back(table.tgt_id(w));
        for (int tid : t) {
            table.rows_[0][tid] = 1.0;
            for (int sid : s) table.rows_[sid][tid] = 1.0;
        }
        encoded.emplace_back(std::move(s), std::move(t));
    }
    for (auto& row : table.rows_) {
        const double uniform = row.empty() ? 0.0 : 1.0 / static_cast<double>(row.size());
        for (auto& [tid, p] : row) p = uniform;
    }

    std::vector<std::map<int, double>> counts(table.rows_.size());
    for (int iter = 0; iter < iterations; ++iter) {
        for (auto& c : counts) c.clear();
        double loglik = 0.0;

        for (const auto& [src, tgt] : encoded) {
            const std::size_t n = src.size();
            const std::size_t m = tgt.size();
            if (m == 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                const auto prior = detail::alignment_prior(n, j, m, lambda);
                const int tid = tgt[j];
                double denom = prior[0] * table.rows_[0][tid];
                for (std::size_t i = 0; i < n; ++i)
                    denom += prior[i + 1] * table.rows_[src[i]][tid];
                if (denom <= 0.0) continue;
                loglik += std::log(denom);
                counts[0][tid] += prior[0] * table.rows_[0][tid] / denom;
                for (std::size_t i = 0; i < n; ++i)
                    counts[src[i]][tid] += prior[i + 1] * table.rows_[src[i]][tid] / denom;
            }
        }
        table.loglik_.push_back(loglik);

        for (std::size_t sid = 0; sid < counts.size(); ++sid) {
            auto& row = table.rows_[sid];
            if (row.empty()) continue;
            double total = alpha * static_cast<double>(row.size());
            for (const auto& [tid, c] : counts[sid]) total += c;
            if (total <= 0.0) continue;
            for (auto& [tid, p] : row) {
                const auto it = counts[sid].find(tid);
                const double c = it == counts[sid].end() ? 0.0 : it->second;
                p = (c + alpha) / total;
            }
        }
    }
    return table;
}

inline TranslationTable train_model1(const std::vector<SentencePair>& bitext, int iterations,
                                     double smoothing_alpha = 0.01) {
    return train_aligner(bitext, iterations, smoothing_alpha, 0.0);
}

inline TranslationTable train_diag(const std::vector<SentencePair>& bitext, int iterations,
                                   double lambda = 4.0, double smoothing_alpha = 0.01) {
    return train_aligner(bitext, iterations, smoothing_alpha, lambda);
}

// ---------------------------------------------------------------------------
// alignments

enum class AlignDirection { src_to_tgt, tgt_to_src, symmetrized };

/// Word alignment links for one sentence pair, always stored as
/// (source index, target index) regardless of alignment direction.
struct AlignmentSet {
    std::string pair_id;
    std::set<std::pair<std::size_t, std::size_t>> links;
    AlignDirection direction = AlignDirection::src_to_tgt;
};

/// Viterbi alignment: each target word links to its most probable source
/// word under prior * t(target|source); NULL wins ties and emits no link,
/// ties between source words go to the smaller index.
inline AlignmentSet align_pair(const TranslationTable& table,
                               const std::vector<std::string>& source_tokens,
                               const std::vector<std::string>& target_tokens,
                               std::string pair_id = {}) {
    AlignmentSet out;
    out.pair_id = std::move(pair_id);
    const std::size_t n = source_tokens.size();
    const std::size_t m = target_tokens.size();
    for (std::size_t j = 0; j < m; ++j) {
        const auto prior = detail::alignment_prior(n, j, m, table.lambda());
        double best = prior[0] * table.prob(kNullToken, target_tokens[j]);
        std::size_t best_i = static_cast<std::size_t>(-1);
        for (std::size_t i = 0; i < n; ++i) {
            const double score = prior[i + 1] * table.prob(source_tokens[i], target_tokens[j]);
            if (score > best) {
                best = score;
                best_i = i;
            }
        }
        if (best_i != static_cast<std::size_t>(-1)) out.links.emplace(best_i, j);
    }
    return out;
}

enum class SymHeuristic { intersection, union_, grow_diag_final_and };

inline SymHeuristic sym_heuristic_from_string(std::string_view s) {
    if (s == "intersection") return SymHeuristic::intersection;
    if (s == "union") return SymHeuristic::union_;
    if (s == "grow-diag-final-and" || s == "gdfa") return SymHeuristic::grow_diag_final_and;
    throw input_error("unknown symmetrization heuristic: " + std::string(s));
}

/// Combines forward and reverse directional alignments of the same pair.
/// intersection ⊆ grow-diag-final-and ⊆ union holds by construction.
inline AlignmentSet symmetrize(const AlignmentSet& fwd, const AlignmentSet& rev,
                               SymHeuristic heuristic) {
    if (fwd.pair_id != rev.pair_id) throw input_error("symmetrize: alignment pair mismatch");
    using Link = std::pair<std::size_t, std::size_t>;
    std::set<Link> inter;
    std::set<Link> uni(fwd.links.begin(), fwd.links.end());
    uni.insert(rev.links.begin(), rev.links.end());
    std::set_intersection(fwd.links.begin(), fwd.links.end(), rev.links.begin(), rev.links.end(),
                          std::inserter(inter, inter.begin()));

    AlignmentSet out;
    out.pair_id = fwd.pair_id;
    out.direction = AlignDirection::symmetrized;
    if (heuristic == SymHeuristic::intersection) {
        out.links = std::move(inter);
        return out;
    }
    if (heuristic == SymHeuristic::union_) {
        out.links = std::move(uni);
        return out;
    }

    // grow-diag-final-and (Koehn et al.): grow the intersection into the
    // union through the 8-neighborhood, then add union links of the
    // originating direction whose source and target are both unaligned.
    std::set<Link> alignment = inter;
    std::set<std::size_t> src_aligned, tgt_aligned;
    for (const auto& [i, j] : alignment) {
        src_aligned.insert(i);
        tgt_aligned.insert(j);
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [i, j] : std::set<Link>(alignment)) {
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if ((di < 0 && i == 0) || (dj < 0 && j == 0)) continue;
                    const Link cand{i + static_cast<std::size_t>(di),
                                    j + static_cast<std::size_t>(dj)};
                    if (!uni.count(cand) || alignment.count(cand)) continue;
                    if (src_aligned.count(cand.first) && tgt_aligned.count(cand.second)) continue;
                    alignment.insert(cand);
                    src_aligned.insert(cand.first);
                    tgt_aligned.insert(cand.second);
                    grew = true;
                }
            }
        }
    }
    for (const auto& direction : {fwd.links, rev.links}) {
        for (const auto& [i, j] : direction) {
            if (alignment.count({i, j})) continue;
            if (src_aligned.count(i) || tgt_aligned.count(j)) continue;
            alignment.insert({i, j});
            src_aligned.insert(i);
            tgt_aligned.insert(j);
        }
    }
    out.links = std::move(alignment);
    return out;
}

// ---------------------------------------------------------------------------
// Pharaoh format: one line per sentence pair, space-separated "i-j" links,
// 0-indexed, source index first.

inline void write_pharaoh(const std::vector<AlignmentSet>& alignments, std::ostream& out) {
    for (const auto& a : alignments) {
        bool first = true;
        for (const auto& [i, j] : a.links) {
            if (!first) out << ' ';
            out << i << '-' << j;
            first = false;
        }
        out << '\n';
    }
}

inline void write_pharaoh(const std::vector<AlignmentSet>& alignments, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open output file: " + path);
    write_pharaoh(alignments, out);
}

inline std::vector<AlignmentSet> read_pharaoh(std::istream& in,
                                              AlignDirection direction = AlignDirection::symmetrized) {
    std::vector<AlignmentSet> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        AlignmentSet a;
        a.direction = direction;
        std::istringstream fields(line);
        std::string link;
        while (fields >> link) {
            const auto dash = link.find('-');
            if (dash == std::string::npos || dash == 0 || dash + 1 == link.size())
                throw input_error("pharaoh line " + std::to_string(line_no) +
                                  ": malformed link \"" + link + "\"");
            std::size_t i = 0, j = 0;
            try {
                i = std::stoul(link.substr(0, dash));
                j = std::stoul(link.substr(dash + 1));
            } catch (const std::exception&) {
                throw input_error("pharaoh line " + std::to_string(line_no) +
                                  ": malformed link \"" + link + "\"");
            }
            a.links.emplace(i, j);
        }
        out.push_back(std::move(a));
    }
    return out;
}

inline std::vector<AlignmentSet> read_pharaoh(const std::string& path,
                                              AlignDirection direction = AlignDirection::symmetrized) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open alignment file: " + path);
    return read_pharaoh(in, direction);
}

}  // namespace idiomeval
