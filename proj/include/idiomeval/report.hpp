#pragma once

#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idiomeval/apt_eval.hpp"
#include "idiomeval/litter.hpp"

namespace idiomeval {

inline constexpr std::string_view kReportFormatVersion = "1";

/// Everything one evaluation run produced. Sections for metrics that were
/// not requested stay unset and are omitted from the serialized report.
struct EvalReport {
    std::size_t pair_count = 0;
    std::size_t annotated_count = 0;
    std::optional<LitterResult> litter;
    std::optional<AptResult> apt;
    std::optional<double> bleu;
    std::optional<double> chrf;

    nlohmann::ordered_json summary_json() const {
        nlohmann::ordered_json j;
        j["kind"] = "summary";
        j["report_format"] = kReportFormatVersion;
        j["pairs"] = pair_count;
        j["annotated"] = annotated_count;
        if (litter) {
            j["litter"] = {{"macro", litter->macro},
                           {"micro", litter->micro},
                           {"evaluated", litter->evaluated_pairs},
                           {"triggered", litter->triggered_pairs},
                           {"unscorable", litter->unscorable_pairs},
                           {"oov_rate", litter->oov_rate}};
        }
        if (apt) {
            j["apt"] = {{"macro_uniprec", apt->macro_uniprec},
                        {"micro_uniprec", apt->micro_uniprec},
                        {"macro_chrf", apt->macro_chrf},
                        {"micro_chrf", apt->micro_chrf},
                        {"empty_ref_rate", apt->empty_ref_rate},
                        {"empty_hyp_rate", apt->empty_hyp_rate}};
        }
        if (bleu || chrf) {
            nlohmann::ordered_json g;
            if (bleu) g["bleu"] = *bleu;
            if (chrf) g["chrf"] = *chrf;
            j["global"] = std::move(g);
        }
        return j;
    }

    void write_jsonl(std::ostream& out) const {
        out << summary_json().dump() << '\n';

        // per-idiom lines, sorted by idiom id
        std::map<std::string, nlohmann::ordered_json> idiom_lines;
        if (litter) {
            for (const auto& [idiom, per] : litter->per_idiom) {
                auto& j = idiom_lines[idiom];
                j["kind"] = "idiom";
                j["idiom_id"] = idiom;
                j["n"] = per.evaluated;
                j["litter"] = per.rate();
            }
        }
        if (apt) {
            for (const auto& [idiom, per] : apt->per_idiom) {
                auto& j = idiom_lines[idiom];
                if (!j.contains("kind")) {
                    j["kind"] = "idiom";
                    j["idiom_id"] = idiom;
                    j["n"] = per.evaluated;
                }
                j["uniprec"] = per.uniprec();
                j["chrf"] = per.chrf();
            }
        }
        for (const auto& [idiom, j] : idiom_lines) out << j.dump() << '\n';

        // per-sentence diagnostics, corpus order
        std::map<std::string, const AptScore*> apt_by_id;
        if (apt)
            for (const auto& s : apt->scores) apt_by_id[s.pair_id] = &s;
        if (litter) {
            for (const auto& s : litter->sentences) {
                nlohmann::ordered_json j;
                j["kind"] = "sentence";
                j["pair_id"] = s.pair_id;
                j["idiom_id"] = s.idiom_id;
                j["triggered"] = s.triggered;
                auto trig = nlohmann::ordered_json::array();
                for (const auto& [hyp, src] : s.triggering_words)
                    trig.push_back({{"hypothesis_word", hyp}, {"source_word", src}});
                j["triggering"] = std::move(trig);
                j["active_blocklists"] = s.active_blocklists;
                j["unscorable"] = s.unscorable;
                j["oov_words"] = s.oov_words;
                if (s.multi_idiom) j["multi_idiom"] = true;
                if (const auto it = apt_by_id.find(s.pair_id); it != apt_by_id.end())
                    append_apt_fields(j, *it->second);
                out << j.dump() << '\n';
            }
        } else if (apt) {
            for (const auto& s : apt->scores) {
                nlohmann::ordered_json j;
                j["kind"] = "sentence";
                j["pair_id"] = s.pair_id;
                j["idiom_id"] = s.idiom_id;
                if (s.multi_idiom) j["multi_idiom"] = true;
                append_apt_fields(j, s);
                out << j.dump() << '\n';
            }
        }
    }

  private:
    static void append_apt_fields(nlohmann::ordered_json& j, const AptScore& s) {
        if (s.uniprec) j["uniprec"] = *s.uniprec;
        if (s.chrf) j["chrf"] = *s.chrf;
        j["empty_ref"] = s.empty_ref;
        j["empty_hyp"] = s.empty_hyp;
    }
};

// ---------------------------------------------------------------------------
// rendering a serialized report

namespace detail {

inline std::string fmt3(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << j[key].get<double>();
    return os.str();
}

}  // namespace detail

/// Renders a line-delimited report as a human-readable summary plus a
/// per-idiom score table.
inline void render_report_table(std::istream& in, std::ostream& out) {
    std::string line;
    std::vector<nlohmann::json> idioms;
    nlohmann::json summary;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("kind")) continue;
        if (j["kind"] == "summary") summary = j;
        if (j["kind"] == "idiom") idioms.push_back(std::move(j));
    }
    if (summary.is_object()) {
        out << "pairs: " << summary.value("pairs", 0)
            << "  annotated: " << summary.value("annotated", 0) << '\n';
        if (summary.contains("litter")) {
            const auto& l = summary["litter"];
            out << "LitTER   macro " << detail::fmt3(l, "macro") << "  micro "
                << detail::fmt3(l, "micro") << "  (unscorable " << l.value("unscorable", 0)
                << ", oov_rate " << detail::fmt3(l, "oov_rate") << ")\n";
        }
        if (summary.contains("apt")) {
            const auto& a = summary["apt"];
            out << "APT      macro uniprec " << detail::fmt3(a, "macro_uniprec")
                << "  macro chrf " << detail::fmt3(a, "macro_chrf") << "  (empty ref "
                << detail::fmt3(a, "empty_ref_rate") << ", empty hyp "
                << detail::fmt3(a, "empty_hyp_rate") << ")\n";
        }
        if (summary.contains("global")) {
            const auto& g = summary["global"];
            out << "Global  ";
            if (g.contains("bleu")) out << " BLEU " << detail::fmt3(g, "bleu");
            if (g.contains("chrf")) out << " ChrF " << detail::fmt3(g, "chrf");
            out << '\n';
        }
    }
    if (!idioms.empty()) {
        out << '\n';
        std::size_t width = 5;
        for (const auto& j : idioms) width = std::max(width, j.value("idiom_id", std::string()).size());
        out << std::left << std::setw(static_cast<int>(width)) << "idiom"
            << "  " << std::right << std::setw(4) << "n"
            << "  " << std::setw(6) << "litter"
            << "  " << std::setw(7) << "uniprec"
            << "  " << std::setw(6) << "chrf" << '\n';
        for (const auto& j : idioms) {
            out << std::left << std::setw(static_cast<int>(width))
                << j.value("idiom_id", std::string()) << "  " << std::right << std::setw(4)
                << j.value("n", 0) << "  " << std::setw(6) << detail::fmt3(j, "litter") << "  "
                << std::setw(7) << detail::fmt3(j, "uniprec") << "  " << std::setw(6)
                << detail::fmt3(j, "chrf") << '\n';
        }
    }
}

/// Plot-ready per-idiom TSV: idiom_id, n, litter, uniprec, chrf.
inline void render_report_tsv(std::istream& in, std::ostream& out) {
    out << "idiom_id\tn\tlitter\tuniprec\tchrf\n";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || j.value("kind", "") != "idiom") continue;
        auto field = [&](const char* key) -> std::string {
            if (!j.contains(key)) return "";
            std::ostringstream os;
            os << std::setprecision(17) << j[key].get<double>();
            return os.str();
        };
        out << j.value("idiom_id", std::string()) << '\t' << j.value("n", 0) << '\t'
            << field("litter") << '\t' << field("uniprec") << '\t' << field("chrf") << '\n';
    }
}

}  // namespace idiomeval
