#include "ctxasr/scoring.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "ctxasr/errors.hpp"
#include "ctxasr/io.hpp"
#include "ctxasr/unicode.hpp"

namespace ctxasr {

namespace {

struct Cell {
    std::int64_t dist = 0;
    EditCounts counts;
};

std::string group_name(const Segment& seg, bool split_accents) {
    std::string name = to_string(seg.language.code);
    if (split_accents && seg.language.accent) {
        name += '-';
        name += *seg.language.accent;
    }
    return name;
}

} // namespace

const char* to_string(MetricKind kind) {
    return kind == MetricKind::WER ? "WER" : "CER";
}

MetricKind metric_for(Lang lang) {
    switch (lang) {
        case Lang::ja:
        case Lang::ko:
        case Lang::th:
            return MetricKind::CER;
        default:
            return MetricKind::WER;
    }
}

std::string normalize(std::string_view text, const LanguageCode&) {
    std::string out = nfc(text);
    out = to_lower(out);
    out = strip_punctuation(out);
    return collapse_whitespace(out); // collapses runs and trims the ends
}

std::vector<std::string> tokenize_for_metric(std::string_view text, MetricKind kind) {
    if (kind == MetricKind::WER) return split_whitespace(text);
    std::string compact = remove_whitespace(text);
    std::vector<std::string> tokens;
    for (auto unit : graphemes(compact)) tokens.emplace_back(unit);
    return tokens;
}

EditCounts edit_distance(const std::vector<std::string>& ref_tokens,
                         const std::vector<std::string>& hyp_tokens) {
    const std::size_t m = ref_tokens.size();
    const std::size_t n = hyp_tokens.size();

    // Two-row DP carrying (S, D, I) along the tie-broken path; forward
    // choices with priority substitution > deletion > insertion reproduce the
    // standard backtrace order without the full table.
    std::vector<Cell> prev(n + 1), cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        prev[j].dist = static_cast<std::int64_t>(j);
        prev[j].counts.ins = static_cast<std::int64_t>(j);
    }
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0].dist = static_cast<std::int64_t>(i);
        cur[0].counts = {0, static_cast<std::int64_t>(i), 0};
        for (std::size_t j = 1; j <= n; ++j) {
            const bool match = ref_tokens[i - 1] == hyp_tokens[j - 1];
            const std::int64_t diag = prev[j - 1].dist + (match ? 0 : 1);
            const std::int64_t up = prev[j].dist + 1;   // deletion
            const std::int64_t left = cur[j - 1].dist + 1; // insertion
            const std::int64_t best = std::min({diag, up, left});
            if (diag == best) {
                cur[j].counts = prev[j - 1].counts;
                if (!match) ++cur[j].counts.sub;
            } else if (up == best) {
                cur[j].counts = prev[j].counts;
                ++cur[j].counts.del;
            } else {
                cur[j].counts = cur[j - 1].counts;
                ++cur[j].counts.ins;
            }
            cur[j].dist = best;
        }
        std::swap(prev, cur);
    }
    return prev[n].counts;
}

ScoreReport score(const std::vector<Segment>& segments,
                  const std::unordered_map<std::string, std::string>& hypotheses,
                  const ScoreOptions& options) {
    std::vector<std::string> missing_hyp;
    std::vector<std::string> missing_ref;
    std::set<std::string> manifest_ids;
    for (const auto& seg : segments) {
        manifest_ids.insert(seg.id);
        if (!seg.reference_text) missing_ref.push_back(seg.id);
        if (!hypotheses.count(seg.id)) missing_hyp.push_back(seg.id);
    }
    std::vector<std::string> unknown_hyp;
    for (const auto& [id, text] : hypotheses) {
        if (!manifest_ids.count(id)) unknown_hyp.push_back(id);
    }
    std::sort(unknown_hyp.begin(), unknown_hyp.end());

    auto join = [](const std::vector<std::string>& ids) {
        std::string out;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i) out += ", ";
            out += ids[i];
        }
        return out;
    };
    if (!missing_ref.empty()) {
        throw DataError("segments without reference text: " + join(missing_ref));
    }
    if (!missing_hyp.empty()) {
        throw DataError("segments without a hypothesis: " + join(missing_hyp));
    }
    if (!unknown_hyp.empty()) {
        throw DataError("hypotheses for ids not in the manifest: " + join(unknown_hyp));
    }

    ScoreReport report;
    std::map<std::string, GroupScore> by_group;
    for (const auto& seg : segments) {
        const MetricKind kind = metric_for(seg.language.code);
        std::string ref = *seg.reference_text;
        std::string hyp = hypotheses.at(seg.id);
        if (!options.raw) {
            ref = normalize(ref, seg.language);
            hyp = normalize(hyp, seg.language);
        }
        const auto ref_tokens = tokenize_for_metric(ref, kind);
        if (ref_tokens.empty()) {
            report.excluded_empty_refs.push_back(seg.id);
            continue;
        }
        const auto hyp_tokens = tokenize_for_metric(hyp, kind);
        const EditCounts counts = edit_distance(ref_tokens, hyp_tokens);

        const std::string name = group_name(seg, options.split_accents);
        auto [it, inserted] = by_group.try_emplace(name);
        GroupScore& group = it->second;
        if (inserted) {
            group.name = name;
            group.metric = kind;
        }
        group.errors.sub += counts.sub;
        group.errors.del += counts.del;
        group.errors.ins += counts.ins;
        group.ref_tokens += static_cast<std::int64_t>(ref_tokens.size());

        report.total_errors.sub += counts.sub;
        report.total_errors.del += counts.del;
        report.total_errors.ins += counts.ins;
        report.total_ref_tokens += static_cast<std::int64_t>(ref_tokens.size());
    }

    for (auto& [name, group] : by_group) report.groups.push_back(std::move(group));
    std::sort(report.excluded_empty_refs.begin(), report.excluded_empty_refs.end());

    if (options.macro && !report.groups.empty()) {
        double sum = 0.0;
        for (const auto& g : report.groups) sum += g.rate();
        report.macro_mer = sum / static_cast<double>(report.groups.size());
    }
    return report;
}

ScoreReport score_files(const std::string& hypotheses_path, const std::string& manifest_path,
                        const ScoreOptions& options) {
    const auto segments = load_manifest(manifest_path);

    std::unordered_map<std::string, std::string> hyps;
    for (const auto& [line_no, line] : read_jsonl_lines(hypotheses_path)) {
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(hypotheses_path + " line " + std::to_string(line_no) +
                            ": malformed JSON: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
            !obj.contains("text") || !obj["text"].is_string()) {
            throw DataError(hypotheses_path + " line " + std::to_string(line_no) +
                            ": expected object with string \"id\" and \"text\"");
        }
        const std::string id = obj["id"].get<std::string>();
        if (!hyps.emplace(id, obj["text"].get<std::string>()).second) {
            throw DataError(hypotheses_path + " line " + std::to_string(line_no) +
                            ": duplicate hypothesis for id \"" + id + "\"");
        }
    }
    return score(segments, hyps, options);
}

nlohmann::ordered_json ScoreReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : groups) {
        nlohmann::ordered_json row;
        row["name"] = g.name;
        row["metric"] = to_string(g.metric);
        row["errors"] = {{"sub", g.errors.sub}, {"del", g.errors.del}, {"ins", g.errors.ins}};
        row["ref_tokens"] = g.ref_tokens;
        row["rate"] = g.rate();
        doc["groups"].push_back(std::move(row));
    }
    doc["mer"] = mer();
    if (macro_mer) doc["macro_mer"] = *macro_mer;
    if (!excluded_empty_refs.empty()) doc["excluded_empty_refs"] = excluded_empty_refs;
    return doc;
}

std::string ScoreReport::to_table() const {
    std::ostringstream out;
    out << std::left << std::setw(22) << "group" << std::setw(8) << "metric" << std::right
        << std::setw(8) << "sub" << std::setw(8) << "del" << std::setw(8) << "ins"
        << std::setw(12) << "ref_tokens" << std::setw(10) << "rate" << '\n';
    out << std::string(76, '-') << '\n';
    for (const auto& g : groups) {
        out << std::left << std::setw(22) << g.name << std::setw(8) << to_string(g.metric)
            << std::right << std::setw(8) << g.errors.sub << std::setw(8) << g.errors.del
            << std::setw(8) << g.errors.ins << std::setw(12) << g.ref_tokens << std::setw(10)
            << std::fixed << std::setprecision(4) << g.rate() << '\n';
    }
    out << std::string(76, '-') << '\n';
    out << std::left << std::setw(66) << "MER (pooled)" << std::right << std::setw(10)
        << std::fixed << std::setprecision(4) << mer() << '\n';
    if (macro_mer) {
        out << std::left << std::setw(66) << "MER (macro over groups)" << std::right
            << std::setw(10) << std::fixed << std::setprecision(4) << *macro_mer << '\n';
    }
    if (!excluded_empty_refs.empty()) {
        out << "excluded (empty reference after normalization):";
        for (const auto& id : excluded_empty_refs) out << ' ' << id;
        out << '\n';
    }
    return out.str();
}

} // namespace ctxasr
