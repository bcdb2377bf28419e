#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "ctxasr/corpus.hpp"

namespace ctxasr {

/// CER for Japanese, Korean, and Thai; WER for the other eight languages.
enum class MetricKind { WER, CER };

const char* to_string(MetricKind kind);
MetricKind metric_for(Lang lang);

struct EditCounts {
    std::int64_t sub = 0;
    std::int64_t del = 0;
    std::int64_t ins = 0;

    std::int64_t total() const { return sub + del + ins; }
    bool operator==(const EditCounts&) const = default;
};

/// NFC, lowercase, drop Unicode punctuation, collapse whitespace, trim.
std::string normalize(std::string_view text, const LanguageCode& language);

/// WER: whitespace tokens. CER: whitespace removed, one token per grapheme.
std::vector<std::string> tokenize_for_metric(std::string_view text, MetricKind kind);

/// Minimal-cost alignment counts with unit costs. Ties are broken preferring
/// substitution, then deletion, then insertion, so (S, D, I) is deterministic.
EditCounts edit_distance(const std::vector<std::string>& ref_tokens,
                         const std::vector<std::string>& hyp_tokens);

struct GroupScore {
    std::string name; // language code, or "en-<accent>" when split
    MetricKind metric = MetricKind::WER;
    EditCounts errors;
    std::int64_t ref_tokens = 0;

    double rate() const {
        return ref_tokens > 0 ? static_cast<double>(errors.total()) /
                                    static_cast<double>(ref_tokens)
                              : 0.0;
    }
};

struct ScoreOptions {
    bool split_accents = true; // split en rows by accent tag when present
    bool raw = false;          // skip normalization
    bool macro = false;        // also report the macro-average over groups
};

struct ScoreReport {
    std::vector<GroupScore> groups; // sorted by name
    EditCounts total_errors;
    std::int64_t total_ref_tokens = 0;
    /// Segments whose reference normalized to the empty string; excluded
    /// from every rate but always reported.
    std::vector<std::string> excluded_empty_refs;
    std::optional<double> macro_mer;

    /// Pooled mix error rate: total errors over total reference tokens, each
    /// segment counted in its own metric unit.
    double mer() const {
        return total_ref_tokens > 0 ? static_cast<double>(total_errors.total()) /
                                          static_cast<double>(total_ref_tokens)
                                    : 0.0;
    }

    nlohmann::ordered_json to_json() const;
    std::string to_table() const;
};

/// Score a hypothesis map against manifest segments. Every manifest segment
/// must have a reference and a hypothesis, and every hypothesis id must be in
/// the manifest; mismatches raise with the offending ids listed.
ScoreReport score(const std::vector<Segment>& segments,
                  const std::unordered_map<std::string, std::string>& hypotheses,
                  const ScoreOptions& options = {});

/// File-level wrapper: hypotheses as JSON Lines with "id" and "text" keys
/// (decode output works as-is), manifest as for load_manifest.
ScoreReport score_files(const std::string& hypotheses_path, const std::string& manifest_path,
                        const ScoreOptions& options = {});

} // namespace ctxasr
