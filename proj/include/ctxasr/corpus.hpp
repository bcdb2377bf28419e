#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ctxasr {

/// The eleven corpus languages.
enum class Lang { en, fr, de, it, ja, ko, pt, ru, es, th, vi };

constexpr std::size_t kLangCount = 11;

const char* to_string(Lang lang);
std::optional<Lang> parse_lang(std::string_view code);
std::vector<Lang> all_langs();

/// Language code plus an optional accent tag; accents are metadata and only
/// valid for English.
struct LanguageCode {
    Lang code = Lang::en;
    std::optional<std::string> accent;

    bool operator==(const LanguageCode&) const = default;
};

/// One utterance of a two-speaker dialogue turn.
struct Segment {
    std::string id;
    std::string conversation_id;
    int turn_index = 0;
    LanguageCode language;
    std::string audio_ref;
    std::optional<std::string> reference_text;
    std::optional<std::string> speaker;
    /// Unknown manifest keys, preserved in order for round trips.
    nlohmann::ordered_json extras = nlohmann::ordered_json::object();
};

/// Segments of one conversation, sorted by turn_index, indices contiguous
/// from zero.
struct Conversation {
    std::string id;
    LanguageCode language;
    std::vector<Segment> segments;
};

/// History/future text for one segment. A side is absent (not empty) when the
/// corresponding neighbor turn does not exist.
struct ContextWindow {
    std::optional<std::string> history;
    std::optional<std::string> future;

    bool operator==(const ContextWindow&) const = default;
};

/// Resolves a segment id to its text; returns nullopt when unknown.
using TextSource = std::function<std::optional<std::string>(const std::string& segment_id)>;

/// Load a JSON Lines manifest. Validates language codes, accent placement,
/// and (conversation_id, turn_index) / id uniqueness; errors carry the line
/// number. Unknown keys are kept on each segment.
std::vector<Segment> load_manifest(const std::string& path);

/// Parse one manifest line (exposed for streaming callers); line_no is used
/// in error messages only.
Segment parse_manifest_line(std::string_view line, std::size_t line_no);

/// Serialize a segment in the canonical key order:
/// id, conversation_id, turn_index, language, accent, audio, text, speaker,
/// then any preserved unknown keys.
std::string segment_to_json_line(const Segment& segment);

/// Write a manifest; output round-trips byte-for-byte through load_manifest.
void save_manifest(const std::vector<Segment>& segments, const std::string& path);

/// Group validated segments into conversations sorted by conversation id,
/// enforcing turn_index contiguity (0..n-1 per conversation).
std::vector<Conversation> group_conversations(const std::vector<Segment>& segments);

/// Context window for one turn: history from turn_index-1, future from
/// turn_index+1, each absent when the neighbor does not exist. Throws when
/// text_source cannot resolve an existing neighbor.
ContextWindow neighbors(const Conversation& conversation, int turn_index,
                        const TextSource& text_source);

} // namespace ctxasr
