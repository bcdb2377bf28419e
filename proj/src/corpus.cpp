#include "ctxasr/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ctxasr/errors.hpp"
#include "ctxasr/io.hpp"

namespace ctxasr {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::unordered_map<std::string_view, Lang>& lang_table() {
    static const std::unordered_map<std::string_view, Lang> table = {
        {"en", Lang::en}, {"fr", Lang::fr}, {"de", Lang::de}, {"it", Lang::it},
        {"ja", Lang::ja}, {"ko", Lang::ko}, {"pt", Lang::pt}, {"ru", Lang::ru},
        {"es", Lang::es}, {"th", Lang::th}, {"vi", Lang::vi},
    };
    return table;
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw DataError("manifest line " + std::to_string(line_no) + ": " + what);
}

std::optional<std::string> opt_string_field(const ordered_json& obj, const char* key,
                                            std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) line_error(line_no, std::string("\"") + key + "\" must be a string");
    return it->get<std::string>();
}

std::string string_field(const ordered_json& obj, const char* key, std::size_t line_no) {
    auto v = opt_string_field(obj, key, line_no);
    if (!v) line_error(line_no, std::string("missing required key \"") + key + "\"");
    return *v;
}

} // namespace

const char* to_string(Lang lang) {
    switch (lang) {
        case Lang::en: return "en";
        case Lang::fr: return "fr";
        case Lang::de: return "de";
        case Lang::it: return "it";
        case Lang::ja: return "ja";
        case Lang::ko: return "ko";
        case Lang::pt: return "pt";
        case Lang::ru: return "ru";
        case Lang::es: return "es";
        case Lang::th: return "th";
        case Lang::vi: return "vi";
    }
    return "??";
}

std::optional<Lang> parse_lang(std::string_view code) {
    auto it = lang_table().find(code);
    if (it == lang_table().end()) return std::nullopt;
    return it->second;
}

std::vector<Lang> all_langs() {
    return {Lang::en, Lang::fr, Lang::de, Lang::it, Lang::ja, Lang::ko,
            Lang::pt, Lang::ru, Lang::es, Lang::th, Lang::vi};
}

Segment parse_manifest_line(std::string_view line, std::size_t line_no) {
    ordered_json obj;
    try {
        obj = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        line_error(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) line_error(line_no, "record is not a JSON object");

    Segment seg;
    seg.id = string_field(obj, "id", line_no);
    seg.conversation_id = string_field(obj, "conversation_id", line_no);

    auto ti = obj.find("turn_index");
    if (ti == obj.end() || !ti->is_number_integer()) {
        line_error(line_no, "\"turn_index\" must be an integer");
    }
    const auto raw_index = ti->get<std::int64_t>();
    if (raw_index < 0) line_error(line_no, "\"turn_index\" must be non-negative");
    seg.turn_index = static_cast<int>(raw_index);

    const std::string code = string_field(obj, "language", line_no);
    auto lang = parse_lang(code);
    if (!lang) line_error(line_no, "unknown language code \"" + code + "\"");
    seg.language.code = *lang;
    seg.language.accent = opt_string_field(obj, "accent", line_no);
    if (seg.language.accent && seg.language.code != Lang::en) {
        line_error(line_no, "accent tag is only valid for language \"en\"");
    }

    seg.audio_ref = string_field(obj, "audio", line_no);
    seg.reference_text = opt_string_field(obj, "text", line_no);
    seg.speaker = opt_string_field(obj, "speaker", line_no);

    static const std::set<std::string_view> known = {
        "id", "conversation_id", "turn_index", "language",
        "accent", "audio", "text", "speaker",
    };
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) seg.extras[it.key()] = it.value();
    }
    return seg;
}

std::vector<Segment> load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open manifest: " + path);

    std::vector<Segment> segments;
    std::set<std::pair<std::string, int>> turn_keys;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.peek() == EOF) break; // trailing newline
        Segment seg = parse_manifest_line(line, line_no);
        if (!ids.insert(seg.id).second) {
            line_error(line_no, "duplicate segment id \"" + seg.id + "\"");
        }
        if (!turn_keys.insert({seg.conversation_id, seg.turn_index}).second) {
            line_error(line_no, "duplicate (conversation_id, turn_index) = (" +
                                    seg.conversation_id + ", " +
                                    std::to_string(seg.turn_index) + ")");
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::string segment_to_json_line(const Segment& segment) {
    ordered_json obj;
    obj["id"] = segment.id;
    obj["conversation_id"] = segment.conversation_id;
    obj["turn_index"] = segment.turn_index;
    obj["language"] = to_string(segment.language.code);
    if (segment.language.accent) obj["accent"] = *segment.language.accent;
    obj["audio"] = segment.audio_ref;
    if (segment.reference_text) obj["text"] = *segment.reference_text;
    if (segment.speaker) obj["speaker"] = *segment.speaker;
    for (auto it = segment.extras.begin(); it != segment.extras.end(); ++it) {
        obj[it.key()] = it.value();
    }
    return obj.dump();
}

void save_manifest(const std::vector<Segment>& segments, const std::string& path) {
    std::string body;
    for (const auto& seg : segments) {
        body += segment_to_json_line(seg);
        body += '\n';
    }
    write_file_atomic(path, body);
}

std::vector<Conversation> group_conversations(const std::vector<Segment>& segments) {
    std::map<std::string, Conversation> by_id;
    for (const auto& seg : segments) {
        auto [it, inserted] = by_id.try_emplace(seg.conversation_id);
        Conversation& conv = it->second;
        if (inserted) {
            conv.id = seg.conversation_id;
            conv.language = seg.language;
        } else if (!(conv.language == seg.language)) {
            throw DataError("conversation " + conv.id +
                            " mixes language tags across segments");
        }
        conv.segments.push_back(seg);
    }

    std::vector<Conversation> out;
    out.reserve(by_id.size());
    for (auto& [id, conv] : by_id) {
        std::sort(conv.segments.begin(), conv.segments.end(),
                  [](const Segment& a, const Segment& b) { return a.turn_index < b.turn_index; });
        for (std::size_t i = 0; i < conv.segments.size(); ++i) {
            const int expect = static_cast<int>(i);
            const int got = conv.segments[i].turn_index;
            if (got != expect) {
                throw DataError("conversation " + id + ": turn_index values are not " +
                                "contiguous (expected " + std::to_string(expect) + ", found " +
                                std::to_string(got) + ")");
            }
        }
        out.push_back(std::move(conv));
    }
    return out;
}

ContextWindow neighbors(const Conversation& conversation, int turn_index,
                        const TextSource& text_source) {
    const auto n = static_cast<int>(conversation.segments.size());
    if (turn_index < 0 || turn_index >= n) {
        throw DataError("turn_index " + std::to_string(turn_index) + " out of range for " +
                        "conversation " + conversation.id + " of length " + std::to_string(n));
    }

    auto resolve = [&](int idx) -> std::string {
        const std::string& id = conversation.segments[static_cast<std::size_t>(idx)].id;
        auto text = text_source(id);
        if (!text) {
            throw DataError("no text available for neighbor segment \"" + id + "\"");
        }
        return *text;
    };

    ContextWindow window;
    if (turn_index > 0) window.history = resolve(turn_index - 1);
    if (turn_index < n - 1) window.future = resolve(turn_index + 1);
    return window;
}

} // namespace ctxasr
