#include "ctxasr/backend.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "ctxasr/errors.hpp"
#include "ctxasr/io.hpp"
#include "ctxasr/unicode.hpp"

namespace ctxasr {

void TranscribeRequest::validate() const {
    if (segment_id.empty()) throw Error("request segment_id must not be empty");
    if (beam_size < 1) throw Error("beam_size must be >= 1");
    if (no_repeat_ngram < 1) throw Error("no_repeat_ngram must be >= 1");
}

TranscribeResponse ReplayBackend::transcribe(const TranscribeRequest& request) {
    request.validate();
    auto it = table_.find(request.segment_id);
    if (it == table_.end()) {
        throw BackendError(request.segment_id,
                           "replay table has no entry for \"" + request.segment_id + "\"",
                           /*retriable=*/false);
    }
    return {request.segment_id, it->second, name(), {}};
}

std::unordered_map<std::string, std::string> load_replay_table(const std::string& path) {
    std::unordered_map<std::string, std::string> table;
    for (const auto& [line_no, line] : read_jsonl_lines(path)) {
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + " line " + std::to_string(line_no) + ": malformed JSON: " +
                            e.what());
        }
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
            !obj.contains("text") || !obj["text"].is_string()) {
            throw DataError(path + " line " + std::to_string(line_no) +
                            ": expected object with string \"id\" and \"text\"");
        }
        table[obj["id"].get<std::string>()] = obj["text"].get<std::string>();
    }
    return table;
}

void DegradationConfig::validate() const {
    if (error_rate < 0.0 || error_rate > 1.0) throw Error("error_rate must be in [0, 1]");
    const double sum = mix[0] + mix[1] + mix[2];
    if (mix[0] < 0.0 || mix[1] < 0.0 || mix[2] < 0.0 || std::abs(sum - 1.0) > 1e-9) {
        throw Error("operation mix must be non-negative and sum to 1");
    }
}

std::string degrade(std::string_view reference, const DegradationConfig& config,
                    DrawSource& draws) {
    config.validate();
    const auto units = graphemes(reference);

    // Sorted unique grapheme set of the reference itself.
    std::set<std::string_view> alphabet_set(units.begin(), units.end());
    std::vector<std::string_view> alphabet(alphabet_set.begin(), alphabet_set.end());

    std::string out;
    out.reserve(reference.size());
    auto draw_symbol = [&]() -> std::string_view {
        const auto idx = draws.uniform_int(0, static_cast<std::int64_t>(alphabet.size()) - 1);
        return alphabet[static_cast<std::size_t>(idx)];
    };
    for (auto unit : units) {
        if (draws.uniform_real() >= config.error_rate) {
            out.append(unit);
            continue;
        }
        const double op = draws.uniform_real();
        if (op < config.mix[0]) {
            out.append(draw_symbol()); // substitute
        } else if (op < config.mix[0] + config.mix[1]) {
            // delete
        } else {
            out.append(unit); // insert after
            out.append(draw_symbol());
        }
    }
    return out;
}

TranscribeResponse SimulatorBackend::transcribe(const TranscribeRequest& request) {
    request.validate();
    auto it = references_.find(request.segment_id);
    if (it == references_.end()) {
        throw BackendError(request.segment_id,
                           "simulator has no reference for \"" + request.segment_id + "\"",
                           /*retriable=*/false);
    }
    SplitMix64 draws(derive_seed(seed_, request.segment_id + ":" + request.prompt));
    return {request.segment_id, degrade(it->second, config_, draws), name(), {}};
}

} // namespace ctxasr
