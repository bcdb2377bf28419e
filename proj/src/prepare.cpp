#include "ctxasr/prepare.hpp"

#include "json.hpp"

#include "ctxasr/errors.hpp"
#include "ctxasr/io.hpp"
#include "ctxasr/rng.hpp"

namespace ctxasr {

namespace {

TrainingSample single_sample(const Conversation& conv, const Segment& seg,
                             const PromptCatalog& catalog) {
    TrainingSample sample;
    sample.segment_id = seg.id;
    sample.audio_ref = seg.audio_ref;
    sample.target_text = *seg.reference_text;
    sample.variant = PromptVariant::NoContext;
    sample.prompt = render(catalog, conv.language, ContextWindow{});
    return sample;
}

TrainingSample contextual_sample(const Conversation& conv, std::size_t index,
                                 const MaskingConfig& masking, const PromptCatalog& catalog,
                                 ContextStyle style, std::uint64_t global_seed) {
    const Segment& seg = conv.segments[index];

    ContextWindow window = neighbors(conv, static_cast<int>(index),
                                     [&](const std::string& id) -> std::optional<std::string> {
                                         for (const auto& s : conv.segments) {
                                             if (s.id == id) return s.reference_text;
                                         }
                                         return std::nullopt;
                                     });
    if (style == ContextStyle::History) window.future.reset();

    SplitMix64 history_draws(derive_seed(global_seed, seg.id + ":h"));
    SplitMix64 future_draws(derive_seed(global_seed, seg.id + ":f"));
    const ContextWindow masked =
        mask_context_pair(window, masking, history_draws, future_draws);

    TrainingSample sample;
    sample.segment_id = seg.id;
    sample.audio_ref = seg.audio_ref;
    sample.target_text = *seg.reference_text;
    sample.variant = select_variant(masked);
    sample.prompt = render(catalog, conv.language, masked);
    sample.masked_history = window.history && masked.history != window.history;
    sample.masked_future = window.future && masked.future != window.future;
    return sample;
}

} // namespace

const char* to_string(TrainMode mode) {
    switch (mode) {
        case TrainMode::Single: return "single";
        case TrainMode::History: return "history";
        case TrainMode::Bidirectional: return "bidirectional";
        case TrainMode::Mixed: return "mixed";
    }
    return "??";
}

std::optional<TrainMode> parse_train_mode(std::string_view name) {
    if (name == "single") return TrainMode::Single;
    if (name == "history") return TrainMode::History;
    if (name == "bidirectional") return TrainMode::Bidirectional;
    if (name == "mixed") return TrainMode::Mixed;
    return std::nullopt;
}

std::vector<TrainingSample> emit_training_manifest(
    const std::vector<Conversation>& conversations, const MaskingConfig& masking,
    const PromptCatalog& catalog, TrainMode mode, std::uint64_t global_seed,
    ContextStyle mixed_style) {
    masking.validate();
    for (const auto& conv : conversations) {
        for (const auto& seg : conv.segments) {
            if (!seg.reference_text) {
                throw DataError("training manifests require reference text; segment \"" +
                                seg.id + "\" has none");
            }
        }
    }

    const ContextStyle style = mode == TrainMode::History    ? ContextStyle::History
                               : mode == TrainMode::Bidirectional ? ContextStyle::Bidirectional
                                                                  : mixed_style;
    std::vector<TrainingSample> samples;
    for (const auto& conv : conversations) {
        for (std::size_t i = 0; i < conv.segments.size(); ++i) {
            if (mode == TrainMode::Single || mode == TrainMode::Mixed) {
                samples.push_back(single_sample(conv, conv.segments[i], catalog));
            }
            if (mode != TrainMode::Single) {
                samples.push_back(
                    contextual_sample(conv, i, masking, catalog, style, global_seed));
            }
        }
    }
    return samples;
}

void save_training_manifest(const std::vector<TrainingSample>& samples,
                            const std::string& path) {
    std::string body;
    for (const auto& s : samples) {
        nlohmann::ordered_json obj;
        obj["id"] = s.segment_id;
        obj["audio"] = s.audio_ref;
        obj["prompt"] = s.prompt;
        obj["target"] = s.target_text;
        obj["variant"] = to_string(s.variant);
        obj["masked_history"] = s.masked_history;
        obj["masked_future"] = s.masked_future;
        body += obj.dump();
        body += '\n';
    }
    write_file_atomic(path, body);
}

} // namespace ctxasr
