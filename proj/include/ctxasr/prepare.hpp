#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctxasr/corpus.hpp"
#include "ctxasr/masking.hpp"
#include "ctxasr/prompts.hpp"

namespace ctxasr {

/// Which training manifest to emit. Single is the plain no-context set;
/// History / Bidirectional are the contextual-only sets; Mixed is the union
/// of Single and a contextual set, putting each segment in the manifest
/// exactly twice (the doubled-hours recipe).
enum class TrainMode { Single, History, Bidirectional, Mixed };

/// Contextual set used by Mixed mode.
enum class ContextStyle { History, Bidirectional };

const char* to_string(TrainMode mode);
std::optional<TrainMode> parse_train_mode(std::string_view name);

struct TrainingSample {
    std::string segment_id;
    std::string prompt;
    std::string audio_ref;
    std::string target_text;
    PromptVariant variant = PromptVariant::NoContext;
    bool masked_history = false; // masking altered the history text
    bool masked_future = false;
};

/// Build training samples. Context texts are the neighbors' reference
/// transcriptions, masked with per-side draw streams seeded by
/// derive_seed(global_seed, "<segment_id>:h" / ":f") so output is identical
/// regardless of worker scheduling. Every segment must carry reference text.
/// Output is ordered by (conversation_id, turn_index), the plain sample
/// before the contextual one in Mixed mode.
std::vector<TrainingSample> emit_training_manifest(
    const std::vector<Conversation>& conversations, const MaskingConfig& masking,
    const PromptCatalog& catalog, TrainMode mode, std::uint64_t global_seed,
    ContextStyle mixed_style = ContextStyle::Bidirectional);

/// JSON Lines with keys: id, audio, prompt, target, variant, masked_history,
/// masked_future.
void save_training_manifest(const std::vector<TrainingSample>& samples, const std::string& path);

} // namespace ctxasr
