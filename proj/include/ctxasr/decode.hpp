#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctxasr/backend.hpp"
#include "ctxasr/corpus.hpp"
#include "ctxasr/prompts.hpp"

namespace ctxasr {

enum class Stage { Stage1, Stage2 };

/// Where a Stage-2 prompt's context text came from. Stage 1 always decodes
/// without context, so its hypotheses carry None.
enum class ContextOrigin { None, Stage1Hyps, Groundtruth };

const char* to_string(Stage stage);
const char* to_string(ContextOrigin origin);

struct Hypothesis {
    std::string segment_id;
    Stage stage = Stage::Stage1;
    std::string text;
    std::string prompt_used;
    ContextOrigin context_source = ContextOrigin::None;
};

using HypMap = std::map<std::string, Hypothesis>;

enum class RepeatUnit { Word, Character };

/// Character-unit languages are the CER languages; everything else uses words.
RepeatUnit repeat_unit_for(Lang lang);

/// Remove immediately repeated n-token blocks, scanning left to right until
/// no immediate repetition remains. Word unit tokenizes on whitespace and
/// rejoins with single spaces; character unit works on grapheme clusters and
/// rejoins without separators. Idempotent.
std::string truncate_repeats(std::string_view text, int n, RepeatUnit unit);

struct SegmentFailure {
    std::string segment_id;
    std::string message;
};

struct PipelineConfig {
    TranscriptionBackend* backend = nullptr;
    const PromptCatalog* catalog = nullptr;
    int parallelism = 1;
    ContextOrigin context_source = ContextOrigin::Stage1Hyps; // Stage-2 context
    int repeat_n = 5;          // post-filter block size
    bool partial_results = false;
    int beam_size = 4;         // forwarded to the backend
    int no_repeat_ngram = 5;   // forwarded to the backend
    std::size_t max_context_graphemes = 0; // 0 = no cap

    void validate() const;
};

/// Decode every segment in isolation with its language's no-context prompt.
/// Fails as a whole unless partial_results is set, in which case failed ids
/// are reported through run_pipeline's report instead.
HypMap stage1_run(const std::vector<Conversation>& conversations, const PipelineConfig& config);

/// Re-decode every segment with a context window built from its neighbors'
/// Stage-1 hypotheses (Stage1Hyps) or reference texts (Groundtruth). The
/// stage1 map is ignored in Groundtruth mode.
HypMap stage2_run(const std::vector<Conversation>& conversations, const HypMap& stage1,
                  const PipelineConfig& config);

struct StageSelection {
    bool stage1 = true;
    bool stage2 = true;
};

struct DecodeReport {
    std::size_t segment_count = 0;
    std::size_t stage1_decoded = 0;
    std::size_t stage2_decoded = 0;
    std::vector<SegmentFailure> failures;
    std::string stage1_path; // empty when the stage did not run
    std::string stage2_path;
};

/// Full pipeline over a manifest: Stage 1, a per-conversation barrier, then
/// Stage 2, writing one hypothesis file per stage into out_dir (stage1.jsonl
/// / stage2.jsonl, sorted by conversation and turn). When only Stage 2 is
/// selected with Stage1Hyps context, external_stage1 supplies the Stage-1
/// hypotheses and must cover every segment.
DecodeReport run_pipeline(const std::string& manifest_path, const PipelineConfig& config,
                          StageSelection stages, const std::string& out_dir,
                          const HypMap* external_stage1 = nullptr);

void save_hypotheses(const std::vector<Hypothesis>& hypotheses, const std::string& path);
HypMap load_hypotheses(const std::string& path);

} // namespace ctxasr
