#pragma once

#include <string>
#include <string_view>

#include "ctxasr/corpus.hpp"
#include "ctxasr/rng.hpp"

namespace ctxasr {

/// Contextual masking parameters: coin probability, character-removal ratio
/// upper bound, and span-count cap.
struct MaskingConfig {
    double mask_prob = 0.5;
    double max_ratio = 0.25;
    int max_spans = 3;

    void validate() const;
};

/// Per-call masking diagnostics for tests and reports.
struct MaskOutcome {
    std::string text;
    bool coin_masked = false; // the coin selected the masking branch
    int span_events = 0;      // deletion events executed (0..max_spans)
    int units_removed = 0;    // grapheme clusters actually deleted
};

/// Randomly delete contiguous grapheme-cluster spans from text.
///
/// Draw order is fixed and part of the public contract:
/// coin, ratio, span count k, then one start position per span. Empty text
/// returns unchanged and consumes no draws. With T graphemes and ratio draw
/// a, the removal budget is M = floor(a*T) carved into k equal spans of
/// s = floor(M/k); spans are deleted sequentially, each start drawn against
/// the current length, so every deletion is in range.
MaskOutcome mask_text_outcome(std::string_view text, const MaskingConfig& config,
                              DrawSource& draws);

std::string mask_text(std::string_view text, const MaskingConfig& config, DrawSource& draws);

/// Mask history then future from one draw stream, in that fixed order.
/// Absent sides stay absent and consume no draws.
ContextWindow mask_context_pair(const ContextWindow& window, const MaskingConfig& config,
                                DrawSource& draws);

/// Same, with an independent draw stream per side (used for parallel manifest
/// generation where the two sides carry separately derived seeds).
ContextWindow mask_context_pair(const ContextWindow& window, const MaskingConfig& config,
                                DrawSource& history_draws, DrawSource& future_draws);

} // namespace ctxasr
