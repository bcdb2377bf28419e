#include "ctxasr/masking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ctxasr/errors.hpp"
#include "ctxasr/unicode.hpp"

namespace ctxasr {

void MaskingConfig::validate() const {
    if (mask_prob < 0.0 || mask_prob > 1.0) throw Error("mask_prob must be in [0, 1]");
    if (max_ratio < 0.0 || max_ratio > 1.0) throw Error("max_ratio must be in [0, 1]");
    if (max_spans < 1) throw Error("max_spans must be >= 1");
}

MaskOutcome mask_text_outcome(std::string_view text, const MaskingConfig& config,
                              DrawSource& draws) {
    MaskOutcome outcome;
    outcome.text = std::string(text);
    if (text.empty()) return outcome;

    const double coin = draws.uniform_real();
    if (coin >= config.mask_prob) return outcome;
    outcome.coin_masked = true;

    const double ratio = draws.uniform_real() * config.max_ratio;
    std::vector<std::string_view> units = graphemes(text);
    const auto total = static_cast<std::int64_t>(units.size());
    const auto budget = static_cast<std::int64_t>(std::floor(ratio * static_cast<double>(total)));

    const std::int64_t k_hi =
        std::min<std::int64_t>(config.max_spans, std::max<std::int64_t>(1, budget / 3));
    const std::int64_t span_count = draws.uniform_int(1, k_hi);
    const std::int64_t span_len = budget / span_count;

    for (std::int64_t i = 0; i < span_count; ++i) {
        const auto len = static_cast<std::int64_t>(units.size());
        if (len < span_len) break;
        const std::int64_t start = draws.uniform_int(0, len - span_len);
        units.erase(units.begin() + start, units.begin() + start + span_len);
        ++outcome.span_events;
        outcome.units_removed += static_cast<int>(span_len);
    }

    std::string masked;
    masked.reserve(text.size());
    for (auto unit : units) masked.append(unit);
    outcome.text = std::move(masked);
    return outcome;
}

std::string mask_text(std::string_view text, const MaskingConfig& config, DrawSource& draws) {
    return mask_text_outcome(text, config, draws).text;
}

ContextWindow mask_context_pair(const ContextWindow& window, const MaskingConfig& config,
                                DrawSource& draws) {
    return mask_context_pair(window, config, draws, draws);
}

ContextWindow mask_context_pair(const ContextWindow& window, const MaskingConfig& config,
                                DrawSource& history_draws, DrawSource& future_draws) {
    ContextWindow out;
    if (window.history) out.history = mask_text(*window.history, config, history_draws);
    if (window.future) out.future = mask_text(*window.future, config, future_draws);
    return out;
}

} // namespace ctxasr
