#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>

#include "ctxasr/corpus.hpp"
#include "ctxasr/rng.hpp"

namespace ctxasr {

struct TranscribeRequest {
    std::string segment_id;
    std::string audio_ref;
    std::string prompt;
    LanguageCode language;
    int beam_size = 4;
    int no_repeat_ngram = 5;

    void validate() const;
};

struct TranscribeResponse {
    std::string segment_id;
    std::string text;
    std::string backend_name;
    std::chrono::duration<double, std::milli> latency{0.0};
};

/// Transcription contract. Implementations must echo the request's
/// segment_id and be safe to call concurrently; failures throw BackendError
/// with a retriable/non-retriable classification.
class TranscriptionBackend {
public:
    virtual ~TranscriptionBackend() = default;
    virtual TranscribeResponse transcribe(const TranscribeRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// Returns pre-recorded hypotheses from an id -> text table. Unknown ids are
/// non-retriable errors.
class ReplayBackend final : public TranscriptionBackend {
public:
    explicit ReplayBackend(std::unordered_map<std::string, std::string> table)
        : table_(std::move(table)) {}

    TranscribeResponse transcribe(const TranscribeRequest& request) override;
    std::string name() const override { return "replay"; }

private:
    std::unordered_map<std::string, std::string> table_;
};

/// Load a replay table from JSON Lines with "id" and "text" keys.
std::unordered_map<std::string, std::string> load_replay_table(const std::string& path);

/// Character-level corruption parameters for the degradation simulator.
/// The operation mix must sum to 1; by default the three operations are
/// equally likely. The substitution/insertion alphabet is the reference's
/// own grapheme set.
struct DegradationConfig {
    double error_rate = 0.1;
    std::array<double, 3> mix = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; // sub, del, ins

    void validate() const;
};

/// Corrupt a reference string grapheme by grapheme: with probability
/// error_rate apply one operation chosen by the mix (substitute with a
/// uniformly drawn grapheme from the alphabet, delete, or insert such a
/// grapheme after it). Deterministic given the draw stream.
std::string degrade(std::string_view reference, const DegradationConfig& config,
                    DrawSource& draws);

/// Degrades each segment's reference text, ignoring the audio entirely. The
/// per-call seed is derived from (seed, segment id, prompt), so the decode
/// output varies with the context the prompt carries while staying fully
/// deterministic.
class SimulatorBackend final : public TranscriptionBackend {
public:
    SimulatorBackend(std::unordered_map<std::string, std::string> references,
                     DegradationConfig config, std::uint64_t seed)
        : references_(std::move(references)), config_(config), seed_(seed) {
        config_.validate();
    }

    TranscribeResponse transcribe(const TranscribeRequest& request) override;
    std::string name() const override { return "simulate"; }

private:
    std::unordered_map<std::string, std::string> references_;
    DegradationConfig config_;
    std::uint64_t seed_;
};

} // namespace ctxasr
