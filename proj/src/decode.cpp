#include "ctxasr/decode.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "json.hpp"

#include "ctxasr/errors.hpp"
#include "ctxasr/io.hpp"
#include "ctxasr/unicode.hpp"

namespace ctxasr {

namespace {

/// Fixed-size worker pool; tasks may submit further tasks (Stage-2 work is
/// enqueued by the last Stage-1 task of its conversation).
class TaskPool {
public:
    explicit TaskPool(int workers) {
        for (int i = 0; i < workers; ++i) {
            workers_.emplace_back([this] { loop(); });
        }
    }

    TaskPool(const TaskPool&) = delete;
    TaskPool& operator=(const TaskPool&) = delete;

    ~TaskPool() {
        {
            std::lock_guard lk(mu_);
            stopping_ = true;
        }
        cv_work_.notify_all();
        for (auto& w : workers_) w.join();
    }

    void submit(std::function<void()> task) {
        {
            std::lock_guard lk(mu_);
            ++pending_;
            queue_.push_back(std::move(task));
        }
        cv_work_.notify_one();
    }

    void drain() {
        std::unique_lock lk(mu_);
        cv_done_.wait(lk, [&] { return pending_ == 0; });
    }

private:
    void loop() {
        for (;;) {
            std::function<void()> task;
            {
                std::unique_lock lk(mu_);
                cv_work_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
                if (queue_.empty()) {
                    if (stopping_) return;
                    continue;
                }
                task = std::move(queue_.front());
                queue_.pop_front();
            }
            try {
                task(); // task bodies handle their own errors
            } catch (...) {
            }
            {
                std::lock_guard lk(mu_);
                if (--pending_ == 0) cv_done_.notify_all();
            }
        }
    }

    std::mutex mu_;
    std::condition_variable cv_work_;
    std::condition_variable cv_done_;
    std::deque<std::function<void()>> queue_;
    int pending_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

struct ConvState {
    const Conversation* conv = nullptr;
    std::vector<std::optional<Hypothesis>> stage1;
    std::vector<std::optional<Hypothesis>> stage2;
    std::unordered_map<std::string, std::size_t> index_by_id;
    std::atomic<int> remaining_stage1{0};
};

struct RunOutcome {
    std::vector<Hypothesis> stage1;
    std::vector<Hypothesis> stage2;
    std::vector<SegmentFailure> failures;
};

class StageRunner {
public:
    StageRunner(const std::vector<Conversation>& conversations, const PipelineConfig& config,
                bool do_stage1, bool do_stage2, const HypMap* external_stage1)
        : config_(config),
          do_stage1_(do_stage1),
          do_stage2_(do_stage2),
          external_stage1_(external_stage1) {
        config_.validate();
        states_.reserve(conversations.size());
        for (const auto& conv : conversations) {
            auto state = std::make_unique<ConvState>();
            state->conv = &conv;
            state->stage1.resize(conv.segments.size());
            state->stage2.resize(conv.segments.size());
            state->remaining_stage1 = static_cast<int>(conv.segments.size());
            for (std::size_t i = 0; i < conv.segments.size(); ++i) {
                state->index_by_id[conv.segments[i].id] = i;
            }
            states_.push_back(std::move(state));
        }
        check_preconditions(conversations);
    }

    RunOutcome run() {
        {
            TaskPool pool(config_.parallelism);
            for (auto& state : states_) {
                if (do_stage1_) {
                    for (std::size_t i = 0; i < state->conv->segments.size(); ++i) {
                        pool.submit([this, &pool, s = state.get(), i] {
                            stage1_task(pool, *s, i);
                        });
                    }
                } else if (do_stage2_) {
                    enqueue_stage2(pool, *state);
                }
            }
            pool.drain();
        }

        RunOutcome outcome;
        for (const auto& state : states_) {
            for (const auto& h : state->stage1) {
                if (h) outcome.stage1.push_back(*h);
            }
            for (const auto& h : state->stage2) {
                if (h) outcome.stage2.push_back(*h);
            }
        }
        {
            std::lock_guard lk(failure_mu_);
            outcome.failures = failures_;
        }
        std::sort(outcome.failures.begin(), outcome.failures.end(),
                  [](const SegmentFailure& a, const SegmentFailure& b) {
                      return a.segment_id < b.segment_id;
                  });
        return outcome;
    }

private:
    void check_preconditions(const std::vector<Conversation>& conversations) const {
        if (!do_stage2_) return;
        if (config_.context_source == ContextOrigin::Groundtruth) {
            for (const auto& conv : conversations) {
                for (const auto& seg : conv.segments) {
                    if (!seg.reference_text) {
                        throw DataError("groundtruth context requires reference text; segment \"" +
                                        seg.id + "\" has none");
                    }
                }
            }
        } else if (!do_stage1_) {
            std::vector<std::string> missing;
            for (const auto& conv : conversations) {
                for (const auto& seg : conv.segments) {
                    if (!external_stage1_ || !external_stage1_->count(seg.id)) {
                        missing.push_back(seg.id);
                    }
                }
            }
            if (!missing.empty()) {
                std::string msg = "stage-1 hypotheses missing for:";
                for (const auto& id : missing) msg += " " + id;
                throw DataError(msg);
            }
        }
    }

    void record_failure(const std::string& id, const std::string& message) {
        std::lock_guard lk(failure_mu_);
        failures_.push_back({id, message});
    }

    Hypothesis decode_one(const Segment& seg, const LanguageCode& language,
                          const std::string& prompt, Stage stage, ContextOrigin origin) {
        TranscribeRequest request{seg.id,    seg.audio_ref,     prompt,
                                  language, config_.beam_size, config_.no_repeat_ngram};
        TranscribeResponse response = config_.backend->transcribe(request);
        const std::string text =
            truncate_repeats(response.text, config_.repeat_n, repeat_unit_for(language.code));
        return {seg.id, stage, text, prompt, origin};
    }

    void stage1_task(TaskPool& pool, ConvState& state, std::size_t index) {
        const Segment& seg = state.conv->segments[index];
        try {
            const std::string prompt =
                render(*config_.catalog, state.conv->language, ContextWindow{});
            state.stage1[index] =
                decode_one(seg, state.conv->language, prompt, Stage::Stage1, ContextOrigin::None);
        } catch (const Error& e) {
            record_failure(seg.id, e.what());
        }
        // Per-conversation barrier: the conversation's Stage-2 work becomes
        // ready the moment its last Stage-1 segment completes.
        if (state.remaining_stage1.fetch_sub(1) == 1 && do_stage2_) {
            enqueue_stage2(pool, state);
        }
    }

    void enqueue_stage2(TaskPool& pool, ConvState& state) {
        for (std::size_t i = 0; i < state.conv->segments.size(); ++i) {
            pool.submit([this, s = &state, i] { stage2_task(*s, i); });
        }
    }

    TextSource stage2_text_source(ConvState& state) {
        if (config_.context_source == ContextOrigin::Groundtruth) {
            return [s = &state](const std::string& id) -> std::optional<std::string> {
                auto it = s->index_by_id.find(id);
                if (it == s->index_by_id.end()) return std::nullopt;
                return s->conv->segments[it->second].reference_text;
            };
        }
        if (do_stage1_) {
            return [s = &state](const std::string& id) -> std::optional<std::string> {
                auto it = s->index_by_id.find(id);
                if (it == s->index_by_id.end()) return std::nullopt;
                const auto& hyp = s->stage1[it->second];
                if (!hyp) return std::nullopt;
                return hyp->text;
            };
        }
        return [this](const std::string& id) -> std::optional<std::string> {
            auto it = external_stage1_->find(id);
            if (it == external_stage1_->end()) return std::nullopt;
            return it->second.text;
        };
    }

    std::optional<std::string> own_stage1_text(const ConvState& state, std::size_t index) {
        if (do_stage1_) {
            const auto& hyp = state.stage1[index];
            if (hyp) return hyp->text;
            return std::nullopt;
        }
        if (external_stage1_) {
            auto it = external_stage1_->find(state.conv->segments[index].id);
            if (it != external_stage1_->end()) return it->second.text;
        }
        return std::nullopt;
    }

    void stage2_task(ConvState& state, std::size_t index) {
        const Segment& seg = state.conv->segments[index];
        std::string prompt;
        try {
            const ContextWindow window =
                neighbors(*state.conv, static_cast<int>(index), stage2_text_source(state));
            prompt = render(*config_.catalog, state.conv->language, window,
                            config_.max_context_graphemes);
        } catch (const Error& e) {
            record_failure(seg.id, e.what());
            return;
        }
        try {
            state.stage2[index] = decode_one(seg, state.conv->language, prompt, Stage::Stage2,
                                             config_.context_source);
        } catch (const BackendError& e) {
            // Fall back to the segment's own Stage-1 output when allowed.
            if (config_.partial_results) {
                if (auto fallback = own_stage1_text(state, index)) {
                    state.stage2[index] = Hypothesis{seg.id, Stage::Stage2, *fallback, prompt,
                                                     config_.context_source};
                }
            }
            record_failure(seg.id, e.what());
        } catch (const Error& e) {
            record_failure(seg.id, e.what());
        }
    }

    PipelineConfig config_;
    bool do_stage1_;
    bool do_stage2_;
    const HypMap* external_stage1_;
    std::vector<std::unique_ptr<ConvState>> states_;
    std::mutex failure_mu_;
    std::vector<SegmentFailure> failures_;
};

[[noreturn]] void throw_pipeline_error(const std::vector<SegmentFailure>& failures) {
    std::vector<std::string> ids;
    std::string msg = "decoding failed for " + std::to_string(failures.size()) + " segment(s):";
    for (const auto& f : failures) {
        ids.push_back(f.segment_id);
        msg += "\n  " + f.segment_id + ": " + f.message;
    }
    throw PipelineError(msg, std::move(ids));
}

HypMap to_map(std::vector<Hypothesis>&& hyps) {
    HypMap out;
    for (auto& h : hyps) {
        std::string id = h.segment_id;
        out.emplace(std::move(id), std::move(h));
    }
    return out;
}

} // namespace

const char* to_string(Stage stage) {
    return stage == Stage::Stage1 ? "1" : "2";
}

const char* to_string(ContextOrigin origin) {
    switch (origin) {
        case ContextOrigin::None: return "none";
        case ContextOrigin::Stage1Hyps: return "stage1";
        case ContextOrigin::Groundtruth: return "groundtruth";
    }
    return "??";
}

RepeatUnit repeat_unit_for(Lang lang) {
    switch (lang) {
        case Lang::ja:
        case Lang::ko:
        case Lang::th:
            return RepeatUnit::Character;
        default:
            return RepeatUnit::Word;
    }
}

std::string truncate_repeats(std::string_view text, int n, RepeatUnit unit) {
    if (n < 1) throw Error("repetition block size must be >= 1");

    std::vector<std::string> tokens;
    if (unit == RepeatUnit::Word) {
        tokens = split_whitespace(text);
    } else {
        for (auto g : graphemes(text)) tokens.emplace_back(g);
    }

    const auto block = static_cast<std::size_t>(n);
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (auto& tok : tokens) {
        kept.push_back(std::move(tok));
        // Appending one token can only create a repetition ending at the
        // tail, so collapsing there keeps the whole prefix repetition-free.
        while (kept.size() >= 2 * block &&
               std::equal(kept.end() - static_cast<std::ptrdiff_t>(block), kept.end(),
                          kept.end() - static_cast<std::ptrdiff_t>(2 * block))) {
            kept.erase(kept.end() - static_cast<std::ptrdiff_t>(block), kept.end());
        }
    }

    std::string out;
    const char* sep = unit == RepeatUnit::Word ? " " : "";
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (i && *sep) out += sep;
        out += kept[i];
    }
    return out;
}

void PipelineConfig::validate() const {
    if (!backend) throw Error("pipeline config has no backend");
    if (!catalog) throw Error("pipeline config has no prompt catalog");
    if (parallelism < 1) throw Error("parallelism must be >= 1");
    if (repeat_n < 1) throw Error("repeat_n must be >= 1");
    if (context_source == ContextOrigin::None) {
        throw Error("stage-2 context source must be stage1 or groundtruth");
    }
}

HypMap stage1_run(const std::vector<Conversation>& conversations, const PipelineConfig& config) {
    StageRunner runner(conversations, config, /*do_stage1=*/true, /*do_stage2=*/false, nullptr);
    auto outcome = runner.run();
    if (!outcome.failures.empty() && !config.partial_results) {
        throw_pipeline_error(outcome.failures);
    }
    return to_map(std::move(outcome.stage1));
}

HypMap stage2_run(const std::vector<Conversation>& conversations, const HypMap& stage1,
                  const PipelineConfig& config) {
    StageRunner runner(conversations, config, /*do_stage1=*/false, /*do_stage2=*/true, &stage1);
    auto outcome = runner.run();
    if (!outcome.failures.empty() && !config.partial_results) {
        throw_pipeline_error(outcome.failures);
    }
    return to_map(std::move(outcome.stage2));
}

DecodeReport run_pipeline(const std::string& manifest_path, const PipelineConfig& config,
                          StageSelection stages, const std::string& out_dir,
                          const HypMap* external_stage1) {
    if (!stages.stage1 && !stages.stage2) throw Error("no stages selected");

    const auto segments = load_manifest(manifest_path);
    const auto conversations = group_conversations(segments);

    StageRunner runner(conversations, config, stages.stage1, stages.stage2, external_stage1);
    auto outcome = runner.run();
    if (!outcome.failures.empty() && !config.partial_results) {
        throw_pipeline_error(outcome.failures);
    }

    namespace fs = std::filesystem;
    DecodeReport report;
    report.segment_count = segments.size();
    report.stage1_decoded = outcome.stage1.size();
    report.stage2_decoded = outcome.stage2.size();
    report.failures = std::move(outcome.failures);
    if (stages.stage1) {
        report.stage1_path = (fs::path(out_dir) / "stage1.jsonl").string();
        save_hypotheses(outcome.stage1, report.stage1_path);
    }
    if (stages.stage2) {
        report.stage2_path = (fs::path(out_dir) / "stage2.jsonl").string();
        save_hypotheses(outcome.stage2, report.stage2_path);
    }
    return report;
}

void save_hypotheses(const std::vector<Hypothesis>& hypotheses, const std::string& path) {
    std::string body;
    for (const auto& h : hypotheses) {
        nlohmann::ordered_json obj;
        obj["id"] = h.segment_id;
        obj["stage"] = to_string(h.stage);
        obj["text"] = h.text;
        obj["prompt"] = h.prompt_used;
        obj["context_source"] = to_string(h.context_source);
        body += obj.dump();
        body += '\n';
    }
    write_file_atomic(path, body);
}

HypMap load_hypotheses(const std::string& path) {
    HypMap out;
    for (const auto& [line_no, line] : read_jsonl_lines(path)) {
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + " line " + std::to_string(line_no) + ": malformed JSON: " +
                            e.what());
        }
        auto str = [&](const char* key) -> std::string {
            if (!obj.contains(key) || !obj[key].is_string()) {
                throw DataError(path + " line " + std::to_string(line_no) +
                                ": missing string key \"" + key + "\"");
            }
            return obj[key].get<std::string>();
        };
        Hypothesis h;
        h.segment_id = str("id");
        const std::string stage = str("stage");
        if (stage == "1") h.stage = Stage::Stage1;
        else if (stage == "2") h.stage = Stage::Stage2;
        else throw DataError(path + " line " + std::to_string(line_no) + ": bad stage");
        h.text = str("text");
        h.prompt_used = str("prompt");
        const std::string origin = str("context_source");
        if (origin == "none") h.context_source = ContextOrigin::None;
        else if (origin == "stage1") h.context_source = ContextOrigin::Stage1Hyps;
        else if (origin == "groundtruth") h.context_source = ContextOrigin::Groundtruth;
        else throw DataError(path + " line " + std::to_string(line_no) + ": bad context_source");
        if ((h.stage == Stage::Stage1) != (h.context_source == ContextOrigin::None)) {
            throw DataError(path + " line " + std::to_string(line_no) +
                            ": stage/context_source combination is invalid");
        }
        if (!out.emplace(h.segment_id, h).second) {
            throw DataError(path + " line " + std::to_string(line_no) +
                            ": duplicate hypothesis for \"" + h.segment_id + "\"");
        }
    }
    return out;
}

} // namespace ctxasr
