#include "ctxasr/http_backend.hpp"

#include <chrono>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "ctxasr/errors.hpp"
#include "ctxasr/io.hpp"

namespace ctxasr {

namespace {

constexpr const char* kEndpointPath = "/v1/transcribe";

struct ParsedUrl {
    std::string host;
    int port;
    std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& url) {
    std::string rest = url;
    int default_port = 80;
    if (rest.rfind("http://", 0) == 0) {
        rest = rest.substr(7);
    } else if (rest.rfind("https://", 0) == 0) {
        throw Error("https endpoints are not supported: " + url);
    }
    std::string prefix;
    if (auto slash = rest.find('/'); slash != std::string::npos) {
        prefix = rest.substr(slash);
        rest = rest.substr(0, slash);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }
    int port = default_port;
    if (auto colon = rest.find(':'); colon != std::string::npos) {
        port = std::stoi(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    if (rest.empty()) throw Error("endpoint URL has no host: " + url);
    return {rest, port, prefix};
}

std::string encode_base64(std::string_view bytes) {
    static const char table[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += table[(v >> 6) & 63];
        out += table[v & 63];
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += table[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

void backoff_sleep(int retry_index, int base_ms) {
    // Full jitter: uniform over [0, base * 2^retry_index]. The sleep length
    // never affects outputs, so a non-deterministic RNG is fine here.
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    const double cap = static_cast<double>(base_ms) * std::pow(2.0, retry_index);
    std::uniform_real_distribution<double> dist(0.0, cap);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(dist(rng)));
}

} // namespace

std::string transcribe_request_body(const TranscribeRequest& request,
                                    const std::optional<std::string>& audio_b64) {
    nlohmann::ordered_json body;
    body["id"] = request.segment_id;
    body["audio"] = request.audio_ref;
    if (audio_b64) body["audio_b64"] = *audio_b64;
    body["prompt"] = request.prompt;
    body["language"] = to_string(request.language.code);
    body["beam_size"] = request.beam_size;
    body["no_repeat_ngram"] = request.no_repeat_ngram;
    return body.dump();
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    auto parsed = parse_base_url(config_.base_url);
    host_ = parsed.host;
    port_ = parsed.port;
    path_prefix_ = parsed.path_prefix;
}

TranscribeResponse HttpBackend::transcribe(const TranscribeRequest& request) {
    request.validate();

    std::optional<std::string> audio_b64;
    if (config_.send_audio_b64) audio_b64 = encode_base64(read_file(request.audio_ref));
    const std::string body = transcribe_request_body(request, audio_b64);
    const std::string path = path_prefix_ + kEndpointPath;

    std::unique_lock gate_lock(gate_.mu);
    gate_.cv.wait(gate_lock, [&] { return gate_.active < config_.max_in_flight; });
    ++gate_.active;
    gate_lock.unlock();
    struct GateRelease {
        InFlightGate& gate;
        ~GateRelease() {
            std::lock_guard lk(gate.mu);
            --gate.active;
            gate.cv.notify_one();
        }
    } release{gate_};

    const auto started = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) backoff_sleep(attempt - 1, config_.backoff_base_ms);

        httplib::Client client(host_, port_);
        client.set_connection_timeout(0, config_.connect_timeout_ms * 1000);
        client.set_read_timeout(config_.read_timeout_ms / 1000,
                                (config_.read_timeout_ms % 1000) * 1000);

        auto result = client.Post(path, body, "application/json");
        if (!result) {
            last_error = "connection failure (" + httplib::to_string(result.error()) + ")";
            continue; // retriable
        }
        if (result->status >= 500) {
            last_error = "server error (status " + std::to_string(result->status) + ")";
            continue; // retriable
        }
        if (result->status < 200 || result->status >= 300) {
            throw BackendError(request.segment_id,
                               "endpoint rejected request with status " +
                                   std::to_string(result->status),
                               /*retriable=*/false);
        }

        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(result->body);
        } catch (const nlohmann::json::exception&) {
            throw BackendError(request.segment_id, "malformed response body",
                               /*retriable=*/false);
        }
        if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_string() ||
            !reply.contains("text") || !reply["text"].is_string()) {
            throw BackendError(request.segment_id,
                               "response missing string \"id\"/\"text\" fields",
                               /*retriable=*/false);
        }
        if (reply["id"].get<std::string>() != request.segment_id) {
            throw BackendError(request.segment_id, "response id does not echo the request",
                               /*retriable=*/false);
        }
        const auto elapsed = std::chrono::steady_clock::now() - started;
        return {request.segment_id, reply["text"].get<std::string>(), name(),
                std::chrono::duration<double, std::milli>(elapsed)};
    }
    throw BackendError(request.segment_id,
                       "transcription failed after " + std::to_string(config_.max_retries + 1) +
                           " attempts: " + last_error,
                       /*retriable=*/true);
}

} // namespace ctxasr
