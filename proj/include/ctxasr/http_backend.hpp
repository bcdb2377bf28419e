#pragma once

#include <condition_variable>
#include <mutex>
#include <optional>
#include <string>

#include "ctxasr/backend.hpp"

namespace ctxasr {

struct HttpBackendConfig {
    std::string base_url;        // e.g. "http://127.0.0.1:8090"
    int connect_timeout_ms = 2000;
    int read_timeout_ms = 30000;
    int max_retries = 3;         // retries after the first attempt
    int backoff_base_ms = 250;   // exponential, factor 2, full jitter
    int max_in_flight = 8;       // concurrent request cap
    bool send_audio_b64 = false; // inline audio bytes for remote servers
};

/// Networked client for the POST /v1/transcribe wire protocol. Connection
/// errors and 5xx responses are retried with exponential backoff and full
/// jitter; 4xx and malformed bodies are never retried.
class HttpBackend final : public TranscriptionBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    TranscribeResponse transcribe(const TranscribeRequest& request) override;
    std::string name() const override { return "http"; }

private:
    struct InFlightGate {
        std::mutex mu;
        std::condition_variable cv;
        int active = 0;
    };

    HttpBackendConfig config_;
    std::string host_;
    int port_ = 80;
    std::string path_prefix_;
    InFlightGate gate_;
};

/// Serialize the request body exactly as it goes on the wire (exposed so
/// tests can pin byte-faithfulness of prompt and audio_ref).
std::string transcribe_request_body(const TranscribeRequest& request,
                                    const std::optional<std::string>& audio_b64 = std::nullopt);

} // namespace ctxasr
