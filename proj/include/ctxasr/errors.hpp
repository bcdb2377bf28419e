#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ctxasr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Manifest / catalog / hypothesis-file validation failures.
class DataError : public Error {
public:
    using Error::Error;
};

/// Failure of a single transcription request.
class BackendError : public Error {
public:
    BackendError(std::string segment_id, const std::string& message, bool retriable)
        : Error(message), segment_id(std::move(segment_id)), retriable(retriable) {}

    std::string segment_id;
    bool retriable = false;
};

/// Aggregated per-segment failures of a decode run.
class PipelineError : public Error {
public:
    PipelineError(const std::string& message, std::vector<std::string> failed_ids)
        : Error(message), failed_ids(std::move(failed_ids)) {}

    std::vector<std::string> failed_ids;
};

} // namespace ctxasr
