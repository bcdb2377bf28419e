#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ctxasr {

/// Write via a temp file in the same directory, then rename over the target.
void write_file_atomic(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

/// Read non-empty lines; line numbers (1-based) are paired for error reporting.
std::vector<std::pair<std::size_t, std::string>> read_jsonl_lines(const std::string& path);

} // namespace ctxasr
