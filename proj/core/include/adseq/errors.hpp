// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace adseq {

/// Bad dataset, run-directory or config input.
struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model output that does not match the expected structured format.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::string raw_text)
        : std::runtime_error(what), raw(std::move(raw_text)) {}
    std::string raw;
};

/// Template rendering problem (unknown/missing/extra variable).
struct TemplateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// HTTP endpoint answered but not with a usable completion.
struct EndpointError : std::runtime_error {
    EndpointError(const std::string& what, int http_status)
        : std::runtime_error(what), status(http_status) {}
    int status = 0;
};

/// Could not reach the endpoint at all (after retries).
struct TransportError : std::runtime_error {
    TransportError(const std::string& what, std::string hash)
        : std::runtime_error(what), request_hash(std::move(hash)) {}
    std::string request_hash;
};

/// Scripted mock has no response for the request hash.
struct MockMissError : std::runtime_error {
    MockMissError(const std::string& what, std::string hash)
        : std::runtime_error(what), request_hash(std::move(hash)) {}
    std::string request_hash;
};

/// Invalid configuration or command usage.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pipeline stage failed for one interval.
struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace adseq
