// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace adseq {

/// Lowercase hex SHA-256 digest (64 characters).
std::string sha256_hex(std::string_view data);

std::string base64_encode(std::string_view data);

}  // namespace adseq
