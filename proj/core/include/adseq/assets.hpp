// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <vector>

namespace adseq::assets {

/// Returns the embedded bytes for an asset (e.g. "prompts/summarize.txt").
/// Throws std::out_of_range for unknown names.
std::string_view get(std::string_view name);

std::vector<std::string_view> list();

}  // namespace adseq::assets
