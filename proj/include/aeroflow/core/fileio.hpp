// Copyright 2026 The Aeroflow Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aeroflow {

/// Whole-file read. Throws Error{NotFound} when the file cannot be opened.
std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temporary file, fsyncs it, then renames over `path`,
/// so readers see either the old or the new content.
void write_atomic(const std::filesystem::path& path, std::string_view text);

/// Newline-terminated lines only; an unterminated tail (a torn append) is
/// dropped. Empty lines are kept so line numbers stay meaningful.
std::vector<std::string> read_complete_lines(const std::filesystem::path& path);

}  // namespace aeroflow
