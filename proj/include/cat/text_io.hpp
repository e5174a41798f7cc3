// Copyright 2026 The CAT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small helpers shared by the TSV readers and writers.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace cat::text {

std::vector<std::string_view> split(std::string_view line, char sep);

/// Parses the whole field or throws kMalformedLine tagged with `where`.
long long parse_int(std::string_view field, const std::string& where);
double parse_double(std::string_view field, const std::string& where);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

/// "file:line" for error messages.
std::string location(const std::filesystem::path& path, std::size_t line_number);

}  // namespace cat::text
