// File helpers: atomic writes, JSON loading, CSV tokenizing, number
// formatting, and the bounded parallel-for used by batch drivers.
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace negai {

// Writes to `path + ".tmp"` then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

// Throws InputError if the file is missing or not valid JSON.
nlohmann::json read_json_file(const std::string& path);

std::string read_text_file(const std::string& path);

// Shortest round-trip decimal representation.
std::string fmt_double(double v);

// Splits one CSV line on commas. Quoting is not supported; the formats
// written by this project never need it.
std::vector<std::string> split_csv_line(std::string_view line);

// Worker count: NEGAI_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_count();

// Runs fn(i) for i in [0, n) on up to thread_count() threads. Exceptions are
// rethrown (first by index) after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// SplitMix64 mix, used to derive independent stream seeds from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace negai
