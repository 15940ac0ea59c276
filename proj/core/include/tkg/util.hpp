#pragma once
// Small shared helpers: text normalization, slugs, hashing, file IO.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tkg::util {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Removes all whitespace characters. Used by lossless-ingestion checks.
std::string strip_whitespace(std::string_view s);

// Lowercase letters and digits, everything else collapsed to single '-'.
std::string slugify(std::string_view s);

// Splits text into sentences at '.', '!' or '?' followed by whitespace
// (or end of text). The terminator stays with its sentence. Sentences are
// trimmed; empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view text);

bool contains_ci(std::string_view haystack, std::string_view needle);

std::uint64_t fnv1a64(std::string_view data);
std::string to_hex(std::uint64_t v);

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Sorted list of regular files in dir with the given extension (e.g. ".txt").
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              std::string_view extension);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
// captured and the first one (by index) is rethrown after all workers join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

} // namespace tkg::util
