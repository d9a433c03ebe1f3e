// Shared error taxonomy and small text/hash helpers used across the library.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace empath {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ErrorCode {
  MissingId,
  InvalidMbti,
  UnknownLabel,
  OutOfRange,
  ScoreOutOfRange,
  ComponentOutOfRange,
  BadWeights,
  Malformed,
  UnparseableJudgment,
  NonfiniteLogProb,
  SupportMismatch,
  UnknownToken,
  Diverged,
  EnumerationTooLarge,
  AgentFailure,
  UnknownFilterName,
  EmptyTrajectory,
  UnparseableTurn,
  IoError,
  SchemaViolation,
  AuthMissing,
  Timeout,
  ExhaustedRetries,
  MalformedResponse,
  FixtureExhausted,
  JudgeUnavailable,
  InvalidArgument,
};

// Stable upper-snake name, e.g. "INVALID_MBTI"; used for error_code= output.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

std::string_view trim_view(std::string_view s);
std::string trim_copy(std::string_view s);
// ASCII-only case folding; labels and codes in this toolkit are ASCII.
std::string lower_copy(std::string_view s);
std::string upper_copy(std::string_view s);

// Number of maximal runs of non-whitespace bytes.
std::size_t whitespace_token_count(std::string_view s);

// Levenshtein distance over bytes; diagnostics only.
std::size_t edit_distance(std::string_view a, std::string_view b);

// FNV-1a 64-bit. Integrity chaining for run manifests, not cryptographic.
std::uint64_t fnv1a64(std::string_view bytes);
std::optional<std::uint64_t> fnv1a64_of_file(const std::filesystem::path& path);
std::string hash_hex(std::uint64_t h);

// Derives a decorrelated per-item seed from a base seed (splitmix64 step).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

}  // namespace empath
