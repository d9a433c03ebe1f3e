#include "empath/common.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <vector>

namespace empath {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingId: return "MISSING_ID";
    case ErrorCode::InvalidMbti: return "INVALID_MBTI";
    case ErrorCode::UnknownLabel: return "UNKNOWN_LABEL";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::ScoreOutOfRange: return "SCORE_OUT_OF_RANGE";
    case ErrorCode::ComponentOutOfRange: return "COMPONENT_OUT_OF_RANGE";
    case ErrorCode::BadWeights: return "BAD_WEIGHTS";
    case ErrorCode::Malformed: return "MALFORMED";
    case ErrorCode::UnparseableJudgment: return "UNPARSEABLE_JUDGMENT";
    case ErrorCode::NonfiniteLogProb: return "NONFINITE_LOGPROB";
    case ErrorCode::SupportMismatch: return "SUPPORT_MISMATCH";
    case ErrorCode::UnknownToken: return "UNKNOWN_TOKEN";
    case ErrorCode::Diverged: return "DIVERGED";
    case ErrorCode::EnumerationTooLarge: return "ENUMERATION_TOO_LARGE";
    case ErrorCode::AgentFailure: return "AGENT_FAILURE";
    case ErrorCode::UnknownFilterName: return "UNKNOWN_FILTER_NAME";
    case ErrorCode::EmptyTrajectory: return "EMPTY_TRAJECTORY";
    case ErrorCode::UnparseableTurn: return "UNPARSEABLE_TURN";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::SchemaViolation: return "SCHEMA_VIOLATION";
    case ErrorCode::AuthMissing: return "AUTH_MISSING";
    case ErrorCode::Timeout: return "TIMEOUT";
    case ErrorCode::ExhaustedRetries: return "EXHAUSTED_RETRIES";
    case ErrorCode::MalformedResponse: return "MALFORMED_RESPONSE";
    case ErrorCode::FixtureExhausted: return "FIXTURE_EXHAUSTED";
    case ErrorCode::JudgeUnavailable: return "JUDGE_UNAVAILABLE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN_ERROR";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

namespace {
bool is_space(unsigned char c) { return std::isspace(c) != 0; }
}  // namespace

std::string_view trim_view(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string trim_copy(std::string_view s) { return std::string(trim_view(s)); }

std::string lower_copy(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string upper_copy(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::size_t whitespace_token_count(std::string_view s) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : s) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::vector<std::size_t> row(a.size() + 1);
  for (std::size_t i = 0; i <= a.size(); ++i) row[i] = i;
  for (std::size_t j = 1; j <= b.size(); ++j) {
    std::size_t prev = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t cur = row[i];
      std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
      row[i] = std::min({row[i] + 1, row[i - 1] + 1, prev + cost});
      prev = cur;
    }
  }
  return row[a.size()];
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::optional<std::uint64_t> fnv1a64_of_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace empath
