// Four-span tagged output format: constraint checking, format reward, parsing
// and rendering. Tags are matched as exact byte literals; the first begin tag
// and the first end tag after it delimit a span.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "empath/types.hpp"

namespace empath {

inline constexpr int kSpanCount = 4;
inline constexpr int kConstraintCount = 9;

enum SpanIndex : int {
  kUnderstandingSpan = 0,
  kReasoningSpan = 1,
  kEmotionSpan = 2,
  kResponseSpan = 3,
};

std::string_view span_name(int span);

// Eight tag literals in canonical order: understanding, reasoning, emotion,
// response, each begin then end.
class TagSpec {
 public:
  static const TagSpec& defaults();
  explicit TagSpec(std::array<std::string, 8> tags);

  std::string_view begin_tag(int span) const { return tags_[2 * span]; }
  std::string_view end_tag(int span) const { return tags_[2 * span + 1]; }
  std::string_view tag(int i) const { return tags_[i]; }
  const std::array<std::string, 8>& tags() const { return tags_; }
  bool operator==(const TagSpec&) const = default;

 private:
  std::array<std::string, 8> tags_;
};

// Constraint bits:
//   [0..3] span has its begin tag and an end tag after it
//   [4]    every tag occurrence fits the canonical tag order (duplicates
//          violate it; vacuous when at most one tag is present)
//   [5..8] span content non-empty after trimming (missing span counts)
struct ViolationVector {
  std::array<bool, kConstraintCount> bits{};

  int count() const;
  bool any() const;
  std::string describe() const;  // e.g. "c4,c9"
  bool operator==(const ViolationVector&) const = default;
};

ViolationVector check_constraints(std::string_view raw,
                                  const TagSpec& tags = TagSpec::defaults());

// 1 - violations/9, in [0,1].
double format_reward(const ViolationVector& v);
double format_reward(std::string_view raw, const TagSpec& tags = TagSpec::defaults());

class MalformedError : public Error {
 public:
  explicit MalformedError(ViolationVector violations);
  const ViolationVector& violations() const { return violations_; }

 private:
  ViolationVector violations_;
};

// First-match extraction of one span, trimmed; independent of the other
// constraints, so a partial output can still surface its emotion span.
std::optional<std::string> extract_span(std::string_view raw, int span,
                                        const TagSpec& tags = TagSpec::defaults());

// Succeeds exactly when check_constraints is all-clear.
std::optional<FourSpanOutput> try_parse_four_span(std::string_view raw,
                                                  const TagSpec& tags = TagSpec::defaults());
FourSpanOutput parse_four_span(std::string_view raw, const TagSpec& tags = TagSpec::defaults());

// Canonical rendering; parse_four_span(render_four_span(x)) round-trips for
// spans whose content is already trimmed and free of tag literals.
std::string render_four_span(const FourSpanOutput& spans,
                             const TagSpec& tags = TagSpec::defaults());

}  // namespace empath
