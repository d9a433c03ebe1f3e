#include "empath/span_format.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace empath {

std::string_view span_name(int span) {
  switch (span) {
    case kUnderstandingSpan: return "understanding";
    case kReasoningSpan: return "reasoning";
    case kEmotionSpan: return "emotion";
    case kResponseSpan: return "response";
  }
  return "";
}

const TagSpec& TagSpec::defaults() {
  static const TagSpec instance(std::array<std::string, 8>{
      "<|understanding_begin|>", "<|understanding_end|>",
      "<|reasoning_begin|>", "<|reasoning_end|>",
      "<|emotion_begin|>", "<|emotion_end|>",
      "<|response_begin|>", "<|response_end|>"});
  return instance;
}

TagSpec::TagSpec(std::array<std::string, 8> tags) : tags_(std::move(tags)) {
  for (int i = 0; i < 8; ++i) {
    if (tags_[i].empty()) fail(ErrorCode::InvalidArgument, "tag literal must be non-empty");
    for (int j = i + 1; j < 8; ++j) {
      if (tags_[i] == tags_[j]) {
        fail(ErrorCode::InvalidArgument, "tag literals must be pairwise distinct: " + tags_[i]);
      }
    }
  }
}

int ViolationVector::count() const {
  int n = 0;
  for (bool b : bits) n += b ? 1 : 0;
  return n;
}

bool ViolationVector::any() const {
  return std::any_of(bits.begin(), bits.end(), [](bool b) { return b; });
}

std::string ViolationVector::describe() const {
  std::ostringstream out;
  bool first = true;
  for (int i = 0; i < kConstraintCount; ++i) {
    if (!bits[i]) continue;
    if (!first) out << ",";
    out << "c" << (i + 1);
    first = false;
  }
  return out.str();
}

namespace {

struct TagHit {
  std::size_t pos;
  int tag;  // index into canonical order 0..7
};

std::vector<TagHit> all_tag_hits(std::string_view raw, const TagSpec& tags) {
  std::vector<TagHit> hits;
  for (int t = 0; t < 8; ++t) {
    std::string_view literal = tags.tag(t);
    std::size_t from = 0;
    while (true) {
      std::size_t pos = raw.find(literal, from);
      if (pos == std::string_view::npos) break;
      hits.push_back({pos, t});
      from = pos + literal.size();
    }
  }
  std::sort(hits.begin(), hits.end(), [](const TagHit& a, const TagHit& b) {
    return a.pos != b.pos ? a.pos < b.pos : a.tag < b.tag;
  });
  return hits;
}

struct SpanSlice {
  bool present = false;
  std::size_t begin = 0;  // content start
  std::size_t end = 0;    // content end
};

SpanSlice locate_span(std::string_view raw, int span, const TagSpec& tags) {
  SpanSlice slice;
  std::string_view begin_tag = tags.begin_tag(span);
  std::string_view end_tag = tags.end_tag(span);
  std::size_t b = raw.find(begin_tag);
  if (b == std::string_view::npos) return slice;
  std::size_t content_start = b + begin_tag.size();
  std::size_t e = raw.find(end_tag, content_start);
  if (e == std::string_view::npos) return slice;
  slice.present = true;
  slice.begin = content_start;
  slice.end = e;
  return slice;
}

}  // namespace

ViolationVector check_constraints(std::string_view raw, const TagSpec& tags) {
  ViolationVector v;
  for (int span = 0; span < kSpanCount; ++span) {
    SpanSlice slice = locate_span(raw, span, tags);
    if (!slice.present) {
      v.bits[span] = true;
      v.bits[5 + span] = true;  // a missing span cannot have content
    } else {
      std::string_view content = raw.substr(slice.begin, slice.end - slice.begin);
      if (trim_view(content).empty()) v.bits[5 + span] = true;
    }
  }
  // Ordering: the observed tag sequence must embed into the canonical order,
  // which also rules out duplicate occurrences.
  std::vector<TagHit> hits = all_tag_hits(raw, tags);
  int next_allowed = 0;
  for (const TagHit& hit : hits) {
    if (hit.tag < next_allowed) {
      v.bits[4] = true;
      break;
    }
    next_allowed = hit.tag + 1;
  }
  return v;
}

double format_reward(const ViolationVector& v) {
  return 1.0 - static_cast<double>(v.count()) / kConstraintCount;
}

double format_reward(std::string_view raw, const TagSpec& tags) {
  return format_reward(check_constraints(raw, tags));
}

MalformedError::MalformedError(ViolationVector violations)
    : Error(ErrorCode::Malformed, "output violates format constraints: " + violations.describe()),
      violations_(violations) {}

std::optional<std::string> extract_span(std::string_view raw, int span, const TagSpec& tags) {
  SpanSlice slice = locate_span(raw, span, tags);
  if (!slice.present) return std::nullopt;
  return trim_copy(raw.substr(slice.begin, slice.end - slice.begin));
}

std::optional<FourSpanOutput> try_parse_four_span(std::string_view raw, const TagSpec& tags) {
  if (check_constraints(raw, tags).any()) return std::nullopt;
  FourSpanOutput out;
  std::string* fields[kSpanCount] = {&out.understanding, &out.reasoning, &out.emotion,
                                     &out.response};
  for (int span = 0; span < kSpanCount; ++span) {
    auto content = extract_span(raw, span, tags);
    if (!content || content->empty()) return std::nullopt;
    *fields[span] = std::move(*content);
  }
  return out;
}

FourSpanOutput parse_four_span(std::string_view raw, const TagSpec& tags) {
  ViolationVector v = check_constraints(raw, tags);
  if (v.any()) throw MalformedError(v);
  auto out = try_parse_four_span(raw, tags);
  if (!out) throw MalformedError(v);
  return *out;
}

std::string render_four_span(const FourSpanOutput& spans, const TagSpec& tags) {
  std::string out;
  const std::string* fields[kSpanCount] = {&spans.understanding, &spans.reasoning, &spans.emotion,
                                           &spans.response};
  for (int span = 0; span < kSpanCount; ++span) {
    out.append(tags.begin_tag(span));
    out.append(*fields[span]);
    out.append(tags.end_tag(span));
  }
  return out;
}

}  // namespace empath
