#include <doctest.h>

#include "empath/common.hpp"

using namespace empath;

TEST_SUITE("common") {

TEST_CASE("trim strips ascii whitespace from both ends") {
  CHECK(trim_copy("  a b \t\n") == "a b");
  CHECK(trim_copy("") == "");
  CHECK(trim_copy(" \t \r\n") == "");
  CHECK(trim_view("x") == "x");
}

TEST_CASE("case folding is ascii only") {
  CHECK(lower_copy("InFj") == "infj");
  CHECK(upper_copy("estp") == "ESTP");
}

TEST_CASE("whitespace token count counts maximal nonspace runs") {
  CHECK(whitespace_token_count("") == 0);
  CHECK(whitespace_token_count("   ") == 0);
  CHECK(whitespace_token_count("a") == 1);
  CHECK(whitespace_token_count(" a  bb\tccc\n") == 3);
  CHECK(whitespace_token_count("I'm here with you; tell me more") == 7);
}

TEST_CASE("edit distance") {
  CHECK(edit_distance("", "abc") == 3);
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("same", "same") == 0);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(hash_hex(0x5ULL).size() == 16);  // zero padded
}

TEST_CASE("mix_seed decorrelates consecutive indices") {
  CHECK(mix_seed(42, 0) != mix_seed(42, 1));
  CHECK(mix_seed(42, 0) != mix_seed(43, 0));
  CHECK(mix_seed(42, 7) == mix_seed(42, 7));
}

TEST_CASE("error code names are stable upper snake") {
  CHECK(error_code_name(ErrorCode::InvalidMbti) == "INVALID_MBTI");
  CHECK(error_code_name(ErrorCode::AuthMissing) == "AUTH_MISSING");
  CHECK(error_code_name(ErrorCode::ExhaustedRetries) == "EXHAUSTED_RETRIES");
  CHECK(error_code_name(ErrorCode::SchemaViolation) == "SCHEMA_VIOLATION");
}

TEST_CASE("fail throws an Error carrying the code") {
  try {
    fail(ErrorCode::IoError, "boom");
    FAIL("unreachable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
    CHECK(std::string(e.what()) == "boom");
  }
}

}  // TEST_SUITE
