#include <doctest.h>

#include "cwsd/error.hpp"
#include "cwsd/tagcodec.hpp"
#include "fixtures.hpp"

using namespace cwsd;
using cwsd::testing::words_of;

TEST_CASE("words_to_tags follows the per-word BMES rule") {
  using enum Tag;
  CHECK(words_to_tags(words_of({U"很火", U"最近", U"人工智能"})) ==
        std::vector<Tag>{B, E, B, E, B, M, M, E});
  CHECK(words_to_tags(words_of({U"人"})) == std::vector<Tag>{S});
  CHECK(words_to_tags(words_of({U"人工", U"智", U"能力强"})) ==
        std::vector<Tag>{B, E, S, B, M, E});
  CHECK(words_to_tags(Sentence{}).empty());
}

TEST_CASE("words_to_tags rejects empty words") {
  const Sentence words = {U"人", U""};
  CHECK_THROWS_AS(words_to_tags(words), Error);
}

TEST_CASE("tags_to_words inverts and repairs") {
  using enum Tag;
  const std::vector<Tag> tags{B, E, B, E, B, M, M, E};
  CHECK(tags_to_words(U"很火最近人工智能", tags) == words_of({U"很火", U"最近", U"人工智能"}));
  const std::vector<Tag> single{S};
  CHECK(tags_to_words(U"人", single) == words_of({U"人"}));
  const std::vector<Tag> broken{S, M, E};
  CHECK(tags_to_words(U"abc", broken) == words_of({U"a", U"bc"}));
  const std::vector<Tag> dangling{B, M};
  CHECK(tags_to_words(U"ab", dangling) == words_of({U"ab"}));
}

TEST_CASE("tags_to_words length mismatch") {
  const std::vector<Tag> tags{Tag::S};
  try {
    tags_to_words(U"ab", tags);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidInput);
  }
}

TEST_CASE("transition legality") {
  CHECK_FALSE(is_valid_transition(Tag::S, Tag::M));
  CHECK_FALSE(is_valid_transition(Tag::E, Tag::M));
  CHECK(is_valid_transition(Tag::B, Tag::M));
  int legal = 0;
  for (Tag a : kAllTags) {
    for (Tag b : kAllTags) legal += is_valid_transition(a, b);
  }
  CHECK(legal == 8);
  CHECK(index_of(Tag::B) == 0);
  CHECK(index_of(Tag::M) == 1);
  CHECK(index_of(Tag::E) == 2);
  CHECK(index_of(Tag::S) == 3);
}

TEST_CASE("codec round trip and validity over random segmentations") {
  Rng rng(7);
  const std::u32string alphabet = U"人工智能最近很火ab";
  for (int trial = 0; trial < 2000; ++trial) {
    const auto words = cwsd::testing::random_segmentation(rng, alphabet);
    const auto tags = words_to_tags(words);
    REQUIRE(is_valid_sequence(tags));
    REQUIRE(tags_to_words(join_words(words), tags) == words);
  }
}

TEST_CASE("tags_to_words is total over arbitrary tag sequences") {
  Rng rng(11);
  std::uniform_int_distribution<int> tag(0, 3), len(0, 12);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = len(rng);
    std::u32string chars(static_cast<size_t>(n), U'x');
    std::vector<Tag> tags;
    for (int i = 0; i < n; ++i) tags.push_back(tag_from_index(tag(rng)));
    const auto words = tags_to_words(chars, tags);
    REQUIRE(join_words(words) == chars);
    for (const auto& w : words) REQUIRE_FALSE(w.empty());
  }
}
