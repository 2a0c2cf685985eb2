#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "elixa/corpus_io.hpp"
#include "elixa/util.hpp"

using namespace elixa;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
  std::ofstream out(name);
  out << content;
  return name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("absa jsonl round-trips sentences exactly") {
  Sentence s;
  s.id = "s1";
  s.text = "The crème brûlée was great .";
  s.tokens = tokenize(s.text);
  s.tokens[1].lemma = "crème";
  s.tokens[1].pos = "NN";
  Opinion with_target;
  with_target.target = Span{4, 19};  // byte offsets: è and û/é are two bytes each
  with_target.category = "FOOD#QUALITY";
  with_target.polarity = "positive";
  Opinion null_target;
  null_target.category = "SERVICE#GENERAL";
  null_target.polarity = "negative";
  s.opinions = {with_target, null_target};

  std::string path = "rt_test.tmp";
  save_absa_jsonl({s}, path);
  IngestStats stats;
  auto loaded = load_absa_jsonl(path, &stats);

  REQUIRE(loaded.size() == 1);
  const Sentence& r = loaded[0];
  CHECK(r.id == s.id);
  CHECK(r.text == s.text);
  REQUIRE(r.tokens.size() == s.tokens.size());
  for (size_t i = 0; i < r.tokens.size(); ++i) {
    CHECK(r.tokens[i].surface == s.tokens[i].surface);
    CHECK(r.tokens[i].lemma == s.tokens[i].lemma);
    CHECK(r.tokens[i].pos == s.tokens[i].pos);
    CHECK(r.tokens[i].start == s.tokens[i].start);
    CHECK(r.tokens[i].end == s.tokens[i].end);
  }
  REQUIRE(r.opinions.size() == 2);
  CHECK(r.opinions[0].target == with_target.target);
  CHECK(r.opinions[0].category == "FOOD#QUALITY");
  CHECK(r.opinions[0].polarity == "positive");
  CHECK_FALSE(r.opinions[1].target.has_value());
  CHECK(stats.snapped_spans == 0);

  // Saving what we loaded reproduces the file byte for byte.
  std::string path2 = "rt_test2.tmp";
  save_absa_jsonl(loaded, path2);
  CHECK(slurp(path) == slurp(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("absa jsonl falls back to the tokenizer when tokens are absent") {
  std::string path = write_tmp("notok_test.tmp",
                               R"({"id": "a", "text": "Nice pizza!"})"
                               "\n");
  auto loaded = load_absa_jsonl(path);
  REQUIRE(loaded.size() == 1);
  REQUIRE(loaded[0].tokens.size() == 3);
  CHECK(loaded[0].tokens[0].surface == "Nice");
  CHECK(loaded[0].tokens[0].lemma == "nice");
  CHECK(loaded[0].tokens[0].pos == "UNK");
  CHECK(loaded[0].tokens[2].surface == "!");
  std::remove(path.c_str());
}

TEST_CASE("absa jsonl snaps mid-token targets and counts them") {
  std::string path = write_tmp(
      "snap_test.tmp",
      R"({"id": "a", "text": "The soup was cold.", "opinions": [{"target": [5, 7]}]})"
      "\n");
  IngestStats stats;
  auto loaded = load_absa_jsonl(path, &stats);
  REQUIRE(loaded.size() == 1);
  REQUIRE(loaded[0].opinions.size() == 1);
  CHECK(*loaded[0].opinions[0].target == Span{4, 8});  // "soup"
  CHECK(stats.snapped_spans == 1);
  std::remove(path.c_str());
}

TEST_CASE("absa jsonl names the offending line") {
  SUBCASE("syntax error") {
    std::string path = write_tmp("bad_test.tmp",
                                 R"({"id": "a", "text": "fine"})"
                                 "\n{\"id\": \"b\"\n");
    CHECK_THROWS_WITH_AS(load_absa_jsonl(path), doctest::Contains(":2"), DataError);
    std::remove(path.c_str());
  }
  SUBCASE("target outside text") {
    std::string path = write_tmp("oob_test.tmp",
                                 R"({"id": "a", "text": "ab", "opinions": [{"target": [0, 9]}]})"
                                 "\n");
    CHECK_THROWS_WITH_AS(load_absa_jsonl(path), doctest::Contains("outside text"), DataError);
    std::remove(path.c_str());
  }
  SUBCASE("overlapping tokens") {
    std::string path = write_tmp(
        "ovl_test.tmp",
        R"({"id": "a", "text": "abcd", "tokens": [{"surface": "ab", "start": 0, "end": 3}, {"surface": "cd", "start": 2, "end": 4}]})"
        "\n");
    CHECK_THROWS_WITH_AS(load_absa_jsonl(path), doctest::Contains("overlap"), DataError);
    std::remove(path.c_str());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_absa_jsonl("no_such_file.tmp"), DataError);
  }
}

TEST_CASE("rated review reader skips out-of-range ratings") {
  std::string path = write_tmp("rev_test.tmp",
                               R"({"id": "r1", "rating": 5, "text": "Loved it."})"
                               "\n"
                               R"({"id": "r2", "rating": 0, "text": "zero"})"
                               "\n"
                               R"({"id": "r3", "rating": 6, "text": "six"})"
                               "\n\n"
                               R"({"id": "r4", "rating": 1, "text": "Hated it."})"
                               "\n");
  RatedReviewReader reader(path);
  auto a = reader.next();
  REQUIRE(a.has_value());
  CHECK(a->id == "r1");
  CHECK(a->rating == 5);
  auto b = reader.next();
  REQUIRE(b.has_value());
  CHECK(b->id == "r4");
  CHECK(b->text == "Hated it.");
  CHECK_FALSE(reader.next().has_value());
  CHECK(reader.skipped() == 2);
  std::remove(path.c_str());
}

TEST_CASE("rated review reader raises on malformed lines") {
  std::string path = write_tmp("revbad_test.tmp", "{\"id\": \"r1\"\n");
  RatedReviewReader reader(path);
  CHECK_THROWS_WITH_AS(reader.next(), doctest::Contains(":1"), DataError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(RatedReviewReader("no_such_file.tmp"), DataError);
}

TEST_CASE("semeval xml ingestion") {
  std::string xml =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<Reviews>\n"
      " <Review rid=\"r1\">\n"
      "  <sentences>\n"
      "   <sentence id=\"r1:0\">\n"
      "    <text>Fish &amp; chips were &quot;great&quot; here.</text>\n"
      "    <Opinions>\n"
      "     <Opinion target=\"Fish &amp; chips\" category=\"FOOD#QUALITY\""
      " polarity=\"positive\" from=\"0\" to=\"12\"/>\n"
      "    </Opinions>\n"
      "   </sentence>\n"
      "   <sentence id=\"r1:1\">\n"
      "    <text>Terrible service.</text>\n"
      "    <Opinions>\n"
      "     <Opinion target=\"NULL\" category=\"SERVICE#GENERAL\""
      " polarity=\"negative\" from=\"0\" to=\"0\"/>\n"
      "    </Opinions>\n"
      "   </sentence>\n"
      "   <sentence id=\"r1:2\">\n"
      "    <text>The soup was cold.</text>\n"
      "    <Opinions>\n"
      "     <Opinion target=\"soup\" category=\"FOOD#QUALITY\""
      " polarity=\"negative\" from=\"5\" to=\"7\"/>\n"
      "    </Opinions>\n"
      "   </sentence>\n"
      "  </sentences>\n"
      " </Review>\n"
      "</Reviews>\n";
  std::string path = write_tmp("sx_test.tmp", xml);
  IngestStats stats;
  auto loaded = load_semeval_xml(path, &stats);
  REQUIRE(loaded.size() == 3);

  CHECK(loaded[0].id == "r1:0");
  CHECK(loaded[0].text == "Fish & chips were \"great\" here.");
  REQUIRE(loaded[0].opinions.size() == 1);
  CHECK(*loaded[0].opinions[0].target == Span{0, 12});  // already token-aligned
  CHECK(loaded[0].opinions[0].category == "FOOD#QUALITY");
  CHECK(loaded[0].opinions[0].polarity == "positive");
  CHECK(!loaded[0].tokens.empty());

  CHECK_FALSE(loaded[1].opinions[0].target.has_value());
  CHECK(loaded[1].opinions[0].category == "SERVICE#GENERAL");

  CHECK(*loaded[2].opinions[0].target == Span{4, 8});  // snapped out to "soup"
  CHECK(stats.snapped_spans == 1);
  std::remove(path.c_str());
}
