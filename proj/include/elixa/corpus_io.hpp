#pragma once

#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elixa/text.hpp"

namespace elixa {

struct IngestStats {
  size_t snapped_spans = 0;
  size_t skipped_reviews = 0;
};

// One JSON object per line:
//   {"id": str, "text": str,
//    "tokens": [{"surface","lemma","pos","start","end"}]?,
//    "opinions": [{"target": [int,int]|null, "category": str?, "polarity": str?}]?}
// Missing tokens are produced by the fallback tokenizer; target spans are
// snapped to token boundaries (counted in stats). Malformed lines and
// out-of-text spans raise DataError naming the line.
std::vector<Sentence> load_absa_jsonl(const std::string& path, IngestStats* stats = nullptr);

void save_absa_jsonl(const std::vector<Sentence>& sentences, const std::string& path);
std::string sentence_to_json_line(const Sentence& s);

// Streaming reader over {"id","rating","text"} lines. Reviews with a rating
// outside 1..5 are skipped and counted.
class RatedReviewReader {
 public:
  explicit RatedReviewReader(const std::string& path);
  std::optional<RatedReview> next();
  size_t skipped() const { return skipped_; }

 private:
  std::string path_;
  std::ifstream in_;
  size_t lineno_ = 0;
  size_t skipped_ = 0;
};

// SemEval-2015 ABSA style XML (Reviews/Review/sentences/sentence with
// Opinion target/category/polarity/from/to attributes) -> sentences.
std::vector<Sentence> load_semeval_xml(const std::string& path, IngestStats* stats = nullptr);

}  // namespace elixa
