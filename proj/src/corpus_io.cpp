#include "elixa/corpus_io.hpp"

#include <iostream>
#include <sstream>

#include <json.hpp>

#include "elixa/util.hpp"

namespace elixa {

using nlohmann::json;

namespace {

Sentence sentence_from_json(const json& obj, const std::string& where, IngestStats* stats) {
  Sentence s;
  s.id = obj.at("id").get<std::string>();
  s.text = obj.at("text").get<std::string>();

  if (obj.contains("tokens") && !obj["tokens"].is_null()) {
    for (const auto& jt : obj["tokens"]) {
      Token t;
      t.surface = jt.at("surface").get<std::string>();
      t.lemma = jt.contains("lemma") ? jt["lemma"].get<std::string>() : lowercase(t.surface);
      t.pos = jt.contains("pos") ? jt["pos"].get<std::string>() : "UNK";
      t.start = jt.at("start").get<size_t>();
      t.end = jt.at("end").get<size_t>();
      if (t.start >= t.end || t.end > s.text.size()) {
        throw DataError(where + ": token span [" + std::to_string(t.start) + "," +
                        std::to_string(t.end) + ") out of range");
      }
      if (!s.tokens.empty() && t.start < s.tokens.back().end) {
        throw DataError(where + ": tokens overlap or are unsorted");
      }
      s.tokens.push_back(std::move(t));
    }
  } else {
    s.tokens = tokenize(s.text);
  }

  if (obj.contains("opinions") && !obj["opinions"].is_null()) {
    for (const auto& jo : obj["opinions"]) {
      Opinion op;
      if (jo.contains("target") && !jo["target"].is_null()) {
        const auto& jt = jo["target"];
        if (!jt.is_array() || jt.size() != 2) {
          throw DataError(where + ": target must be [start,end] or null");
        }
        long long start = jt[0].get<long long>();
        long long end = jt[1].get<long long>();
        if (start < 0 || end <= start || static_cast<size_t>(end) > s.text.size()) {
          throw DataError(where + ": target span [" + std::to_string(start) + "," +
                          std::to_string(end) + ") outside text");
        }
        bool snapped = false;
        Span span = snap_to_tokens({static_cast<size_t>(start), static_cast<size_t>(end)},
                                   s.tokens, &snapped);
        if (snapped) {
          if (stats) ++stats->snapped_spans;
          std::cerr << "warning: " << where << ": target [" << start << "," << end
                    << ") snapped to [" << span.start << "," << span.end << ")\n";
        }
        op.target = span;
      }
      if (jo.contains("category") && !jo["category"].is_null()) {
        op.category = jo["category"].get<std::string>();
      }
      if (jo.contains("polarity") && !jo["polarity"].is_null()) {
        op.polarity = jo["polarity"].get<std::string>();
      }
      s.opinions.push_back(std::move(op));
    }
  }
  return s;
}

}  // namespace

std::vector<Sentence> load_absa_jsonl(const std::string& path, IngestStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<Sentence> sentences;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    json obj;
    try {
      obj = json::parse(line);
      sentences.push_back(sentence_from_json(obj, where, stats));
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return sentences;
}

std::string sentence_to_json_line(const Sentence& s) {
  json obj;
  obj["id"] = s.id;
  obj["text"] = s.text;
  json tokens = json::array();
  for (const Token& t : s.tokens) {
    tokens.push_back({{"surface", t.surface},
                      {"lemma", t.lemma},
                      {"pos", t.pos},
                      {"start", t.start},
                      {"end", t.end}});
  }
  obj["tokens"] = std::move(tokens);
  json opinions = json::array();
  for (const Opinion& op : s.opinions) {
    json jo;
    if (op.target) {
      jo["target"] = {op.target->start, op.target->end};
    } else {
      jo["target"] = nullptr;
    }
    if (!op.category.empty()) jo["category"] = op.category;
    if (!op.polarity.empty()) jo["polarity"] = op.polarity;
    opinions.push_back(std::move(jo));
  }
  obj["opinions"] = std::move(opinions);
  return obj.dump();
}

void save_absa_jsonl(const std::vector<Sentence>& sentences, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const Sentence& s : sentences) out << sentence_to_json_line(s) << '\n';
}

RatedReviewReader::RatedReviewReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw DataError("cannot open file: " + path);
}

std::optional<RatedReview> RatedReviewReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++lineno_;
    chomp(line);
    if (line.empty()) continue;
    std::string where = path_ + ":" + std::to_string(lineno_);
    json obj;
    try {
      obj = json::parse(line);
      RatedReview r;
      r.id = obj.at("id").get<std::string>();
      r.rating = obj.at("rating").get<int>();
      r.text = obj.at("text").get<std::string>();
      if (r.rating < 1 || r.rating > 5) {
        ++skipped_;
        std::cerr << "warning: " << where << ": rating " << r.rating << " outside 1..5, skipped\n";
        continue;
      }
      return r;
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Minimal scanner for the fixed SemEval review XML structure. Handles the
// five predefined entities; no general XML support.

namespace {

std::string xml_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      size_t semi = s.find(';', i);
      if (semi != std::string::npos && semi - i <= 6) {
        std::string ent = s.substr(i + 1, semi - i - 1);
        const char* rep = nullptr;
        if (ent == "amp") rep = "&";
        else if (ent == "lt") rep = "<";
        else if (ent == "gt") rep = ">";
        else if (ent == "quot") rep = "\"";
        else if (ent == "apos") rep = "'";
        if (rep) {
          out += rep;
          i = semi + 1;
          continue;
        }
      }
    }
    out += s[i++];
  }
  return out;
}

struct XmlTag {
  std::string name;
  std::unordered_map<std::string, std::string> attrs;
  bool closing = false;
  bool self_closing = false;
  size_t end_pos = 0;  // position just past '>'
};

// Parses the tag starting at s[pos] == '<'. Returns nullopt for comments,
// declarations and processing instructions (skipped via end_pos).
std::optional<XmlTag> parse_tag(const std::string& s, size_t pos, size_t* skip_to) {
  size_t close = s.find('>', pos);
  if (close == std::string::npos) throw DataError("unterminated tag in XML");
  *skip_to = close + 1;
  std::string body = s.substr(pos + 1, close - pos - 1);
  if (body.empty()) return std::nullopt;
  if (body[0] == '?' || body[0] == '!') return std::nullopt;

  XmlTag tag;
  tag.end_pos = close + 1;
  size_t i = 0;
  if (body[0] == '/') {
    tag.closing = true;
    i = 1;
  }
  if (!body.empty() && body.back() == '/') {
    tag.self_closing = true;
    body.pop_back();
  }
  while (i < body.size() && !isspace(static_cast<unsigned char>(body[i]))) {
    tag.name += body[i++];
  }
  while (i < body.size()) {
    while (i < body.size() && isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i >= body.size()) break;
    std::string key;
    while (i < body.size() && body[i] != '=' && !isspace(static_cast<unsigned char>(body[i]))) {
      key += body[i++];
    }
    while (i < body.size() && isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i < body.size() && body[i] == '=') {
      ++i;
      while (i < body.size() && isspace(static_cast<unsigned char>(body[i]))) ++i;
      if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
        char quote = body[i++];
        std::string value;
        while (i < body.size() && body[i] != quote) value += body[i++];
        if (i < body.size()) ++i;
        tag.attrs[key] = xml_unescape(value);
      }
    }
  }
  return tag;
}

}  // namespace

std::vector<Sentence> load_semeval_xml(const std::string& path, IngestStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string xml = buffer.str();

  std::vector<Sentence> sentences;
  Sentence current;
  bool in_sentence = false;
  size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    size_t skip_to = pos + 1;
    auto tag = parse_tag(xml, pos, &skip_to);
    pos = skip_to;
    if (!tag) continue;

    if (tag->name == "sentence" && !tag->closing) {
      current = Sentence{};
      current.id = tag->attrs.count("id") ? tag->attrs["id"] : "";
      in_sentence = true;
    } else if (tag->name == "sentence" && tag->closing) {
      if (in_sentence) {
        current.tokens = tokenize(current.text);
        // snap targets now that tokens exist
        for (Opinion& op : current.opinions) {
          if (!op.target) continue;
          if (op.target->end > current.text.size() || op.target->start >= op.target->end) {
            throw DataError(path + ": sentence " + current.id + ": target span [" +
                            std::to_string(op.target->start) + "," +
                            std::to_string(op.target->end) + ") outside text");
          }
          bool snapped = false;
          op.target = snap_to_tokens(*op.target, current.tokens, &snapped);
          if (snapped && stats) ++stats->snapped_spans;
        }
        sentences.push_back(std::move(current));
      }
      in_sentence = false;
    } else if (tag->name == "text" && !tag->closing && in_sentence) {
      size_t text_end = xml.find("</text>", pos);
      if (text_end == std::string::npos) throw DataError(path + ": unterminated <text>");
      current.text = xml_unescape(xml.substr(pos, text_end - pos));
      pos = text_end + 7;
    } else if (tag->name == "Opinion" && !tag->closing && in_sentence) {
      Opinion op;
      std::string target = tag->attrs.count("target") ? tag->attrs["target"] : "NULL";
      if (tag->attrs.count("category")) op.category = tag->attrs["category"];
      if (tag->attrs.count("polarity")) op.polarity = tag->attrs["polarity"];
      if (target != "NULL") {
        size_t from = tag->attrs.count("from") ? std::stoull(tag->attrs["from"]) : 0;
        size_t to = tag->attrs.count("to") ? std::stoull(tag->attrs["to"]) : 0;
        if (to > from) op.target = Span{from, to};
      }
      current.opinions.push_back(std::move(op));
    }
  }
  return sentences;
}

}  // namespace elixa
