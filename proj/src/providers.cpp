#include "hymem/providers.hpp"

#include <cctype>
#include <cmath>
#include <unordered_set>

namespace hymem {

namespace {

std::vector<float> unit_normalize(std::vector<float> v, const char* what) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  double norm = std::sqrt(acc);
  if (norm == 0.0) throw ZeroVector(std::string(what) + " encoder returned the zero vector");
  for (float& x : v) x = static_cast<float>(static_cast<double>(x) / norm);
  return v;
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",  "an",  "the", "and", "or",  "to",   "of",  "in",   "on",  "at",   "for",
      "by", "with", "from", "is", "are", "was", "were", "be",  "been", "it",  "its",
      "this", "that", "as", "if", "then", "than", "into", "onto"};
  return kWords;
}

}  // namespace

SemanticVector build_semantic_vector(const std::string& task_text, const ImageRef& first_obs,
                                     EncoderProvider& enc) {
  SemanticVector v;
  v.text_part = unit_normalize(enc.embed_text(task_text), "text");
  v.image_part = unit_normalize(enc.embed_image(first_obs), "image");
  v.validate(enc.params().text_dim, enc.params().image_dim);
  return v;
}

std::string encode_strategy(const TrajectoryRecord& traj, JudgeProvider& judge) {
  std::string raw = judge.summarize_strategy(traj);
  // Single paragraph: fold line breaks into spaces before stripping.
  for (char& c : raw) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::string strategy = strip_takeaway_prefix(raw);
  if (strategy.empty()) {
    throw EmptyStrategy("judge returned a blank strategy for trajectory " + traj.id);
  }
  return strategy;
}

std::set<AttributeTag> content_word_tags(const std::string& strategy, size_t max_tags) {
  std::set<AttributeTag> tags;
  std::vector<AttributeTag> ordered;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (!stopwords().count(word) && ordered.size() < max_tags) {
      AttributeTag tag = normalize_tag(word);
      if (!tags.count(tag)) {
        tags.insert(tag);
        ordered.push_back(tag);
      }
    }
    word.clear();
  };
  for (char c : strategy) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
    if (ordered.size() >= max_tags) break;
  }
  flush();
  return tags;
}

std::set<AttributeTag> extract_tags(const std::string& strategy, JudgeProvider& judge) {
  std::set<AttributeTag> tags;
  std::string raw;
  try {
    raw = judge.extract_tags_raw(strategy);
  } catch (const JudgeFailure&) {
    raw.clear();  // fall through to the content-word fallback
  }

  std::string token;
  auto flush = [&] {
    std::string t = trim(token);
    token.clear();
    if (t.empty()) return;
    try {
      tags.insert(normalize_tag(t));
    } catch (const EmptyTag&) {
      // sigil-only or whitespace token from the judge; skip it
    }
  };
  for (char c : raw) {
    if (c == ',' || c == '\n' || c == ';') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();

  if (tags.empty()) tags = content_word_tags(strategy);
  if (tags.empty()) {
    throw JudgeFailure("no usable tags for strategy and fallback found no content words");
  }
  return tags;
}

}  // namespace hymem
