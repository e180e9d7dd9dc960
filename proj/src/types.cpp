#include "hymem/types.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace hymem {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

double norm2(const std::vector<float>& v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

}  // namespace

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

void StoreParams::validate() const {
  if (text_dim == 0 || image_dim == 0 || block_dim == 0 || block_len == 0) {
    throw ConfigError("store dimensions must be positive");
  }
}

std::string_view to_string(TrajectorySource source) {
  switch (source) {
    case TrajectorySource::human_demo: return "human_demo";
    case TrajectorySource::agent_rollout: return "agent_rollout";
    case TrajectorySource::external_dataset: return "external_dataset";
  }
  return "agent_rollout";
}

TrajectorySource trajectory_source_from_string(std::string_view s) {
  if (s == "human_demo") return TrajectorySource::human_demo;
  if (s == "agent_rollout") return TrajectorySource::agent_rollout;
  if (s == "external_dataset") return TrajectorySource::external_dataset;
  throw InvalidTrajectory("unknown trajectory source: " + std::string(s));
}

void TrajectoryRecord::validate() const {
  if (trim(id).empty()) throw InvalidTrajectory("trajectory id is empty");
  if (observations.empty()) {
    throw InvalidTrajectory("trajectory " + id + " has no observations");
  }
}

AttributeTag normalize_tag(std::string_view raw) {
  std::string s = trim(raw);
  if (s.empty()) throw EmptyTag("tag is empty after trimming");

  char sigil = '#';
  size_t i = 0;
  while (i < s.size() && (s[i] == '#' || s[i] == '$')) {
    if (i == 0) sigil = s[i];
    ++i;
  }
  std::string body = trim(std::string_view(s).substr(i));
  if (body.empty()) throw EmptyTag("tag has no content after its sigil");

  std::string out;
  out.reserve(body.size() + 1);
  out.push_back(sigil);
  bool pending_gap = false;
  for (char c : body) {
    if (is_space(c)) {
      pending_gap = true;
      continue;
    }
    if (pending_gap) {
      out.push_back('-');
      pending_gap = false;
    }
    out.push_back(to_lower(c));
  }
  return AttributeTag{std::move(out)};
}

namespace {

template <typename Container>
std::string join_tags(const Container& tags) {
  std::string out;
  bool first = true;
  for (const AttributeTag& tag : tags) {
    if (!first) out += ", ";
    out += tag.text;
    first = false;
  }
  return out;
}

}  // namespace

std::string format_tags(const std::set<AttributeTag>& tags) { return join_tags(tags); }
std::string format_tags(const std::vector<AttributeTag>& tags) { return join_tags(tags); }

double SemanticVector::cosine(const SemanticVector& other) const {
  if (text_part.size() != other.text_part.size() ||
      image_part.size() != other.image_part.size()) {
    throw DimMismatch("semantic vector dimensions differ");
  }
  double dot = 0.0;
  for (size_t i = 0; i < text_part.size(); ++i) {
    dot += static_cast<double>(text_part[i]) * static_cast<double>(other.text_part[i]);
  }
  for (size_t i = 0; i < image_part.size(); ++i) {
    dot += static_cast<double>(image_part[i]) * static_cast<double>(other.image_part[i]);
  }
  double na = std::sqrt(norm2(text_part) * norm2(text_part) +
                        norm2(image_part) * norm2(image_part));
  double nb = std::sqrt(norm2(other.text_part) * norm2(other.text_part) +
                        norm2(other.image_part) * norm2(other.image_part));
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine of a zero vector is undefined");
  return dot / (na * nb);
}

void SemanticVector::validate(uint32_t text_dim, uint32_t image_dim, double tol) const {
  if (text_part.size() != text_dim || image_part.size() != image_dim) {
    std::ostringstream msg;
    msg << "semantic vector dims (" << text_part.size() << ", " << image_part.size()
        << ") do not match store dims (" << text_dim << ", " << image_dim << ")";
    throw DimMismatch(msg.str());
  }
  if (std::abs(norm2(text_part) - 1.0) > tol || std::abs(norm2(image_part) - 1.0) > tol) {
    throw ZeroVector("semantic vector halves must be unit-normalized");
  }
}

void EmbeddingBlock::validate(uint32_t block_dim, uint32_t block_len) const {
  if (vectors.size() != block_len) {
    throw DimMismatch("embedding block must hold exactly " + std::to_string(block_len) +
                      " vectors, got " + std::to_string(vectors.size()));
  }
  for (const auto& v : vectors) {
    if (v.size() != block_dim) {
      throw DimMismatch("embedding block vector dim " + std::to_string(v.size()) +
                        " does not match store dim " + std::to_string(block_dim));
    }
  }
}

void MemoryNode::validate(const StoreParams& params) const {
  if (trim(node_id).empty()) throw InvalidTrajectory("node id is empty");
  if (trim(strategy).empty()) throw EmptyStrategy("node " + node_id + " has an empty strategy");
  if (attributes.empty()) throw EmptyTag("node " + node_id + " has no attribute tags");
  if (merge_count > 0 && source_trajectory_ids.size() < 2) {
    throw InvalidTrajectory("node " + node_id +
                            " was merged but records fewer than two source trajectories");
  }
  semantic.validate(params.text_dim, params.image_dim);
  embedding.validate(params.block_dim, params.block_len);
}

EvolutionDecision EvolutionDecision::make_add(std::string reasoning) {
  EvolutionDecision d;
  d.action = Action::add;
  d.reasoning = std::move(reasoning);
  return d;
}

EvolutionDecision EvolutionDecision::make_merge(std::string reasoning, std::string target_id,
                                                std::string updated_takeaway,
                                                std::vector<AttributeTag> updated_tags) {
  EvolutionDecision d;
  d.action = Action::merge;
  d.reasoning = std::move(reasoning);
  d.target_id = std::move(target_id);
  d.updated_takeaway = std::move(updated_takeaway);
  d.updated_tags = std::move(updated_tags);
  d.validate();
  return d;
}

EvolutionDecision EvolutionDecision::make_replace(std::string reasoning, std::string old_id) {
  EvolutionDecision d;
  d.action = Action::replace;
  d.reasoning = std::move(reasoning);
  d.old_id = std::move(old_id);
  d.validate();
  return d;
}

void EvolutionDecision::validate() const {
  switch (action) {
    case Action::add:
      break;
    case Action::merge:
      if (target_id.empty()) throw MalformedDecision("target_id", "required for merge");
      if (trim(updated_takeaway).empty()) {
        throw MalformedDecision("updated_takeaway", "required for merge");
      }
      if (updated_tags.empty()) {
        throw MalformedDecision("updated_tags", "required for merge");
      }
      break;
    case Action::replace:
      if (old_id.empty()) throw MalformedDecision("old_id", "required for replace");
      break;
  }
}

std::string_view to_string(EvolutionDecision::Action action) {
  switch (action) {
    case EvolutionDecision::Action::add: return "add";
    case EvolutionDecision::Action::merge: return "merge";
    case EvolutionDecision::Action::replace: return "replace";
  }
  return "add";
}

std::string strip_takeaway_prefix(std::string_view text) {
  std::string s = trim(text);
  constexpr std::string_view kPrefix = "takeaway:";
  if (s.size() >= kPrefix.size()) {
    bool match = true;
    for (size_t i = 0; i < kPrefix.size(); ++i) {
      if (to_lower(s[i]) != kPrefix[i]) {
        match = false;
        break;
      }
    }
    if (match) return trim(std::string_view(s).substr(kPrefix.size()));
  }
  return s;
}

}  // namespace hymem
