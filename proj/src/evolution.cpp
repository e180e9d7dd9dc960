#include "hymem/evolution.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

namespace hymem {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Models violate their own "no markdown" instruction often enough that the
// parser strips one surrounding code fence before parsing.
std::string strip_code_fence(const std::string& raw) {
  std::string s = trim(raw);
  if (s.rfind("```", 0) != 0) return s;
  size_t first_newline = s.find('\n');
  if (first_newline == std::string::npos) return "";
  size_t closing = s.rfind("```");
  if (closing > first_newline) {
    return trim(std::string_view(s).substr(first_newline + 1, closing - first_newline - 1));
  }
  return trim(std::string_view(s).substr(first_newline + 1));
}

std::string require_string_field(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) throw MalformedDecision(field, "missing");
  if (!it->is_string()) throw MalformedDecision(field, "must be a string");
  std::string value = trim(it->get<std::string>());
  if (value.empty()) throw MalformedDecision(field, "empty");
  return value;
}

}  // namespace

EvolutionDecision parse_evolution_decision(const std::string& raw,
                                           const std::set<std::string>& candidate_ids) {
  std::string s = strip_code_fence(raw);
  json j = json::parse(s, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedDecision("json", "not a JSON object");
  }

  std::string action = lower(require_string_field(j, "action"));
  std::string reasoning;
  if (auto it = j.find("reasoning"); it != j.end() && it->is_string()) {
    reasoning = it->get<std::string>();
  }

  if (action == "add") {
    return EvolutionDecision::make_add(std::move(reasoning));
  }

  if (action == "update" || action == "merge") {
    std::string target = require_string_field(j, "target_id");
    if (!candidate_ids.count(target)) {
      throw MalformedDecision("target_id", target + " is not among the candidates");
    }
    std::string takeaway = strip_takeaway_prefix(require_string_field(j, "updated_takeaway"));
    if (takeaway.empty()) throw MalformedDecision("updated_takeaway", "empty after prefix");

    auto tags_it = j.find("updated_tags");
    if (tags_it == j.end() || !tags_it->is_array()) {
      throw MalformedDecision("updated_tags", "missing or not an array");
    }
    std::vector<AttributeTag> tags;
    std::set<AttributeTag> seen;
    for (const json& entry : *tags_it) {
      if (!entry.is_string()) throw MalformedDecision("updated_tags", "entries must be strings");
      try {
        AttributeTag tag = normalize_tag(entry.get<std::string>());
        if (seen.insert(tag).second) tags.push_back(std::move(tag));
      } catch (const EmptyTag&) {
        // blank entry from the judge; skip it
      }
    }
    if (tags.empty()) throw MalformedDecision("updated_tags", "no usable tags");
    return EvolutionDecision::make_merge(std::move(reasoning), std::move(target),
                                         std::move(takeaway), std::move(tags));
  }

  if (action == "replace") {
    std::string old_id = require_string_field(j, "old_id");
    if (!candidate_ids.count(old_id)) {
      throw MalformedDecision("old_id", old_id + " is not among the candidates");
    }
    return EvolutionDecision::make_replace(std::move(reasoning), std::move(old_id));
  }

  throw MalformedDecision("action", "unknown action \"" + action + "\"");
}

CandidateView build_candidate_view(const MemoryNode& node, std::optional<double> similarity) {
  CandidateView view;
  view.id = node.node_id;
  view.task_description = node.task_text;
  view.takeaway = node.strategy;
  view.tags.assign(node.attributes.begin(), node.attributes.end());
  view.domain = node.domain_tag;
  view.screenshot_uri = node.first_screenshot.uri;
  view.similarity = similarity;
  return view;
}

CandidateView build_candidate_view(const TrajectoryRecord& traj, const std::string& strategy,
                                   const std::set<AttributeTag>& tags) {
  CandidateView view;
  view.id = traj.id;
  view.task_description = traj.task_text;
  view.takeaway = strategy;
  view.tags.assign(tags.begin(), tags.end());
  view.domain = traj.domain_tag;
  view.screenshot_uri = traj.observations.empty() ? "" : traj.observations.front().uri;
  return view;
}

IngestReport EvolutionPipeline::ingest(const TrajectoryRecord& traj, size_t k) {
  std::lock_guard<std::mutex> serialize(ingest_mu_);

  traj.validate();
  if (graph_.has_trajectory(traj.id)) {
    throw DuplicateId("trajectory " + traj.id + " was already ingested");
  }

  SemanticVector v = build_semantic_vector(traj.task_text, traj.observations.front(), encoder_);
  IngestReport report;
  report.neighbors_considered = graph_.knn(v, k);

  std::string strategy = encode_strategy(traj, judge_);
  std::set<AttributeTag> tags = extract_tags(strategy, judge_);
  EmbeddingBlock block = encoder_.embed_trajectory(traj);

  if (report.neighbors_considered.empty() || k == 0) {
    report.decision = EvolutionDecision::make_add("store has no comparison candidates");
    report.forced_add = true;
  } else {
    CandidateView incoming = build_candidate_view(traj, strategy, tags);
    std::vector<CandidateView> neighbor_views;
    std::set<std::string> candidate_ids;
    neighbor_views.reserve(report.neighbors_considered.size());
    for (const auto& [id, sim] : report.neighbors_considered) {
      neighbor_views.push_back(build_candidate_view(graph_.node(id), sim));
      candidate_ids.insert(id);
    }
    std::string raw = judge_.judge_evolution(incoming, neighbor_views);
    try {
      report.decision = parse_evolution_decision(raw, candidate_ids);
    } catch (const MalformedDecision& e) {
      report.decision = EvolutionDecision::make_add("fallback after malformed judge output");
      report.fallback_used = true;
      report.parse_error = e.what();
    }
  }

  auto build_node = [&] {
    MemoryNode node;
    node.node_id = graph_.mint_node_id();
    node.strategy = strategy;
    node.task_text = traj.task_text;
    node.domain_tag = traj.domain_tag;
    node.first_screenshot = traj.observations.front();
    node.attributes = tags;
    node.embedding = block;
    node.semantic = v;
    node.source_trajectory_ids = {traj.id};
    return node;
  };

  switch (report.decision.action) {
    case EvolutionDecision::Action::add:
      report.node_id = graph_.apply_add(build_node());
      break;
    case EvolutionDecision::Action::merge:
      graph_.apply_merge(report.decision.target_id, report.decision.updated_takeaway,
                         report.decision.updated_tags, traj.id, block);
      report.node_id = report.decision.target_id;
      break;
    case EvolutionDecision::Action::replace:
      report.node_id = graph_.apply_replace(report.decision.old_id, build_node());
      break;
  }
  return report;
}

}  // namespace hymem
