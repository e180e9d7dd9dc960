#include "hymem/working_memory.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include "hymem/prompts.hpp"

namespace hymem {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// First whitespace-delimited token, trailing punctuation stripped.
std::string first_token(const std::string& s) {
  std::istringstream in(s);
  std::string token;
  in >> token;
  while (!token.empty() && (token.back() == '.' || token.back() == ',' || token.back() == '!')) {
    token.pop_back();
  }
  return token;
}

std::string clip_words(const std::string& s, size_t max_words) {
  std::istringstream in(s);
  std::string word;
  std::string out;
  size_t count = 0;
  while (in >> word && count < max_words) {
    if (count > 0) out += " ";
    out += word;
    ++count;
  }
  return out;
}

std::string digest_or_fallback(JudgeProvider& judge, const std::string& task_text,
                               const ImageRef& cur_obs,
                               const std::vector<std::string>& summaries,
                               const std::vector<std::string>& fallback_strategies,
                               bool* used_fallback) {
  *used_fallback = false;
  std::string guidance;
  try {
    guidance = trim(judge.digest_guidance(task_text, cur_obs, summaries));
  } catch (const JudgeFailure&) {
    guidance.clear();
  }
  if (!guidance.empty()) return guidance;

  *used_fallback = true;
  std::string out;
  size_t limit = std::min<size_t>(3, fallback_strategies.size());
  for (size_t i = 0; i < limit; ++i) {
    if (i > 0) out += " ";
    out += fallback_strategies[i];
  }
  return out;
}

}  // namespace

std::string node_summary(const MemoryNode& node) {
  return node.strategy + " (tags: " + format_tags(node.attributes) + ")";
}

RefreshDecision parse_refresh_decision(const std::string& raw,
                                       const std::set<std::string>& valid_ids) {
  std::string decision_value;
  std::string preserve_value;
  std::string reason_value;
  bool saw_decision = false;
  bool saw_preserve = false;
  bool saw_reason = false;

  std::istringstream in(raw);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    std::string lt = lower(t);
    if (!saw_decision && lt.rfind("decision:", 0) == 0) {
      decision_value = trim(std::string_view(t).substr(9));
      saw_decision = true;
    } else if (!saw_preserve && lt.rfind("preserve:", 0) == 0) {
      preserve_value = trim(std::string_view(t).substr(9));
      saw_preserve = true;
    } else if (!saw_reason && lt.rfind("reason:", 0) == 0) {
      reason_value = trim(std::string_view(t).substr(7));
      saw_reason = true;
    }
  }

  if (!saw_decision) throw MalformedRefresh("no Decision line in judge output");
  std::string verdict_token = lower(first_token(decision_value));
  RefreshDecision decision;
  if (verdict_token == "keep") {
    decision.verdict = RefreshVerdict::keep;
  } else if (verdict_token == "update") {
    decision.verdict = RefreshVerdict::update;
  } else {
    throw MalformedRefresh("Decision line names neither KEEP nor UPDATE: \"" + decision_value +
                           "\"");
  }

  // "Preserve: [T1, T3]" and "Preserve: T1,T3" are both accepted.
  std::string ids = preserve_value;
  if (!ids.empty() && ids.front() == '[') ids.erase(ids.begin());
  if (!ids.empty() && ids.back() == ']') ids.pop_back();
  if (lower(trim(ids)) != "none") {
    std::string token;
    std::istringstream id_stream(ids);
    while (std::getline(id_stream, token, ',')) {
      std::string id = upper(trim(token));
      if (id.empty()) continue;
      if (valid_ids.count(id)) {
        decision.preserve_ids.insert(id);
      } else {
        decision.dropped_ids.push_back(id);
      }
    }
  }

  decision.reason = reason_value.empty() ? "unspecified" : clip_words(reason_value, 20);
  return decision;
}

WorkingMemory init_working_memory(const MemoryGraph& graph, EncoderProvider& encoder,
                                  JudgeProvider& judge, const std::string& task_text,
                                  const ImageRef& cur_obs, const RetrievalConfig& cfg) {
  if (graph.empty()) throw EmptyStore("cannot initialize working memory from an empty store");

  SemanticVector query = build_semantic_vector(task_text, cur_obs, encoder);
  RetrievalResult retrieved = structured_retrieve(graph, query, cfg);

  WorkingMemory wm;
  wm.task_text = task_text;
  std::vector<std::string> summaries;
  std::vector<std::string> strategies;
  for (const RetrievedItem& item : retrieved.items) {
    const MemoryNode& node = graph.node(item.node_id);
    wm.attached_nodes.push_back(node.node_id);
    wm.takeaways.push_back({node.node_id, node.strategy});
    wm.embedding_blocks.push_back(node.embedding);
    summaries.push_back(node_summary(node));
    strategies.push_back(node.strategy);
  }
  wm.guidance = digest_or_fallback(judge, task_text, cur_obs, summaries, strategies,
                                   &wm.guidance_fallback);
  wm.phase = 0;
  return wm;
}

RefreshOutcome maybe_refresh(const MemoryGraph& graph, EncoderProvider& encoder,
                             JudgeProvider& judge, const WorkingMemory& wm,
                             const ImageRef& prev_obs, const ImageRef& cur_obs,
                             const RetrievalConfig& cfg) {
  RefreshOutcome outcome;
  outcome.wm = wm;

  std::set<std::string> slot_ids;
  for (size_t i = 0; i < wm.takeaways.size(); ++i) slot_ids.insert(takeaway_slot_id(i));

  std::string raw = judge.judge_refresh(wm.task_text, prev_obs, cur_obs, wm.guidance,
                                        wm.takeaways);
  try {
    outcome.decision = parse_refresh_decision(raw, slot_ids);
  } catch (const MalformedRefresh&) {
    // The wire contract demands conservatism: unusable output means KEEP.
    outcome.malformed_judge_output = true;
    outcome.decision.verdict = RefreshVerdict::keep;
    outcome.decision.reason = "malformed judge output";
    return outcome;
  }
  if (outcome.decision.verdict == RefreshVerdict::keep) return outcome;

  std::vector<TakeawayRef> preserved;
  for (size_t i = 0; i < wm.takeaways.size(); ++i) {
    if (outcome.decision.preserve_ids.count(takeaway_slot_id(i))) {
      preserved.push_back(wm.takeaways[i]);
    }
  }

  SemanticVector query = build_semantic_vector(wm.task_text, cur_obs, encoder);
  RetrievalResult retrieved = structured_retrieve(graph, query, cfg);

  WorkingMemory next;
  next.wm_id = wm.wm_id;
  next.task_text = wm.task_text;
  next.phase = wm.phase + 1;

  std::unordered_set<std::string> attached;
  std::vector<std::string> summaries;
  std::vector<std::string> strategies;

  // Preserved takeaways keep their original text; their blocks stay attached
  // while the node is still live in the store.
  for (const TakeawayRef& keep : preserved) {
    next.takeaways.push_back(keep);
    summaries.push_back(keep.text);
    strategies.push_back(keep.text);
    if (graph.contains_node(keep.id) && attached.insert(keep.id).second) {
      next.attached_nodes.push_back(keep.id);
      next.embedding_blocks.push_back(graph.node(keep.id).embedding);
    }
  }
  for (const RetrievedItem& item : retrieved.items) {
    if (!attached.insert(item.node_id).second) continue;
    const MemoryNode& node = graph.node(item.node_id);
    next.attached_nodes.push_back(node.node_id);
    next.takeaways.push_back({node.node_id, node.strategy});
    next.embedding_blocks.push_back(node.embedding);
    summaries.push_back(node_summary(node));
    strategies.push_back(node.strategy);
  }

  next.guidance = digest_or_fallback(judge, wm.task_text, cur_obs, summaries, strategies,
                                     &next.guidance_fallback);
  outcome.refreshed = true;
  outcome.wm = std::move(next);
  return outcome;
}

}  // namespace hymem
