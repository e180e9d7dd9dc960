#include "hymem/prompts.hpp"

#include <cstdio>

namespace hymem {

namespace {

constexpr std::string_view kEvolutionSystem =
    R"PROMPT(You deduplicate GUI agent strategy takeaways using both text and visual context.
Output valid JSON only, no markdown code blocks.)PROMPT";

constexpr std::string_view kEvolutionDecide =
    R"PROMPT(DECIDE one of:
1. UPDATE: NEW describes the SAME or very similar strategy as an existing trajectory.
   -> Keep the existing node but IMPROVE its takeaway by incorporating insights from NEW.
   -> Provide the improved takeaway (must start with "takeaway:").
   -> Provide the complete updated tags list (can add, remove, or keep tags).

2. REPLACE: NEW describes the SAME strategy as an existing trajectory, but NEW is STRICTLY BETTER
   (more specific, more actionable, more complete trajectory).
   -> Remove the existing node, add NEW as replacement.

3. ADD: NEW describes a GENUINELY DIFFERENT strategy not covered by existing trajectories.
   -> Add NEW as a new node.

Use the screenshots to understand the visual context and UI state of each trajectory.

OUTPUT (JSON only, no markdown):
{
  "action": "update" | "replace" | "add",
  "reasoning": "one sentence explanation",
  "target_id": "ID to update (required for update)",
  "updated_takeaway": "takeaway: improved takeaway text (required for update)",
  "updated_tags": ["#tag1", "#tag2", ...],
  "old_id": "ID to replace (required for replace)"
})PROMPT";

constexpr std::string_view kDigestionSystem =
    R"PROMPT(You are an expert at analyzing past GUI agent experiences to help with a new task.
Given the current task, current screenshot, and retrieved experience summaries,
synthesize them into focused, actionable guidance.

Output format: ONE concise paragraph (2-3 sentences) that answers:
1. Which strategies from past experiences are MOST relevant to this specific task?
2. What key actions or filters should be prioritized?

IMPORTANT RULES:
- Focus ONLY on navigation/search strategies, NOT on when to stop.
- Do NOT mention stopping, completing, or finishing the task.
- Do NOT give instructions about providing answers or explanations.
- Be specific to the current task. Do NOT just repeat the summaries.
- Do NOT use bullet points. Write as a coherent paragraph.)PROMPT";

constexpr std::string_view kRefreshSystem =
    R"PROMPT(You are evaluating whether the retrieved experience memories are still relevant for the task.

KEY PRINCIPLES:
1. Memories provide NAVIGATION STRATEGIES (how to search, filter, click, scroll, etc.), NOT answers.
2. Be VERY CONSERVATIVE - default to keeping current memories.
3. CRITICAL: Distinguish between OPERATIONAL ERRORS vs MEMORY RELEVANCE:

   OPERATIONAL ERRORS (DO NOT update memory):
   - Agent landed on wrong page (login page, unrelated website, error page)
   - Agent is stuck or action failed
   - Agent made a navigation mistake
   -> These are execution errors, NOT memory problems. The current memories are still valid for when agent gets back on track.

   MEMORY RELEVANCE ISSUE (May update memory):
   - Task has genuinely progressed to a completely new phase
   - Agent successfully completed initial steps and now needs different strategies
   - Current screen shows the task is in a fundamentally different domain than memories cover
   -> Only update if memories are irrelevant to the ACTUAL TASK PROGRESS, not temporary navigation mistakes.

4. PRESERVE USEFUL MEMORIES: When updating, some existing takeaways may still be valuable:
   - General domain knowledge that applies across task phases
   - Strategies that might be needed again later (e.g., navigation, filtering)
   - Takeaways that provide complementary information to new phase requirements

Your job: Decide if memories should be updated, but ONLY for genuine relevance issues, NOT operational errors.
When updating, also identify which existing takeaways should be PRESERVED and combined with new retrieval.

OUTPUT FORMAT (strict):
Decision: KEEP or UPDATE
Preserve: [comma-separated IDs of takeaways to keep, or NONE]
Reason: one sentence (no more than 20 words))PROMPT";

std::string or_unknown(const std::string& s) { return s.empty() ? "unknown" : s; }

}  // namespace

std::string format_similarity(double similarity) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", similarity);
  return buf;
}

std::string takeaway_slot_id(size_t index) { return "T" + std::to_string(index + 1); }

RenderedPrompt render_evolution_prompt(const CandidateView& incoming,
                                       const std::vector<CandidateView>& neighbors) {
  RenderedPrompt p;
  p.system = std::string(kEvolutionSystem);
  p.image_uris.push_back(incoming.screenshot_uri);

  std::string u;
  u += "You are managing a knowledge base of GUI agent strategies for deduplication.\n\n";
  u += "NEW TRAJECTORY (see Screenshot 1):\n";
  u += "- task_description: " + incoming.task_description + "\n";
  u += "- takeaway: " + incoming.takeaway + "\n";
  u += "- tags: " + format_tags(incoming.tags) + "\n";
  u += "- domain: " + or_unknown(incoming.domain) + "\n\n";
  u += "EXISTING SIMILAR TRAJECTORIES:\n";
  for (size_t i = 0; i < neighbors.size(); ++i) {
    const CandidateView& n = neighbors[i];
    p.image_uris.push_back(n.screenshot_uri);
    u += std::to_string(i + 1) + ". ID: " + n.id +
         " (similarity: " + format_similarity(n.similarity.value_or(0.0)) +
         ", see Screenshot " + std::to_string(i + 2) + ")\n";
    u += "   task_description: " + n.task_description + "\n";
    u += "   takeaway: " + n.takeaway + "\n";
    u += "   tags: " + format_tags(n.tags) + "\n";
    u += "   domain: " + or_unknown(n.domain) + "\n";
  }
  u += "\n";
  u += std::string(kEvolutionDecide);
  p.user = std::move(u);
  return p;
}

RenderedPrompt render_digestion_prompt(const std::string& task_text, const ImageRef& cur_obs,
                                       const std::vector<std::string>& summaries) {
  RenderedPrompt p;
  p.system = std::string(kDigestionSystem);
  p.image_uris.push_back(cur_obs.uri);

  std::string rendered;
  if (summaries.empty()) {
    rendered = "(none)";
  } else {
    for (size_t i = 0; i < summaries.size(); ++i) {
      if (i > 0) rendered += "\n";
      rendered += std::to_string(i + 1) + ". " + summaries[i];
    }
  }

  p.user = "Current task:\n" + task_text +
           "\n\nCurrent screenshot:\n" + cur_obs.uri +
           "\n\nRetrieved experience summaries:\n" + rendered;
  return p;
}

RenderedPrompt render_refresh_prompt(const std::string& task_text, const ImageRef& prev_obs,
                                     const ImageRef& cur_obs, const std::string& guidance,
                                     const std::vector<TakeawayRef>& takeaways) {
  RenderedPrompt p;
  p.system = std::string(kRefreshSystem);
  p.image_uris.push_back(prev_obs.uri);
  p.image_uris.push_back(cur_obs.uri);

  std::string rendered;
  if (takeaways.empty()) {
    rendered = "(none)";
  } else {
    for (size_t i = 0; i < takeaways.size(); ++i) {
      if (i > 0) rendered += "\n";
      rendered += takeaway_slot_id(i) + ". " + takeaways[i].text;
    }
  }

  p.user = "Current task:\n" + task_text +
           "\n\nPrevious screenshot:\n" + prev_obs.uri +
           "\n\nCurrent screenshot:\n" + cur_obs.uri +
           "\n\nCurrent guidance block (optional):\n" + (guidance.empty() ? "(none)" : guidance) +
           "\n\nCurrent retrieved takeaways (with IDs):\n" + rendered;
  return p;
}

}  // namespace hymem
