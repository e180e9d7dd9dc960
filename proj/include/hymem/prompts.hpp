#pragma once

#include <string>
#include <vector>

#include "hymem/types.hpp"

namespace hymem {

/// A prompt ready for a completion service. The system instruction and the
/// user body are wire contracts: golden tests pin their exact bytes.
struct RenderedPrompt {
  std::string system;
  std::string user;
  std::vector<std::string> image_uris;  // order matches "Screenshot N" references

  std::string full_text() const { return system + "\n\n" + user; }
};

// Deduplication verdict prompt for one incoming trajectory against its
// retrieved neighbors. Neighbor similarity renders with three decimals.
RenderedPrompt render_evolution_prompt(const CandidateView& incoming,
                                       const std::vector<CandidateView>& neighbors);

// Guidance synthesis prompt over retrieved experience summaries.
RenderedPrompt render_digestion_prompt(const std::string& task_text, const ImageRef& cur_obs,
                                       const std::vector<std::string>& summaries);

// Working-memory relevance prompt; takeaways are enumerated T1..Tn in order.
RenderedPrompt render_refresh_prompt(const std::string& task_text, const ImageRef& prev_obs,
                                     const ImageRef& cur_obs, const std::string& guidance,
                                     const std::vector<TakeawayRef>& takeaways);

// Positional id ("T1", "T2", ...) used by the refresh prompt and parser.
std::string takeaway_slot_id(size_t index);

std::string format_similarity(double similarity);

}  // namespace hymem
