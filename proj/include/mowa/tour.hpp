#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mowa/spec.hpp"

namespace mowa {

enum class TourMode { not_started, on_track, wrong_piece, complete };
std::string_view to_string(TourMode m);

struct TourStop {
  std::string id;
  std::string name;
  bool operator==(const TourStop&) const = default;
};

// Mobile hypermedia tour over the ordered PoIs of a spec.
struct TourState {
  std::vector<TourStop> ordered_pois;
  size_t expected_index = 0;
  std::set<std::string> visited;
  TourMode mode = TourMode::not_started;
  std::optional<std::string> last_sensed;

  const TourStop* expected() const {
    return expected_index < ordered_pois.size() ? &ordered_pois[expected_index] : nullptr;
  }
  const TourStop* stop(std::string_view id) const;

  // Advances on the expected PoI, otherwise switches to wrong_piece without
  // losing progress. Unknown ids and finished tours are left unchanged.
  void sense(std::string_view poi_id);

  bool operator==(const TourState&) const = default;
};

// Order from the link chain (rooted at the unique PoI without inbound links);
// falls back to ascending `order` fields when there are no links. Throws
// Error("links.not-a-chain") when links do not form a single simple path.
std::vector<TourStop> derive_tour_order(const DimensionalSpace& space);

TourState start_tour(const MobileAppSpec& spec);

}  // namespace mowa
