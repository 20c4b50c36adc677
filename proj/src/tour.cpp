#include "mowa/tour.hpp"

#include <algorithm>
#include <map>

#include "mowa/error.hpp"

namespace mowa {

std::string_view to_string(TourMode m) {
  switch (m) {
    case TourMode::not_started: return "not_started";
    case TourMode::on_track: return "on_track";
    case TourMode::wrong_piece: return "wrong_piece";
    case TourMode::complete: return "complete";
  }
  return "not_started";
}

const TourStop* TourState::stop(std::string_view id) const {
  auto it = std::find_if(ordered_pois.begin(), ordered_pois.end(), [&](const TourStop& s) { return s.id == id; });
  return it == ordered_pois.end() ? nullptr : &*it;
}

void TourState::sense(std::string_view poi_id) {
  if (ordered_pois.empty() || mode == TourMode::complete || !stop(poi_id)) return;
  last_sensed = std::string(poi_id);
  if (ordered_pois[expected_index].id == poi_id) {
    visited.insert(std::string(poi_id));
    ++expected_index;
    mode = expected_index == ordered_pois.size() ? TourMode::complete : TourMode::on_track;
  } else {
    mode = TourMode::wrong_piece;
  }
}

std::vector<TourStop> derive_tour_order(const DimensionalSpace& space) {
  std::vector<TourStop> out;
  auto stop_of = [&](const std::string& id) {
    const auto* p = space.poi(id);
    return TourStop{id, p ? p->name : id};
  };

  if (space.links.empty()) {
    std::vector<const PointOfInterest*> ordered;
    for (const auto& p : space.pois) {
      if (p.order) ordered.push_back(&p);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return *a->order < *b->order; });
    for (const auto* p : ordered) out.push_back({p->id, p->name});
    return out;
  }

  std::map<std::string, std::string> next;
  std::map<std::string, int> inbound;
  for (const auto& l : space.links) {
    if (l.from == l.to || !next.emplace(l.from, l.to).second || ++inbound[l.to] > 1) {
      throw Error("links.not-a-chain");
    }
  }
  std::vector<std::string> roots;
  for (const auto& [from, to] : next) {
    if (!inbound.count(from)) roots.push_back(from);
  }
  if (roots.size() != 1) throw Error("links.not-a-chain");

  std::string cur = roots.front();
  out.push_back(stop_of(cur));
  while (next.count(cur)) {
    cur = next.at(cur);
    out.push_back(stop_of(cur));
    if (out.size() > space.links.size() + 1) throw Error("links.not-a-chain");
  }
  // Every link must have been walked; a leftover cycle would otherwise hide.
  if (out.size() != space.links.size() + 1) throw Error("links.not-a-chain");
  return out;
}

TourState start_tour(const MobileAppSpec& spec) {
  TourState t;
  if (spec.space && is_location_space(spec.space->kind)) t.ordered_pois = derive_tour_order(*spec.space);
  return t;
}

}  // namespace mowa
