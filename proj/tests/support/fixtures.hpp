#pragma once

#include <filesystem>
#include <string>

#include "mowa/extractor.hpp"
#include "mowa/hash.hpp"
#include "mowa/spec_xml.hpp"
#include "mowa/weaver.hpp"

namespace fixture {

inline std::filesystem::path data_dir() { return MOWA_DATA_DIR; }
inline std::filesystem::path museum_dir() { return data_dir() / "museum"; }
inline std::filesystem::path media_dir() { return data_dir() / "media"; }

inline std::string museum_spec_path() { return (museum_dir() / "beagle-tour.mowa.xml").string(); }
inline std::string media_spec_path() { return (media_dir() / "noise-video.mowa.xml").string(); }

inline mowa::MobileAppSpec museum_spec() { return mowa::parse_spec(mowa::read_file(museum_spec_path())); }
inline mowa::MobileAppSpec media_spec() { return mowa::parse_spec(mowa::read_file(media_spec_path())); }

inline const mowa::PageCorpus& museum_corpus() {
  static const auto c = mowa::PageCorpus::load(museum_dir() / "corpus");
  return c;
}
inline const mowa::PageCorpus& media_corpus() {
  static const auto c = mowa::PageCorpus::load(media_dir() / "corpus");
  return c;
}

// A fetcher that fails the test run if anything reaches the network.
struct NetworkTripwire {
  int calls = 0;
  mowa::Fetcher fetcher() {
    return [this](const std::string&) -> std::optional<std::string> {
      ++calls;
      return std::nullopt;
    };
  }
};

inline mowa::ExtractCache museum_cache(mowa::Fetcher fetcher = {}) {
  return mowa::ExtractCache(museum_dir() / "corpus" / "cache", mowa::FetchPolicy::cache_only, std::move(fetcher));
}

inline const char* kPieces[] = {"Toxodon",        "Glyptodon",  "Megatherium", "Mylodon",
                                "Macrauchenia",   "Scelidotherium", "Doedicurus", "Lestodon",
                                "Panochthus",     "Smilodon",   "Hippidion",   "Stegomastodon"};

}  // namespace fixture
