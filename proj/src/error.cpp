#include "mowa/error.hpp"

namespace mowa {
namespace {

std::string describe(const std::string& key, const Error::Args& args) {
  std::string out = key;
  if (!args.empty()) {
    out += " (";
    bool first = true;
    for (const auto& [k, v] : args) {
      if (!first) out += ", ";
      out += k + "=" + v;
      first = false;
    }
    out += ")";
  }
  return out;
}

}  // namespace

Error::Error(std::string key, Args args)
    : std::runtime_error(describe(key, args)), key_(std::move(key)), args_(std::move(args)) {}

}  // namespace mowa
