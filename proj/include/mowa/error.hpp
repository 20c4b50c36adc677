#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace mowa {

// Every domain failure carries a catalog message key (see i18n.hpp) plus the
// interpolation arguments used to render a human message.
class Error : public std::runtime_error {
 public:
  using Args = std::map<std::string, std::string>;

  Error(std::string key, Args args = {});

  const std::string& key() const noexcept { return key_; }
  const Args& args() const noexcept { return args_; }

 private:
  std::string key_;
  Args args_;
};

}  // namespace mowa
