#pragma once

#include <optional>

#include "core/error.hpp"

namespace codepoison::testing {

/// The code of the codepoison::Error thrown by `fn`, or nullopt.
template <class Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace codepoison::testing
