#pragma once

#include <string>

#include "selfref/dsl.hpp"

namespace test_support {

inline selfref::dsl::Document doc(const std::string& src) { return selfref::dsl::parse(src); }

inline selfref::Formula formula(const std::string& src, const std::string& name) {
  return selfref::dsl::parse(src).formula(name).formula;
}

inline selfref::Proposition prop(const std::string& src, const std::string& name) {
  auto d = selfref::dsl::parse(src);
  const auto& nf = d.formula(name);
  return {nf.formula, nf.bindings};
}

}  // namespace test_support
