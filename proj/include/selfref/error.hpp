#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selfref {

enum class ErrorCode {
  unknown_node,
  arity_mismatch,
  dangling_child,
  duplicate_letter_node,
  duplicate_node,
  star_outside_graph,
  free_outside_graph,
  not_strongly_well_grounded,
  non_builtin_operator,
  shared_nodes,
  p_not_letter,
  too_many_nodes,
  free_set_mismatch,
  unbound_free_node,
  bound_violated,
  unrealizable_v_coordinate,
  not_a_gate,
  unverified_construction,
  overlapping_axioms,
  free_axiom,
  letter_outside_m,
  non_monotone_r,
  fixpoint_cap_exceeded,
  no_fixpoint_within_cap,
  not_simple,
  syntax_error,
  unknown_operator,
  duplicate_name,
  bits_length_mismatch,
  invalid_argument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_node: return "unknown-node";
    case ErrorCode::arity_mismatch: return "arity-mismatch";
    case ErrorCode::dangling_child: return "dangling-child";
    case ErrorCode::duplicate_letter_node: return "duplicate-letter-node";
    case ErrorCode::duplicate_node: return "duplicate-node";
    case ErrorCode::star_outside_graph: return "star-outside-graph";
    case ErrorCode::free_outside_graph: return "free-outside-graph";
    case ErrorCode::not_strongly_well_grounded: return "not-strongly-well-grounded";
    case ErrorCode::non_builtin_operator: return "non-builtin-operator";
    case ErrorCode::shared_nodes: return "shared-nodes";
    case ErrorCode::p_not_letter: return "p-not-letter";
    case ErrorCode::too_many_nodes: return "too-many-nodes";
    case ErrorCode::free_set_mismatch: return "free-set-mismatch";
    case ErrorCode::unbound_free_node: return "unbound-free-node";
    case ErrorCode::bound_violated: return "bound-violated";
    case ErrorCode::unrealizable_v_coordinate: return "unrealizable-V-coordinate";
    case ErrorCode::not_a_gate: return "not-a-gate";
    case ErrorCode::unverified_construction: return "unverified-construction";
    case ErrorCode::overlapping_axioms: return "overlapping-axioms";
    case ErrorCode::free_axiom: return "free-axiom";
    case ErrorCode::letter_outside_m: return "letter-outside-M";
    case ErrorCode::non_monotone_r: return "non-monotone-R";
    case ErrorCode::fixpoint_cap_exceeded: return "fixpoint-cap-exceeded";
    case ErrorCode::no_fixpoint_within_cap: return "no-fixpoint-within-cap";
    case ErrorCode::not_simple: return "not-simple";
    case ErrorCode::syntax_error: return "syntax-error";
    case ErrorCode::unknown_operator: return "unknown-operator";
    case ErrorCode::duplicate_name: return "duplicate-name";
    case ErrorCode::bits_length_mismatch: return "bits-length-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selfref
