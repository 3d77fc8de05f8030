#pragma once

#include <string_view>

namespace invcert {

/// The three certification questions: injectivity on a ball, uniqueness of
/// the center's preimage on a ball, and whether one network's output is a
/// function of another's on a ball.
enum class ProblemKind { Invertibility, PseudoInvertibility, Mappability };

inline std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Invertibility: return "invertibility";
    case ProblemKind::PseudoInvertibility: return "pseudo-invertibility";
    case ProblemKind::Mappability: return "mappability";
  }
  return "unknown";
}

}  // namespace invcert
