// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "paftrack/types.hpp"

namespace paftrack {

struct Violation {
    int frame_index = -1;  // -1 for sequence-level problems
    std::string message;
};

// Returns an empty list iff every annotation invariant holds. Violations are
// data, not failures; callers decide whether to reject.
std::vector<Violation> validate_sequence(const SequenceAnnotation& seq);

}  // namespace paftrack
