#pragma once

namespace timoshenko {

// Whether independent sub-solves of one step are dispatched to a second thread.
// Results are bit-identical either way.
enum class Execution { serial, parallel };

}  // namespace timoshenko
