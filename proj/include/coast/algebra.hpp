#pragma once

#include "coast/conceptor.hpp"

namespace coast::algebra {

// Soft Boolean operations on conceptors. NOT is exact (I - C); AND uses the
// pseudoinverse form pinv(pinv(A) + pinv(B) - I), OR is De Morgan from the
// two. AND/OR results are cleaned up (symmetrized, eigenvalues clipped to
// [0,1]) before they are returned.

Conceptor boolean_not(const Conceptor& c);
Conceptor boolean_and(const Conceptor& a, const Conceptor& b);
Conceptor boolean_or(const Conceptor& a, const Conceptor& b);

// C_steer = C_succ AND NOT C_fail. Warns on stderr when the operands were
// fitted at different apertures.
Conceptor contrastive(const Conceptor& c_succ, const Conceptor& c_fail);

// NOT C_fail, tagged as a steering-eligible composed conceptor.
Conceptor negated_failure(const Conceptor& c_fail);

}  // namespace coast::algebra
