#pragma once

#include "tower.hpp"

namespace znt {

// Exponent tuple a0 + a1 t + ... + a_{n-1} t^{n-1}, truncated to the ambient
// tower rank.  Reuses LexVec: index i is the coefficient of t^i.
using ExponentTuple = LexVec;

// u^f for cyclically reduced u != eps.  Coefficients of degree >= 1 require a
// centralizer letter of the matching degree on u's axis; otherwise the
// exponent is not realizable in the tower and a DomainError is thrown.
Elem exp_cr(const Tower& t, const Elem& u, const ExponentTuple& f);

// v^f for v with a cyclic decomposition v = c^-1 o u o c.
Elem exp_cdr(const Tower& t, const Elem& v, const ExponentTuple& f);

// true iff exp_cr(u, f) is realizable
bool exp_realizable(const Tower& t, const Elem& u, const ExponentTuple& f);

}  // namespace znt
