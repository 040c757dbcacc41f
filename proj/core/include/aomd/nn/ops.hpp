#pragma once

#include <cstddef>
#include <vector>

#include "aomd/nn/tape.hpp"

// Differentiable ops over Tape variables. Vectors are rank-1 tensors and
// matrices rank-2; every op validates operand shapes and throws ShapeError
// naming both shapes on a mismatch.
namespace aomd::nn {

// [m,k] x [k,n] -> [m,n]
Var matmul(Var a, Var b);
// [m,n] x [n] -> [m]
Var matvec(Var w, Var x);
// W x + b
Var linear(Var w, Var x, Var b);
// W x (no bias)
inline Var linear(Var w, Var x) { return matvec(w, x); }

Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
// [m,n] + b[m] broadcast over columns.
Var add_columns(Var m, Var b);
Var transpose(Var a);

Var tanh(Var a);
Var sigmoid(Var a);
// Max-shifted softmax of a non-empty vector.
Var softmax(Var a);

Var concat(const std::vector<Var>& parts);
// Column j of the result is parts[j]; all parts are vectors of equal length.
Var stack_columns(const std::vector<Var>& columns);
// [m1,n] over [m2,n] -> [m1+m2,n]
Var concat_rows(Var top, Var bottom);
// Arithmetic mean of the columns of a [m,n] matrix, n >= 1.
Var mean_columns(Var m);

Var element(Var v, std::size_t index);
Var sum(Var a);
// Same value, cut off from the gradient flow.
Var detach(Var a);

inline constexpr double kProbabilityClamp = 1e-12;

// -[y log p + (1-y) log(1-p)] with p clamped to [1e-12, 1-1e-12]; the
// gradient is zero where the clamp is active.
Var binary_cross_entropy(Var probability, int label);

}  // namespace aomd::nn
