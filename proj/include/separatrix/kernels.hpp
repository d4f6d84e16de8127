#pragma once

#include "separatrix/poly.hpp"

namespace separatrix {

/* Which polynomial feeds the derived kernels f2/f3.  The production chain
 * symmetrizes first: f2 = -(x f1(x))', which is what makes f3 satisfy the
 * moment relation the residual checks rely on.  PlainF keeps the
 * unsymmetrized source and exists only for side-by-side comparison. */
enum class KernelVariant { Symmetrized, PlainF };

struct Kernels {
    Poly f;         // normalized input, integral exactly the unit target
    double K = 1;   // normalization constant = integral of the raw input
    Poly f1;        // f(x) + f(1-x), integral 2
    Poly f2;        // -(x g)' with g = f1 (or g = f under PlainF)
    Poly f3;        // -(1/x^2) int_0^x t f2(t) dt  ==  sum_k -e_k x^k/(k+2)
    KernelVariant variant = KernelVariant::Symmetrized;
};

// Throws kernel_error("degenerate_kernel") on the zero polynomial and
// kernel_error("non_positive_integral") when the raw integral is <= 0.
Kernels build_kernels(const Poly& f_raw, KernelVariant variant = KernelVariant::Symmetrized);

/* Certified global minimum of a polynomial on [0,1], branch-and-bound over
 * subintervals with the second-order bound
 *     g(x) >= g(c) - |g'(c)||x-c| - M|x-c|^2/2,   M = sum_k k(k-1)|c_k|,
 * minus the Horner rounding-error allowance of each evaluation, so both
 * verdicts are certificates rather than sign reads of noisy samples.
 * passed means the minimum is certified strictly positive; not-passed means
 * some point is certifiably <= 0.  Throws inconclusive_error when the
 * subdivision hits the width floor (1e-12) with the sign of the minimum
 * still inside the evaluation-noise band (e.g. a minimum of exactly zero,
 * at any point). */
struct PositivityResult {
    double min_value = 0;
    double min_location = 0;
    bool passed = false;
};
PositivityResult check_positivity(const Poly& g);

}  // namespace separatrix
