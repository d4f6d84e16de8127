#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "separatrix/kernels.hpp"

namespace separatrix {

// Rational function num/den of sigma over a shared polynomial denominator.
struct RationalFn {
    Poly num, den;
    std::complex<double> operator()(std::complex<double> s) const { return num(s) / den(s); }
};

/* Moments of the derived kernels:
 *   F1(s) = int_0^1 t^s f1(t) dt = sum_k d_k/(s+k+1)
 *   F3(s) = int_0^1 t^s f3(t) dt
 * both over the common denominator D(s) = prod (s+k+1), the product running
 * over the indices with d_k != 0 (the reduced form; identical to the full
 * product whenever every coefficient is nonzero).  F3 is produced from F1
 * through F3 = (s F1 - 1)/(s - 1); the numerator factor (s-1) divides out
 * exactly because F1(1) = 1. */
struct MomentFunctions {
    RationalFn F1, F3;
};
MomentFunctions moment_functions(const Kernels& k);

// Characteristic polynomial P = D - N of F1(s) = 1, monic, P(1) = 0.
// deg P = deg f1 + 1 whenever every coefficient of f1 is nonzero.
Poly char_poly(const Kernels& k);

struct RootInfo {
    std::complex<double> value;
    int multiplicity = 1;
    double residual = 0;  // |F1(root) - 1| in build_spectrum; scaled |P| in find_roots
};

/* All complex roots of p, Aberth–Ehrlich iteration from a Cauchy-bound
 * circle, conjugate-symmetrized, clustered into multiplicities.  Throws
 * no_convergence (carrying the partial set) if the iteration stalls. */
std::vector<RootInfo> find_roots(const Poly& p);

enum class Assumption3 { Holds, Fails, Boundary };

struct Spectrum {
    Poly characteristic;
    std::vector<RootInfo> all_roots;                // Newton-polished against F1 - 1
    std::vector<std::complex<double>> sigma_prime;  // roots != 1 with Re > -1
    double sigma1 = -0.5;                           // max Re over sigma_prime; -1/2 if empty
    std::optional<double> delta;                    // min(1/4, -sigma1/2); empty if sigma1 >= 0
    Assumption3 assumption3 = Assumption3::Holds;
};

/* Full spectral data for a kernel.  The sign test for the verdict uses a
 * ±1e-9 dead band: every non-unit root must have Re < -1e-9 to hold, one
 * with Re > 1e-9 fails it, anything else is Boundary. */
Spectrum build_spectrum(const Kernels& k);

}  // namespace separatrix
