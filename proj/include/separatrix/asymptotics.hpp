#pragma once

#include <complex>
#include <vector>

#include "separatrix/engine.hpp"
#include "separatrix/spectrum.hpp"

namespace separatrix {

/* ---- inductive inequalities ---------------------------------------------
 * The two bounds   B <= a_p   and   |a_p - a_{p-1}| <= A / p^{2+delta}
 * checked over the whole computed table (the lower bound also at p = 1).
 * For a decay violation lhs/rhs are recorded as p^{2+delta}|a_p - a_{p-1}|
 * against A, so rhs is the same constant on every row. */

enum class ViolationKind { LowerBoundB, DecayA };

struct Violation {
    int p = 0;
    ViolationKind which = ViolationKind::LowerBoundB;
    double lhs = 0, rhs = 0;
};

struct VerificationReport {
    double A = 0, B = 0, delta = 0;
    int p0 = 0;  // largest p with the whole prefix verified (pmax when passed)
    std::vector<Violation> violations;
    bool passed = false;
    double minimal_A = 0;  // max over p >= 2 of p^{2+delta}|a_p - a_{p-1}|
};

// pre: A > 1 > B > 0 and delta in (0, 1/2), else precondition_error.
VerificationReport verify_inductive(const SequenceTable& t, double A, double B, double delta);

/* ---- residual series -----------------------------------------------------
 * Two consistency checks of the computed table against the recurrence it
 * came from, both defined for 2 <= p <= pmax-1:
 *
 *   Linearized    r_p = b_{p+1} - (1/p) sum_{q=2}^{p} b_q f3(q/p)
 *   ARecurrence   r_p = (p+1)(a_{p+1}-a_p)/a_p
 *                       + sum_{p1=1}^{p} [g f2(g')/(p-1)] (a_p-a_{p1})/a_{p1}
 *                 with g = p1/p, g' = p1/(p+1)
 *
 * The a-ratios go through expm1 of log-domain differences, so a residual
 * that is zero in exact arithmetic comes out exactly zero here too.
 * Decay is summarized by dyadic-block medians of |r_p| and a least-squares
 * exponent of log(median) against log(block geometric center), fitted over
 * the blocks starting at fit_lo and above. */

enum class ResidualKind { Linearized, ARecurrence };

struct ResidualBlock {
    int lo = 0, hi = 0;  // inclusive
    double center = 0;   // sqrt(lo*hi)
    double median = 0;   // median of |r_p| over the block
};

struct ResidualSeries {
    ResidualKind kind = ResidualKind::Linearized;
    int p_lo = 2, p_hi = 0;
    std::vector<double> r;  // r[p] for p in [p_lo, p_hi], NaN outside
    std::vector<ResidualBlock> blocks;
    double fitted_decay_exponent = 0;  // NaN when fewer than 2 usable blocks
    int fit_lo = 64;
};

// pre: t.pmax >= 64 for a meaningful block summary (not enforced).
ResidualSeries residual_linearized(const SequenceTable& t, const Kernels& k);
ResidualSeries residual_a_recurrence(const SequenceTable& t, const Kernels& k);

/* ---- log-periodic fit ----------------------------------------------------
 * Least squares of the rescaled series  s_p = b_p p^{-Re sigma}  against
 * {cos(nu ln p), sin(nu ln p)} over [p_lo, pmax], with sigma the dominant
 * element of sigma_prime (max real part, Im >= 0) and nu = Im sigma.
 * zero_interlacing is true iff between every two consecutive sign changes
 * of s_p there is exactly one zero of the unshifted reference cos(nu ln p);
 * the fitted phase is reported but deliberately not used for this check. */

struct AsymptoticFit {
    std::complex<double> sigma;
    double amplitude = 0;
    double phase = 0;  // model: amplitude * cos(nu ln p + phase)
    double rms_error = 0;
    bool zero_interlacing = false;
    int p_lo = 0, p_hi = 0;
};

// p_lo <= 0 selects the default window start max(100, pmax/100); an explicit
// p_lo must be >= 16 and < pmax.  Throws degenerate_fit when sigma_prime is
// empty or the rescaled series is identically ~0 (below 1e-12).
AsymptoticFit fit_log_periodic(const SequenceTable& t, const Spectrum& s, int p_lo = 0);

/* ---- limit estimate ------------------------------------------------------
 * raw = a_pmax.  extrapolated = least-squares limit over the top half of
 *   a_p = a_inf + p^{sigma1-1} (c1 cos(nu ln p) + c2 sin(nu ln p))
 * or, when sigma_prime is empty,  a_p = a_inf + c p^{-3/2}  (sigma1 = -1/2,
 * the same exponent with the oscillation dropped).  uncertainty is
 * max(|raw - extrapolated|, spread of a_p over the top decile). */

struct LimitEstimate {
    double raw = 0;
    double extrapolated = 0;
    double uncertainty = 0;
    bool oscillatory_model = false;
    std::complex<double> sigma;  // exponent actually used (sigma1 + i nu)
    int window_lo = 0, window_hi = 0;
};

LimitEstimate estimate_a_inf(const SequenceTable& t, const Spectrum& s);

}  // namespace separatrix
