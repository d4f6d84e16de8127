#pragma once

#include <cstdint>
#include <vector>

#include "separatrix/kernels.hpp"
#include "separatrix/scaled_real.hpp"

namespace separatrix {

struct EngineOptions {
    // 0 = auto: SEPARATRIX_THREADS if set, hardware concurrency otherwise.
    int threads = 0;
    // Row sums always reduce through a fixed-shape block tree, so output is
    // bit-identical for any thread count; the flag is kept for the run
    // metadata and future scheduling experiments.
    bool deterministic = true;
    // Per-value exponent bound for a run; generous for genuine sequences
    // (|e| grows linearly in p) but small enough to catch the doubling
    // blow-up of far-supercritical starts within a few dozen rows.
    std::int64_t exponent_cap = std::int64_t(1) << 40;
    // Set when the caller has already certified f1 > 0 on [0,1]; positivity
    // of each row is still checked dynamically during the run.
    bool skip_positivity_check = false;
};

int resolve_threads(int requested);

/* One run of   L_{p+1} = (1/p) sum_{q=1}^{p} g(q/(p+1)) L_q L_{p+1-q},
 * L_1 = y, with an arbitrary kernel g in place of f1/2.  `saturated_at` is
 * the first row whose exponent hit the cap under OverflowPolicy::Saturate
 * (0 when none); rows from there on are clamped and not meaningful. */
enum class OverflowPolicy { Throw, Saturate };

struct RawRun {
    std::vector<ScaledReal> lambda;  // [0] unused, [1..pmax]
    int saturated_at = 0;
};

RawRun run_recurrence(const Poly& g, double y, int pmax, const EngineOptions& opt,
                      OverflowPolicy policy);

/* The separating-sequence table at y = 1 for the symmetrized kernel.
 *   log_lambda[p] = ln L_p(1)        (compensated cumulative sum)
 *   a[p] = exp(-log_lambda[p]/p)     ( = L_p(1)^{-1/p} )
 *   b[p] = p^2 (a_p - a_{p-1})/a_{p-1}, NaN for p < 2
 * b is evaluated as p^2 expm1(l_{p-1}/(p-1) - l_p/p) through the ratio
 * d_p = ln(L_p/L_{p-1}), which keeps its absolute error ~1e-11 even where
 * the naive quotient difference would lose five digits to cancellation. */
struct SequenceTable {
    int pmax = 0;
    std::vector<ScaledReal> lambda;
    std::vector<double> log_lambda;
    std::vector<double> a;
    std::vector<double> b;
};

// Requires pmax >= 2.  Unless skip_positivity_check, certifies f1 > 0 first
// (assumption_error when that fails or is inconclusive).  Throws
// non_positive_lambda / exponent_overflow on numerical failure.
SequenceTable compute_sequence(const Kernels& k, int pmax, const EngineOptions& opt = {});

// Recurrence started from L_1 = y > 0 (same symmetrized kernel); exponent
// saturation is flagged in-band, never thrown.
RawRun lambda_direct(const Kernels& k, double y, int pmax, const EngineOptions& opt = {});

/* Position of y against the separating value, judged from the tail of the
 * a_p table: margin = 3x the observed oscillation amplitude (max - min) of
 * a_p over the top half. */
enum class Criticality { Subcritical, Supercritical, Indeterminate };
Criticality classify_y(const SequenceTable& t, double y);

}  // namespace separatrix
