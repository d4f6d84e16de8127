#include "separatrix/engine.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "separatrix/errors.hpp"

namespace separatrix {

int resolve_threads(int requested) {
    constexpr int kMax = 256;
    if (requested > 0) return std::min(requested, kMax);
    if (const char* env = std::getenv("SEPARATRIX_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= kMax) return int(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(std::min(hc, 64u)) : 1;
}

namespace {

// Fixed reduction-tree leaf size.  This constant shapes the row sums, so it
// is part of the numerical contract: changing it changes output bits.
constexpr int kBlock = 4096;

// Sentinel exponent for zero terms; far below any real rebased exponent.
constexpr std::int64_t kZeroExp = std::numeric_limits<std::int64_t>::min() / 4;

// 2^d for rebased offsets d <= 0; contributions more than 1022 binary
// orders below the row maximum flush to zero (immaterial next to the max).
inline double pow2i(std::int64_t d) {
    if (d < -1022) return 0.0;
    return std::bit_cast<double>(std::uint64_t(1023 + d) << 52);
}

inline double eval_poly(const double* c, int n, double x) {
    double acc = 0.0;
    for (int i = n; i >= 0; --i) acc = acc * x + c[i];
    return acc;
}

/* Persistent worker pool for within-row parallelism.  Work is handed out as
 * block indices through an atomic ticket; only as many workers as the row
 * can feed are woken (semaphore), the caller always participates, and block
 * results land in disjoint slots, so scheduling never affects output. */
class RowPool {
public:
    explicit RowPool(int nworkers) {
        for (int i = 0; i < nworkers; ++i)
            workers_.emplace_back([this] { worker_loop(); });
    }

    ~RowPool() {
        quit_.store(true, std::memory_order_release);
        sem_.release(std::ptrdiff_t(workers_.size()));
        for (auto& t : workers_) t.join();
    }

    int workers() const { return int(workers_.size()); }

    void run(int nblocks, const std::function<void(int)>& fn) {
        int engage = std::min(int(workers_.size()), nblocks - 1);
        if (engage <= 0) {
            for (int b = 0; b < nblocks; ++b) fn(b);
            return;
        }
        fn_ = &fn;
        nblocks_ = nblocks;
        next_.store(0, std::memory_order_relaxed);
        pending_.store(engage, std::memory_order_relaxed);
        sem_.release(engage);
        int b;
        while ((b = next_.fetch_add(1, std::memory_order_relaxed)) < nblocks) fn(b);
        for (int r; (r = pending_.load(std::memory_order_acquire)) != 0;)
            pending_.wait(r, std::memory_order_acquire);
    }

private:
    void worker_loop() {
        for (;;) {
            sem_.acquire();
            if (quit_.load(std::memory_order_acquire)) return;
            const std::function<void(int)>& fn = *fn_;
            const int nblocks = nblocks_;
            int b;
            while ((b = next_.fetch_add(1, std::memory_order_relaxed)) < nblocks) fn(b);
            if (pending_.fetch_sub(1, std::memory_order_acq_rel) == 1)
                pending_.notify_one();
        }
    }

    std::vector<std::thread> workers_;
    std::counting_semaphore<> sem_{0};
    std::atomic<bool> quit_{false};
    const std::function<void(int)>* fn_ = nullptr;
    int nblocks_ = 0;
    std::atomic<int> next_{0};
    std::atomic<int> pending_{0};
};

}  // namespace

RawRun run_recurrence(const Poly& g, double y, int pmax, const EngineOptions& opt,
                      OverflowPolicy policy) {
    if (pmax < 1) throw precondition_error("pmax must be >= 1");
    if (!std::isfinite(y)) throw precondition_error("starting value must be finite");
    const std::int64_t cap = opt.exponent_cap;
    if (cap < 1 || cap >= ScaledReal::kExponentLimit / 4)
        throw precondition_error("exponent cap out of range");

    const std::vector<double> gc(g.coeffs().begin(), g.coeffs().end());
    const int gdeg = int(gc.size()) - 1;

    RawRun out;
    out.lambda.assign(std::size_t(pmax) + 1, ScaledReal{});
    out.lambda[1] = ScaledReal::from_double(y);

    // mantissa/exponent mirrors of lambda for the hot loop
    std::vector<double> lm(std::size_t(pmax) + 1, 0.0);
    std::vector<std::int64_t> le(std::size_t(pmax) + 1, kZeroExp);
    lm[1] = out.lambda[1].mantissa();
    le[1] = out.lambda[1].is_zero() ? kZeroExp : out.lambda[1].exponent();

    const int max_blocks = (pmax + kBlock - 1) / kBlock;
    std::vector<double> w(std::size_t(pmax) + 1);
    std::vector<double> tm(std::size_t(pmax) + 1);
    std::vector<std::int64_t> te(std::size_t(pmax) + 1);
    std::vector<std::int64_t> blockmax(static_cast<std::size_t>(max_blocks));
    std::vector<double> bsum(static_cast<std::size_t>(max_blocks));

    RowPool pool(resolve_threads(opt.threads) - 1);

    // Row state read by worker blocks; rewritten between rows only while no
    // row is in flight (pool.run has an acquire/release fence at each edge).
    int row_pp = 0;
    double row_inv = 0.0;

    std::function<void(int)> do_block = [&](int blk) {
        const int pp = row_pp;
        const double inv = row_inv;
        const int lo = 1 + blk * kBlock;
        const int hi = std::min(pp - 1, lo + kBlock - 1);
        for (int q = lo; q <= hi; ++q) w[std::size_t(q)] = eval_poly(gc.data(), gdeg, q * inv);
        std::int64_t bmax = kZeroExp;
        for (int q = lo; q <= hi; ++q) {
            double m = lm[std::size_t(q)] * lm[std::size_t(pp - q)] * w[std::size_t(q)];
            if (m == 0.0) {
                tm[std::size_t(q)] = 0.0;
                te[std::size_t(q)] = kZeroExp;
                continue;
            }
            std::int64_t e = le[std::size_t(q)] + le[std::size_t(pp - q)];
            std::uint64_t u = std::bit_cast<std::uint64_t>(m);
            int k = int((u >> 52) & 0x7FF);
            if (k == 0) {  // subnormal product: slow path
                int kk;
                m = 2.0 * std::frexp(m, &kk);
                e += kk - 1;
            } else {
                m = std::bit_cast<double>((u & 0x800FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
                e += k - 1023;
            }
            tm[std::size_t(q)] = m;
            te[std::size_t(q)] = e;
            if (e > bmax) bmax = e;
        }
        blockmax[std::size_t(blk)] = bmax;
    };

    for (int pp = 2; pp <= pmax; ++pp) {
        const int p = pp - 1;
        row_pp = pp;
        row_inv = 1.0 / pp;
        const int nblocks = (p + kBlock - 1) / kBlock;
        pool.run(nblocks, do_block);

        std::int64_t E = kZeroExp;
        for (int b = 0; b < nblocks; ++b) E = std::max(E, blockmax[std::size_t(b)]);

        if (E == kZeroExp) {  // every term vanished
            if (policy == OverflowPolicy::Throw)
                throw non_positive_lambda(
                    "sequence value vanished at p = " + std::to_string(pp), pp);
            out.lambda[pp] = ScaledReal{};
            lm[std::size_t(pp)] = 0.0;
            le[std::size_t(pp)] = kZeroExp;
            continue;
        }

        // Rebase against the row max, Neumaier inside each block, then a
        // fixed pairwise tree over block sums: bit-stable for any schedule.
        for (int b = 0; b < nblocks; ++b) {
            const int lo = 1 + b * kBlock;
            const int hi = std::min(p, lo + kBlock - 1);
            double s = 0.0, comp = 0.0;
            for (int q = lo; q <= hi; ++q) {
                double x = tm[std::size_t(q)] * pow2i(te[std::size_t(q)] - E);
                double t = s + x;
                comp += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
                s = t;
            }
            bsum[std::size_t(b)] = s + comp;
        }
        for (int width = 1; width < nblocks; width *= 2)
            for (int i = 0; i + width < nblocks; i += 2 * width)
                bsum[std::size_t(i)] += bsum[std::size_t(i + width)];

        double mant = bsum[0] / double(p);
        if (policy == OverflowPolicy::Throw && !(mant > 0.0))
            throw non_positive_lambda(
                "sequence value is not positive at p = " + std::to_string(pp), pp);
        if (mant == 0.0) {
            out.lambda[pp] = ScaledReal{};
            lm[std::size_t(pp)] = 0.0;
            le[std::size_t(pp)] = kZeroExp;
            continue;
        }

        ScaledReal val(mant, E);
        if (val.exponent() > cap || val.exponent() < -cap) {
            if (policy == OverflowPolicy::Throw)
                throw exponent_overflow("sequence exponent exceeded the cap at p = " +
                                        std::to_string(pp));
            val = ScaledReal(val.mantissa(), val.exponent() > cap ? cap : -cap);
            if (out.saturated_at == 0) out.saturated_at = pp;
        }
        out.lambda[pp] = val;
        lm[std::size_t(pp)] = val.mantissa();
        le[std::size_t(pp)] = val.exponent();
    }
    return out;
}

SequenceTable compute_sequence(const Kernels& k, int pmax, const EngineOptions& opt) {
    if (pmax < 2) throw precondition_error("pmax must be >= 2");
    if (!opt.skip_positivity_check) {
        PositivityResult pos = check_positivity(k.f1);
        if (!pos.passed)
            throw assumption_error("f1 is not strictly positive on [0,1]: min " +
                                   std::to_string(pos.min_value) + " at x = " +
                                   std::to_string(pos.min_location));
    }

    RawRun run = run_recurrence(k.f1.scaled(0.5), 1.0, pmax, opt, OverflowPolicy::Throw);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    SequenceTable t;
    t.pmax = pmax;
    t.lambda = std::move(run.lambda);
    t.log_lambda.assign(std::size_t(pmax) + 1, nan);
    t.a.assign(std::size_t(pmax) + 1, nan);
    t.b.assign(std::size_t(pmax) + 1, nan);
    t.log_lambda[1] = 0.0;
    t.a[1] = 1.0;

    double lsum = 0.0, lcomp = 0.0;  // compensated cumulative ln L_p
    for (int p = 2; p <= pmax; ++p) {
        const ScaledReal &cur = t.lambda[std::size_t(p)], &prev = t.lambda[std::size_t(p - 1)];
        double d = ScaledReal(cur.mantissa() / prev.mantissa(),
                              cur.exponent() - prev.exponent())
                       .log();  // d_p = ln(L_p / L_{p-1}), full precision
        double s = lsum + d;
        lcomp += (std::fabs(lsum) >= std::fabs(d)) ? (lsum - s) + d : (d - s) + lsum;
        lsum = s;
        double lp = lsum + lcomp;
        t.log_lambda[std::size_t(p)] = lp;
        double pd = double(p);
        t.a[std::size_t(p)] = std::exp(-lp / pd);
        // b_p = p^2 expm1(l_{p-1}/(p-1) - l_p/p), written through d_p so the
        // cancellation between the two quotients never touches l_p's bits
        t.b[std::size_t(p)] = pd * pd * std::expm1(lp / (pd * (pd - 1.0)) - d / (pd - 1.0));
    }
    return t;
}

RawRun lambda_direct(const Kernels& k, double y, int pmax, const EngineOptions& opt) {
    if (!(y > 0.0)) throw precondition_error("y must be positive");
    if (pmax < 1) throw precondition_error("pmax must be >= 1");
    return run_recurrence(k.f1.scaled(0.5), y, pmax, opt, OverflowPolicy::Saturate);
}

Criticality classify_y(const SequenceTable& t, double y) {
    if (!(y > 0.0)) throw precondition_error("y must be positive");
    if (t.pmax < 2) throw precondition_error("sequence table too short");
    int lo = std::max(1, t.pmax / 2);
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (int p = lo; p <= t.pmax; ++p) {
        mn = std::min(mn, t.a[std::size_t(p)]);
        mx = std::max(mx, t.a[std::size_t(p)]);
    }
    double margin = 3.0 * (mx - mn);
    if (y < mn - margin) return Criticality::Subcritical;
    if (y > mx + margin) return Criticality::Supercritical;
    return Criticality::Indeterminate;
}

}  // namespace separatrix
