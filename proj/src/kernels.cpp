#include "separatrix/kernels.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "separatrix/errors.hpp"

namespace separatrix {

Kernels build_kernels(const Poly& f_raw, KernelVariant variant) {
    if (f_raw.is_zero())
        throw kernel_error("degenerate_kernel", "kernel polynomial is identically zero");
    double K = f_raw.integral01();
    if (!(K > 0.0))
        throw kernel_error("non_positive_integral",
                           "kernel integral over [0,1] must be positive");
    Kernels k;
    k.K = K;
    k.f = f_raw.scaled(1.0 / K);
    k.f1 = k.f + k.f.reflect();
    k.variant = variant;

    const Poly& g = (variant == KernelVariant::Symmetrized) ? k.f1 : k.f;
    // f2 = -(x g)'
    {
        std::vector<double> xg(g.coeffs().size() + 1, 0.0);
        for (std::size_t i = 0; i < g.coeffs().size(); ++i) xg[i + 1] = g.coeffs()[i];
        k.f2 = Poly(std::move(xg)).derivative().scaled(-1.0);
    }
    // f3 = -(1/x^2) int_0^x t f2(t) dt; with f2 = sum e_k x^k this is
    // sum -e_k/(k+2) x^k, term by term.
    {
        std::vector<double> f3(k.f2.coeffs().size(), 0.0);
        for (std::size_t i = 0; i < f3.size(); ++i) f3[i] = -k.f2.coeffs()[i] / double(i + 2);
        k.f3 = Poly(std::move(f3));
    }
    return k;
}

/* ---- positivity certification ----------------------------------------- */

namespace {

struct Box {
    double lo, hi;
    double lb;  // certified lower bound of g on [lo,hi]
    bool operator>(const Box& other) const { return lb > other.lb; }
};

constexpr double kWidthFloor = 1e-12;
constexpr long kPopCap = 2'000'000;  // defensive; the bound halves per level

// Horner value together with its worst-case rounding error
//   |fl(p(x)) - p(x)| <= gamma_{2n} sum |c_k||x|^k,  gamma_{2n} ~ n eps,
// overestimated by 2x.  Exact evaluations (constants, x = 0) get eta = 0,
// so they still decide signs outright.
struct Eval {
    double v, eta;
};

Eval eval_with_error(const Poly& p, double x) {
    auto c = p.coeffs();
    if (c.empty()) return {0.0, 0.0};
    double acc = 0.0, mag = 0.0, ax = std::fabs(x);
    for (std::size_t i = c.size(); i-- > 0;) {
        acc = acc * x + c[i];
        mag = mag * ax + std::fabs(c[i]);
    }
    double n = double(c.size() - 1);
    return {acc, 2.0 * n * std::numeric_limits<double>::epsilon() * mag};
}

}  // namespace

PositivityResult check_positivity(const Poly& g) {
    // second-order certificate on a box with center c and half-width h:
    //   g(x) >= g(c) - |g'(c)| h - M h^2 / 2,  M >= max |g''| on [0,1],
    // less the rounding-error allowances of the g and g' evaluations.  A
    // Taylor bound through the derivative tightens quadratically near smooth
    // minima; the plain Lipschitz bound would need ~L/sqrt(k rtol) boxes,
    // hopeless once the coefficients reach 1e5.  Positivity is disproved
    // only by a sample certifiably <= 0, i.e. v <= -eta; minima within
    // rounding noise of zero land in inconclusive_error instead of being
    // decided by whichever way the noise happened to fall.
    const Poly gd = g.derivative();
    double M = 0.0;
    for (std::size_t k = 2; k < g.coeffs().size(); ++k)
        M += double(k) * double(k - 1) * std::fabs(g.coeffs()[k]);

    double best = std::numeric_limits<double>::infinity();
    double best_loc = 0.0;
    bool disproved = false;
    auto sample = [&](double x) {
        Eval e = eval_with_error(g, x);
        if (e.v < best) { best = e.v; best_loc = x; }
        if (e.v <= -e.eta) disproved = true;
        return e;
    };
    sample(0.0);
    sample(1.0);

    std::priority_queue<Box, std::vector<Box>, std::greater<Box>> frontier;
    auto push = [&](double lo, double hi) {
        double c = 0.5 * (lo + hi);
        double h = 0.5 * (hi - lo);
        Eval v = sample(c);
        Eval dv = eval_with_error(gd, c);
        frontier.push(
            {lo, hi, v.v - (std::fabs(dv.v) + dv.eta) * h - 0.5 * M * h * h - v.eta});
    };
    push(0.0, 1.0);

    for (long pops = 0; pops < kPopCap && !frontier.empty(); ++pops) {
        Box box = frontier.top();
        // reported-minimum refinement target
        double rtol = 1e-9 * std::max(1.0, std::fabs(best));
        if (box.lb >= best - rtol && (box.lb > 0.0 || disproved))
            return {best, best_loc, box.lb > 0.0};
        if (box.hi - box.lo < kWidthFloor) {
            if (disproved) return {best, best_loc, false};
            throw inconclusive_error(
                "positivity undecided at width floor: minimum in [" +
                    std::to_string(box.lb) + ", " + std::to_string(best) + "]",
                box.lb, best);
        }
        frontier.pop();
        double mid = 0.5 * (box.lo + box.hi);
        push(box.lo, mid);
        push(mid, box.hi);
    }
    throw inconclusive_error("positivity certification did not converge",
                             frontier.empty() ? best : frontier.top().lb, best);
}

}  // namespace separatrix
