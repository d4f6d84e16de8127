#include "separatrix/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "separatrix/errors.hpp"

namespace separatrix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct NeumaierSum {
    double s = 0, c = 0;
    void add(double x) {
        double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

// Gaussian elimination with partial pivoting on an n x n system, n <= 3.
// Returns false when a pivot degenerates (caller falls back).
bool solve_normal(int n, double m[3][3], double rhs[3], double x[3]) {
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(m[perm[r]][col]) > std::fabs(m[perm[piv]][col])) piv = r;
        std::swap(perm[col], perm[piv]);
        double d = m[perm[col]][col];
        if (!(std::fabs(d) > 1e-300)) return false;
        for (int r = col + 1; r < n; ++r) {
            double f = m[perm[r]][col] / d;
            for (int c = col; c < n; ++c) m[perm[r]][c] -= f * m[perm[col]][c];
            rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double acc = rhs[perm[row]];
        for (int c = row + 1; c < n; ++c) acc -= m[perm[row]][c] * x[c];
        x[row] = acc / m[perm[row]][row];
    }
    return true;
}

double median_abs(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Dyadic blocks [2,3],[4,7],...,[2^k, min(2^{k+1}-1, p_hi)] with median |r|,
// then the least-squares slope of log(median) vs log(center) over the blocks
// with lo >= fit_lo and a strictly positive median.
void summarize_blocks(ResidualSeries& s) {
    s.blocks.clear();
    for (int lo = 2; lo <= s.p_hi; lo *= 2) {
        int bl = std::max(lo, s.p_lo);
        int bh = std::min(2 * lo - 1, s.p_hi);
        if (bl > bh) continue;
        std::vector<double> mag;
        mag.reserve(std::size_t(bh - bl + 1));
        for (int p = bl; p <= bh; ++p) mag.push_back(std::fabs(s.r[std::size_t(p)]));
        s.blocks.push_back(
            {bl, bh, std::sqrt(double(bl) * double(bh)), median_abs(mag)});
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const ResidualBlock& b : s.blocks) {
        if (b.lo < s.fit_lo || !(b.median > 0.0)) continue;
        double x = std::log(b.center), y = std::log(b.median);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double den = double(n) * sxx - sx * sx;
    s.fitted_decay_exponent = (n >= 2 && den > 0.0) ? (double(n) * sxy - sx * sy) / den : kNaN;
}

// Dominant element of sigma_prime: max real part, upper half plane on ties.
std::complex<double> dominant_sigma(const Spectrum& sp) {
    std::complex<double> best = sp.sigma_prime.front();
    for (std::complex<double> v : sp.sigma_prime)
        if (v.real() > best.real() || (v.real() == best.real() && v.imag() > best.imag()))
            best = v;
    return best;
}

}  // namespace

/* ---- inductive inequalities --------------------------------------------- */

VerificationReport verify_inductive(const SequenceTable& t, double A, double B, double delta) {
    if (!(A > 1.0)) throw precondition_error("A must exceed 1");
    if (!(B > 0.0 && B < 1.0)) throw precondition_error("B must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 0.5)) throw precondition_error("delta must lie in (0, 1/2)");

    VerificationReport rep;
    rep.A = A;
    rep.B = B;
    rep.delta = delta;

    if (!(t.a[1] >= B)) rep.violations.push_back({1, ViolationKind::LowerBoundB, t.a[1], B});
    for (int p = 2; p <= t.pmax; ++p) {
        double ap = t.a[std::size_t(p)];
        if (!(ap >= B)) rep.violations.push_back({p, ViolationKind::LowerBoundB, ap, B});
        double lhs = std::pow(double(p), 2.0 + delta) *
                     std::fabs(ap - t.a[std::size_t(p) - 1]);
        rep.minimal_A = std::max(rep.minimal_A, lhs);
        if (!(lhs <= A)) rep.violations.push_back({p, ViolationKind::DecayA, lhs, A});
    }
    rep.passed = rep.violations.empty();
    rep.p0 = rep.passed ? t.pmax : rep.violations.front().p - 1;
    return rep;
}

/* ---- residual series ----------------------------------------------------- */

ResidualSeries residual_linearized(const SequenceTable& t, const Kernels& k) {
    ResidualSeries s;
    s.kind = ResidualKind::Linearized;
    s.p_lo = 2;
    s.p_hi = t.pmax - 1;
    s.r.assign(std::size_t(t.pmax) + 1, kNaN);
    for (int p = 2; p < t.pmax; ++p) {
        double pd = double(p);
        NeumaierSum acc;
        for (int q = 2; q <= p; ++q)
            acc.add(t.b[std::size_t(q)] * k.f3(double(q) / pd));
        s.r[std::size_t(p)] = t.b[std::size_t(p) + 1] - acc.value() / pd;
    }
    summarize_blocks(s);
    return s;
}

ResidualSeries residual_a_recurrence(const SequenceTable& t, const Kernels& k) {
    ResidualSeries s;
    s.kind = ResidualKind::ARecurrence;
    s.p_lo = 2;
    s.p_hi = t.pmax - 1;
    s.r.assign(std::size_t(t.pmax) + 1, kNaN);
    std::vector<double> u(std::size_t(t.pmax) + 1, 0.0);  // u_q = (ln L_q)/q = -ln a_q
    for (int q = 1; q <= t.pmax; ++q) u[std::size_t(q)] = t.log_lambda[std::size_t(q)] / double(q);
    for (int p = 2; p < t.pmax; ++p) {
        double pd = double(p);
        double lead = (pd + 1.0) * std::expm1(u[std::size_t(p)] - u[std::size_t(p) + 1]);
        NeumaierSum acc;
        for (int p1 = 1; p1 <= p; ++p1) {
            double g = double(p1) / pd;
            double w = g * k.f2(double(p1) / (pd + 1.0)) / (pd - 1.0);
            acc.add(w * std::expm1(u[std::size_t(p1)] - u[std::size_t(p)]));
        }
        s.r[std::size_t(p)] = lead + acc.value();
    }
    summarize_blocks(s);
    return s;
}

/* ---- log-periodic fit ----------------------------------------------------- */

AsymptoticFit fit_log_periodic(const SequenceTable& t, const Spectrum& sp, int p_lo) {
    if (sp.sigma_prime.empty())
        throw degenerate_fit("sigma-prime is empty, the rescaled series has no reference mode");
    if (p_lo <= 0)
        p_lo = std::max(100, t.pmax / 100);
    else if (p_lo < 16)
        throw precondition_error("p_lo must be at least 16");
    if (p_lo >= t.pmax) throw precondition_error("fit window [p_lo, pmax] is empty");

    std::complex<double> sig = dominant_sigma(sp);
    const double re = sig.real();
    const double nu = std::fabs(sig.imag());
    const int hi = t.pmax;

    std::vector<double> resc(std::size_t(hi) + 1, 0.0);
    double peak = 0.0;
    for (int p = p_lo; p <= hi; ++p) {
        resc[std::size_t(p)] = t.b[std::size_t(p)] * std::pow(double(p), -re);
        peak = std::max(peak, std::fabs(resc[std::size_t(p)]));
    }
    if (peak < 1e-12)
        throw degenerate_fit("rescaled series is identically ~0 over the fit window");

    double scc = 0, scs = 0, sss = 0, rc = 0, rs = 0;
    for (int p = p_lo; p <= hi; ++p) {
        double th = nu * std::log(double(p));
        double cv = std::cos(th), sv = std::sin(th);
        scc += cv * cv;
        scs += cv * sv;
        sss += sv * sv;
        rc += resc[std::size_t(p)] * cv;
        rs += resc[std::size_t(p)] * sv;
    }
    double ca, cb;  // model ca*cos + cb*sin
    double det = scc * sss - scs * scs;
    if (std::fabs(det) > 1e-12 * std::max(1.0, scc * sss)) {
        ca = (rc * sss - rs * scs) / det;
        cb = (rs * scc - rc * scs) / det;
    } else {  // nu ~ 0: the sine column vanishes, fit the cosine alone
        ca = scc > 0.0 ? rc / scc : 0.0;
        cb = 0.0;
    }

    AsymptoticFit fit;
    fit.sigma = sig;
    fit.amplitude = std::hypot(ca, cb);
    fit.phase = std::atan2(-cb, ca);
    fit.p_lo = p_lo;
    fit.p_hi = hi;

    NeumaierSum sq;
    for (int p = p_lo; p <= hi; ++p) {
        double th = nu * std::log(double(p));
        double d = resc[std::size_t(p)] - (ca * std::cos(th) + cb * std::sin(th));
        sq.add(d * d);
    }
    fit.rms_error = std::sqrt(sq.value() / double(hi - p_lo + 1));
    if (fit.amplitude < 1e-12)
        throw degenerate_fit("fitted amplitude is below 1e-12");

    // sign changes of the rescaled series (linear interpolation between the
    // last nonzero sample and the current one)
    std::vector<double> crossings;
    double last_val = 0.0;
    int last_p = 0;
    for (int p = p_lo; p <= hi; ++p) {
        double v = resc[std::size_t(p)];
        if (v == 0.0) continue;
        if (last_val != 0.0 && std::signbit(v) != std::signbit(last_val))
            crossings.push_back(double(last_p) +
                                (double(p) - double(last_p)) * last_val / (last_val - v));
        last_val = v;
        last_p = p;
    }

    // zeros of the unshifted reference cos(nu ln p) inside the window:
    // nu ln x = pi/2 + k pi.  Interlacing is judged against the plain unit
    // cosine, not the fitted one: with a well-fitted phase the reference
    // zeros would collapse onto the series' own crossings and the strict
    // between-count would flip on rounding noise.
    std::vector<double> ref_zeros;
    if (nu > 0.0) {
        const double pi = std::numbers::pi;
        double klo = std::ceil((nu * std::log(double(p_lo)) - pi / 2) / pi);
        double khi = std::floor((nu * std::log(double(hi)) - pi / 2) / pi);
        for (double kk = klo; kk <= khi; kk += 1.0)
            ref_zeros.push_back(std::exp((pi / 2 + kk * pi) / nu));
    }

    fit.zero_interlacing = true;
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
        auto lo = std::upper_bound(ref_zeros.begin(), ref_zeros.end(), crossings[i]);
        auto up = std::lower_bound(ref_zeros.begin(), ref_zeros.end(), crossings[i + 1]);
        if (up - lo != 1) {
            fit.zero_interlacing = false;
            break;
        }
    }
    return fit;
}

/* ---- limit estimate -------------------------------------------------------- */

LimitEstimate estimate_a_inf(const SequenceTable& t, const Spectrum& sp) {
    LimitEstimate e;
    e.raw = t.a[std::size_t(t.pmax)];
    e.window_lo = std::max(2, t.pmax / 2 + 1);
    e.window_hi = t.pmax;
    e.oscillatory_model = !sp.sigma_prime.empty();
    std::complex<double> sig =
        e.oscillatory_model ? dominant_sigma(sp) : std::complex<double>(-0.5, 0.0);
    e.sigma = sig;

    const double ex = sig.real() - 1.0;  // envelope exponent of a_p - a_inf
    const double nu = std::fabs(sig.imag());
    const bool osc = e.oscillatory_model && nu > 1e-12;
    const int ncol = osc ? 3 : 2;

    double m[3][3] = {};
    double rhs[3] = {};
    for (int p = e.window_lo; p <= e.window_hi; ++p) {
        double lp = std::log(double(p));
        double env = std::exp(ex * lp);
        double col[3] = {1.0, 0.0, 0.0};
        if (osc) {
            col[1] = env * std::cos(nu * lp);
            col[2] = env * std::sin(nu * lp);
        } else {
            col[1] = env;
        }
        double av = t.a[std::size_t(p)];
        for (int i = 0; i < ncol; ++i) {
            rhs[i] += col[i] * av;
            for (int j = 0; j < ncol; ++j) m[i][j] += col[i] * col[j];
        }
    }
    double x[3] = {};
    if (solve_normal(ncol, m, rhs, x)) {
        e.extrapolated = x[0];
    } else {  // degenerate window (a handful of rows): fall back to the mean
        NeumaierSum mean;
        for (int p = e.window_lo; p <= e.window_hi; ++p) mean.add(t.a[std::size_t(p)]);
        e.extrapolated = mean.value() / double(e.window_hi - e.window_lo + 1);
    }

    int dec_lo = std::max(2, t.pmax - t.pmax / 10 + 1);
    double mn = t.a[std::size_t(dec_lo)], mx = mn;
    for (int p = dec_lo; p <= t.pmax; ++p) {
        mn = std::min(mn, t.a[std::size_t(p)]);
        mx = std::max(mx, t.a[std::size_t(p)]);
    }
    e.uncertainty = std::max(std::fabs(e.raw - e.extrapolated), mx - mn);
    return e;
}

}  // namespace separatrix
