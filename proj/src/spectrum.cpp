#include "separatrix/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "separatrix/errors.hpp"

namespace separatrix {

namespace {

using cplx = std::complex<double>;

// Nonzero coefficients of f1 with their indices: the terms of the moment sum
// F1(s) = sum d_k/(s+k+1).  Skipping zero coefficients keeps removable
// factors out of the common denominator.
struct MomentTerms {
    std::vector<int> k;
    std::vector<double> d;
};

MomentTerms moment_terms(const Poly& f1) {
    MomentTerms t;
    auto c = f1.coeffs();
    for (int i = 0; i < int(c.size()); ++i)
        if (c[std::size_t(i)] != 0.0) {
            t.k.push_back(i);
            t.d.push_back(c[std::size_t(i)]);
        }
    return t;
}

// F1(s) and F1'(s) straight from the partial fractions: much better
// conditioned than the expanded numerator/denominator, used for polishing.
struct MomentSum {
    MomentTerms t;
    cplx value(cplx s) const {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < t.k.size(); ++i) acc += t.d[i] / (s + double(t.k[i] + 1));
        return acc;
    }
    cplx deriv(cplx s) const {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < t.k.size(); ++i) {
            cplx den = s + double(t.k[i] + 1);
            acc -= t.d[i] / (den * den);
        }
        return acc;
    }
};

// Common-denominator form: D = prod (s+k+1), N = sum d_k prod_{j!=k} (s+j+1).
void build_rational(const MomentTerms& t, Poly& num, Poly& den) {
    den = Poly::constant(1.0);
    for (int k : t.k) den = den * Poly({double(k + 1), 1.0});
    num = Poly();
    for (std::size_t i = 0; i < t.k.size(); ++i) {
        Poly term = Poly::constant(t.d[i]);
        for (std::size_t j = 0; j < t.k.size(); ++j)
            if (j != i) term = term * Poly({double(t.k[j] + 1), 1.0});
        num = num + term;
    }
}

// Exact-division helper: A/(s-1) with the (known ~0) remainder returned.
Poly divide_by_s_minus_1(const Poly& a, double& remainder) {
    int m = a.degree();
    if (a.is_zero() || m == 0) {
        remainder = a.coeff(0);
        return Poly();
    }
    std::vector<double> q(std::size_t(m), 0.0);
    double carry = a.coeff(m);
    for (int i = m - 1; i >= 0; --i) {
        q[std::size_t(i)] = carry;
        carry = a.coeff(i) + carry;
    }
    remainder = carry;
    return Poly(std::move(q));
}

double coeff_norm(const Poly& p) {
    double n = 0.0;
    for (double c : p.coeffs()) n = std::max(n, std::fabs(c));
    return n;
}

}  // namespace

MomentFunctions moment_functions(const Kernels& k) {
    MomentTerms t = moment_terms(k.f1);
    if (t.k.empty()) throw precondition_error("f1 is identically zero");
    MomentFunctions m;
    build_rational(t, m.F1.num, m.F1.den);
    // F3 = (s F1 - 1)/(s - 1): numerator s*N - D, the (s-1) divides exactly
    Poly sN = m.F1.num * Poly({0.0, 1.0});
    Poly top = sN - m.F1.den;
    double rem = 0.0;
    Poly q = divide_by_s_minus_1(top, rem);
    if (std::fabs(rem) > 1e-9 * std::max(1.0, coeff_norm(top)))
        throw numeric_error("moment_relation",
                            "s F1 - 1 is not divisible by s - 1 (F1(1) != 1?)");
    m.F3.num = std::move(q);
    m.F3.den = m.F1.den;
    return m;
}

Poly char_poly(const Kernels& k) {
    MomentTerms t = moment_terms(k.f1);
    if (t.k.empty()) throw precondition_error("f1 is identically zero");
    Poly num, den;
    build_rational(t, num, den);
    return den - num;
}

/* ---- root finding ------------------------------------------------------ */

namespace {

cplx horner(std::span<const double> c, cplx z) {
    cplx acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
}

// Aberth–Ehrlich simultaneous iteration; coefficients ascending, c.back() != 0.
std::vector<cplx> aberth(std::span<const double> c) {
    const int n = int(c.size()) - 1;
    std::vector<double> monic(c.begin(), c.end());
    for (double& v : monic) v /= c.back();
    std::vector<double> dcoef(std::size_t(n), 0.0);
    for (int i = 1; i <= n; ++i) dcoef[std::size_t(i - 1)] = double(i) * monic[std::size_t(i)];

    double radius = 0.0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::fabs(monic[std::size_t(i)]));
    radius = 1.0 + radius;  // Cauchy bound

    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * std::numbers::pi * (double(j) + 0.5) / double(n) + 0.45;
        z[std::size_t(j)] = radius * cplx(std::cos(th), std::sin(th));
    }

    // a root counts as settled when its correction is tiny or |P| reaches the
    // rounding noise of the Horner evaluation itself (backward-error stop --
    // essential once coefficients span many orders of magnitude)
    std::vector<bool> settled(std::size_t(n), false);
    const double eps = std::numeric_limits<double>::epsilon();
    const int max_iter = 500;
    for (int iter = 0; iter < max_iter; ++iter) {
        bool all = true;
        for (int j = 0; j < n; ++j) {
            if (settled[std::size_t(j)]) continue;
            cplx zj = z[std::size_t(j)];
            cplx pv = horner(monic, zj);
            double az = std::abs(zj), floor_ = 0.0;
            for (std::size_t t = monic.size(); t-- > 0;)
                floor_ = floor_ * az + std::fabs(monic[t]);
            if (std::abs(pv) <= 4.0 * eps * double(n) * floor_) {
                settled[std::size_t(j)] = true;
                continue;
            }
            cplx dv = horner(dcoef, zj);
            cplx ratio = (dv == 0.0) ? cplx(0.0) : pv / dv;
            cplx rep = 0.0;
            for (int m = 0; m < n; ++m) {
                if (m == j) continue;
                cplx diff = zj - z[std::size_t(m)];
                if (diff == 0.0) diff = cplx(1e-30, 1e-30);
                rep += 1.0 / diff;
            }
            cplx denom = 1.0 - ratio * rep;
            cplx step = (denom == 0.0) ? ratio : ratio / denom;
            z[std::size_t(j)] = zj - step;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z[std::size_t(j)])))
                settled[std::size_t(j)] = true;
            else
                all = false;
        }
        if (all) return z;
    }
    throw no_convergence("root iteration did not converge in 500 sweeps", z);
}

}  // namespace

std::vector<RootInfo> find_roots(const Poly& p) {
    if (p.is_zero()) throw precondition_error("cannot take roots of the zero polynomial");
    std::vector<double> c(p.coeffs().begin(), p.coeffs().end());

    std::vector<RootInfo> out;
    std::size_t zeros = 0;
    while (zeros < c.size() - 1 && c[zeros] == 0.0) ++zeros;
    if (zeros > 0) {
        out.push_back({cplx(0.0, 0.0), int(zeros), 0.0});
        c.erase(c.begin(), c.begin() + long(zeros));
    }
    const int n = int(c.size()) - 1;
    if (n == 0) return out;

    std::vector<cplx> z;
    if (n == 1) {
        z.push_back(cplx(-c[0] / c[1], 0.0));
    } else {
        z = aberth(c);
    }

    // conjugate symmetrization: real coefficients force root symmetry
    std::vector<bool> used(z.size(), false);
    std::vector<cplx> paired;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (used[i]) continue;
        double tol = 1e-8 * (1.0 + std::abs(z[i]));
        if (std::fabs(z[i].imag()) <= tol) {
            paired.push_back(cplx(z[i].real(), 0.0));
            used[i] = true;
            continue;
        }
        // nearest unused candidate for the conjugate partner
        std::size_t best = i;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (j == i || used[j]) continue;
            double dd = std::abs(z[j] - std::conj(z[i]));
            if (dd < bestd) {
                bestd = dd;
                best = j;
            }
        }
        if (best != i && bestd <= 1e-3 * (1.0 + std::abs(z[i]))) {
            cplx rep = 0.5 * (z[i] + std::conj(z[best]));
            if (rep.imag() < 0) rep = std::conj(rep);
            paired.push_back(rep);
            paired.push_back(std::conj(rep));
            used[i] = used[best] = true;
        } else {
            paired.push_back(z[i]);  // unpaired complex root: keep as computed
            used[i] = true;
        }
    }

    // cluster into multiplicities: transitive closure over pairwise distance.
    // A sweep over a 1-D sort is not enough -- conjugate multiple roots
    // interleave the +-i mirrors in any single ordering, splitting clusters.
    std::sort(paired.begin(), paired.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::fabs(v));
    std::vector<bool> taken(paired.size(), false);
    for (std::size_t i = 0; i < paired.size(); ++i) {
        if (taken[i]) continue;
        taken[i] = true;
        std::vector<std::size_t> members{i};
        for (std::size_t m = 0; m < members.size(); ++m) {
            cplx anchor = paired[members[m]];
            double tol = 1e-6 * (1.0 + std::abs(anchor));
            for (std::size_t j = 0; j < paired.size(); ++j)
                if (!taken[j] && std::abs(paired[j] - anchor) <= tol) {
                    taken[j] = true;
                    members.push_back(j);
                }
        }
        cplx sum = 0.0;
        for (std::size_t idx : members) sum += paired[idx];
        cplx v = sum / double(members.size());
        double vb = 0.0;
        for (std::size_t t = c.size(); t-- > 0;) vb = vb * std::abs(v) + std::fabs(c[t]);
        out.push_back({v, int(members.size()), std::abs(horner(c, v)) / std::max(vb, scale)});
    }
    return out;
}

/* ---- spectrum assembly -------------------------------------------------- */

Spectrum build_spectrum(const Kernels& k) {
    Spectrum s;
    s.characteristic = char_poly(k);
    MomentSum F1{moment_terms(k.f1)};

    std::vector<RootInfo> roots = find_roots(s.characteristic);

    // Newton-polish every root against F1(s) - 1 = 0 (the rational function,
    // not the expanded polynomial, whose coefficients are ill-conditioned
    // past degree ~13), then restore exact conjugate pairing.
    for (RootInfo& r : roots) {
        cplx x = r.value;
        cplx best = x;
        double best_res = std::abs(F1.value(x) - 1.0);
        for (int it = 0; it < 60; ++it) {
            cplx g = F1.value(x) - 1.0;
            cplx dg = F1.deriv(x);
            if (dg == 0.0) break;
            cplx nx = x - g / dg;
            if (!std::isfinite(nx.real()) || !std::isfinite(nx.imag())) break;
            if (std::abs(nx - r.value) > 4.0 * (1.0 + std::abs(r.value))) break;  // ran away
            double res = std::abs(F1.value(nx) - 1.0);
            if (res < best_res) {
                best_res = res;
                best = nx;
            }
            if (std::abs(nx - x) <= 1e-14 * (1.0 + std::abs(nx))) {
                x = nx;
                break;
            }
            x = nx;
        }
        r.value = best;
        r.residual = best_res;
    }
    for (RootInfo& r : roots) {  // re-snap conjugate partners bit-exactly
        if (std::fabs(r.value.imag()) <= 1e-9 * (1.0 + std::abs(r.value)))
            r.value = cplx(r.value.real(), 0.0);
        else if (r.value.imag() < 0.0) {
            for (RootInfo& q : roots)
                if (q.value.imag() > 0.0 &&
                    std::abs(std::conj(q.value) - r.value) <= 1e-6 * (1.0 + std::abs(q.value)))
                    r.value = std::conj(q.value);
        }
    }

    std::sort(roots.begin(), roots.end(), [](const RootInfo& a, const RootInfo& b) {
        if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
        return a.value.imag() > b.value.imag();
    });
    s.all_roots = std::move(roots);

    double max_re = -std::numeric_limits<double>::infinity();
    bool any_nonunit = false;
    for (const RootInfo& r : s.all_roots) {
        if (std::abs(r.value - cplx(1.0, 0.0)) <= 1e-6) continue;  // the unit root
        any_nonunit = true;
        max_re = std::max(max_re, r.value.real());
        if (r.value.real() > -1.0) s.sigma_prime.push_back(r.value);
    }

    if (!any_nonunit || max_re < -1e-9)
        s.assumption3 = Assumption3::Holds;
    else if (max_re > 1e-9)
        s.assumption3 = Assumption3::Fails;
    else
        s.assumption3 = Assumption3::Boundary;

    if (s.sigma_prime.empty()) {
        s.sigma1 = -0.5;
    } else {
        s.sigma1 = -std::numeric_limits<double>::infinity();
        for (cplx v : s.sigma_prime) s.sigma1 = std::max(s.sigma1, v.real());
    }
    if (s.sigma1 < 0.0) s.delta = std::min(0.25, -0.5 * s.sigma1);

    return s;
}

}  // namespace separatrix
