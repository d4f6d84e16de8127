#include "separatrix/poly.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "separatrix/errors.hpp"

namespace separatrix {

namespace {

// Degree cap for the binomial transform in reflect().  C(64,32) still fits
// an unsigned 64-bit integer exactly; past that the transform would lose
// bits silently, so higher degrees are rejected outright.
constexpr int kMaxReflectDegree = 64;

// Parser guard against absurd exponents ("x^999999") allocating gigabytes.
constexpr int kMaxParseDegree = 1024;

const std::array<std::array<std::uint64_t, kMaxReflectDegree + 1>, kMaxReflectDegree + 1>&
binomials() {
    static const auto table = [] {
        std::array<std::array<std::uint64_t, kMaxReflectDegree + 1>, kMaxReflectDegree + 1> t{};
        for (int n = 0; n <= kMaxReflectDegree; ++n) {
            t[n][0] = 1;
            for (int k = 1; k <= n; ++k)
                t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
        }
        return t;
    }();
    return table;
}

}  // namespace

Poly::Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    for (double c : c_)
        if (!std::isfinite(c))
            throw precondition_error("polynomial coefficient is not finite");
    canonicalize();
}

Poly Poly::constant(double c) { return Poly(std::vector<double>{c}); }

void Poly::canonicalize() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    for (double& c : c_)
        if (c == 0.0) c = 0.0;  // normalize -0.0
}

double Poly::operator()(double x) const noexcept {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

std::complex<double> Poly::operator()(std::complex<double> z) const {
    std::complex<double> acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
    return acc;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
    return Poly(std::move(d));
}

Poly Poly::antiderivative() const {
    if (c_.empty()) return Poly();
    std::vector<double> d(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / double(k + 1);
    return Poly(std::move(d));
}

Poly Poly::reflect() const {
    if (degree() > kMaxReflectDegree)
        throw precondition_error("polynomial degree exceeds 64 in reflect");
    if (c_.empty()) return Poly();
    const auto& C = binomials();
    std::vector<double> out(c_.size(), 0.0);
    // p(1-x) = sum_k c_k (1-x)^k = sum_j [ sum_{k>=j} c_k C(k,j) (-1)^j ] x^j
    for (std::size_t j = 0; j < c_.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = j; k < c_.size(); ++k) s += c_[k] * double(C[k][j]);
        out[j] = (j % 2 == 0) ? s : -s;
    }
    return Poly(std::move(out));
}

double Poly::integral01() const noexcept {
    double s = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) s += c_[k] / double(k + 1);
    return s;
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<double> out(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = (k < a.c_.size() ? a.c_[k] : 0.0) + (k < b.c_.size() ? b.c_[k] : 0.0);
    return Poly(std::move(out));
}

Poly operator-(const Poly& a, const Poly& b) {
    std::vector<double> out(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = (k < a.c_.size() ? a.c_[k] : 0.0) - (k < b.c_.size() ? b.c_[k] : 0.0);
    return Poly(std::move(out));
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.c_.empty() || b.c_.empty()) return Poly();
    std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(out));
}

Poly Poly::scaled(double s) const {
    std::vector<double> out(c_);
    for (double& c : out) c *= s;
    return Poly(std::move(out));
}

/* ---- parsing ---------------------------------------------------------- */

namespace {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
};

[[noreturn]] void fail(const Cursor& c, const std::string& what) {
    throw parse_error(what + " at offset " + std::to_string(c.pos), c.pos);
}

// Correctly rounded double at the cursor; false if no number starts here.
bool read_double(Cursor& c, double& out) {
    const char* b = c.s.data() + c.pos;
    const char* e = c.s.data() + c.s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p == b) return false;
    c.pos += std::size_t(p - b);
    return true;
}

Poly parse_coeff_list(Cursor c) {
    std::vector<double> coeffs;
    for (;;) {
        c.skip_ws();
        double v;
        if (!read_double(c, v)) fail(c, "expected coefficient");
        coeffs.push_back(v);
        c.skip_ws();
        if (c.done()) break;
        if (c.peek() != ',') fail(c, "expected ','");
        ++c.pos;
    }
    return Poly(std::move(coeffs));
}

Poly parse_terms(Cursor c) {
    std::vector<double> coeffs;
    bool first = true;
    for (;;) {
        c.skip_ws();
        if (c.done()) {
            if (first) fail(c, "empty polynomial");
            break;
        }
        double sign = 1.0;
        if (c.peek() == '+' || c.peek() == '-') {
            if (c.peek() == '-') sign = -1.0;
            ++c.pos;
            c.skip_ws();
        } else if (!first) {
            fail(c, "expected '+' or '-'");
        }
        double coef = 1.0;
        bool have_coef = read_double(c, coef);
        c.skip_ws();
        if (have_coef && c.peek() == '*') {
            ++c.pos;
            c.skip_ws();
        }
        int exp = 0;
        if (c.peek() == 'x' || c.peek() == 'X') {
            ++c.pos;
            exp = 1;
            c.skip_ws();
            if (c.peek() == '^') {
                ++c.pos;
                c.skip_ws();
                const char* b = c.s.data() + c.pos;
                const char* e = c.s.data() + c.s.size();
                unsigned long v = 0;
                auto [p, ec] = std::from_chars(b, e, v);
                if (ec != std::errc() || p == b)
                    fail(c, "exponent must be a non-negative integer");
                if (v > kMaxParseDegree) fail(c, "exponent too large");
                exp = int(v);
                c.pos += std::size_t(p - b);
            }
        } else if (!have_coef) {
            fail(c, "expected term");
        }
        if (int(coeffs.size()) <= exp) coeffs.resize(std::size_t(exp) + 1, 0.0);
        coeffs[std::size_t(exp)] += sign * coef;
        first = false;
    }
    return Poly(std::move(coeffs));
}

}  // namespace

Poly parse_poly(std::string_view text) {
    Cursor c{text};
    c.skip_ws();
    if (text.substr(c.pos).starts_with("coeffs:")) {
        c.pos += 7;
        return parse_coeff_list(c);
    }
    return parse_terms(c);
}

std::string render(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    auto c = p.coeffs();
    for (int k = p.degree(); k >= 0; --k) {
        double v = c[std::size_t(k)];
        if (v == 0.0) continue;
        if (!out.empty())
            out += (v < 0 ? '-' : '+');
        else if (v < 0)
            out += '-';
        double av = std::fabs(v);
        if (av != 1.0 || k == 0) {
            char buf[40];
            auto [e, ec] = std::to_chars(buf, buf + sizeof buf, av);
            (void)ec;
            out.append(buf, e);
        }
        if (k >= 1) out += 'x';
        if (k >= 2) {
            out += '^';
            out += std::to_string(k);
        }
    }
    return out;
}

}  // namespace separatrix
