#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace separatrix {

/* Dense univariate polynomial over binary64, coefficient of x^k at index k.
 * Canonical form everywhere: no trailing zero coefficients, no negative
 * zeros, all coefficients finite.  The zero polynomial is the empty span
 * and reports degree 0. */
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<double> coeffs);
    static Poly constant(double c);

    int degree() const noexcept { return c_.empty() ? 0 : int(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    std::span<const double> coeffs() const noexcept { return c_; }
    double coeff(int k) const noexcept {
        return (k >= 0 && k < int(c_.size())) ? c_[std::size_t(k)] : 0.0;
    }

    double operator()(double x) const noexcept;               // Horner
    std::complex<double> operator()(std::complex<double> z) const;

    Poly derivative() const;
    Poly antiderivative() const;          // integration constant 0
    Poly reflect() const;                 // x -> 1-x; degree above 64 rejected
    double integral01() const noexcept;   // sum c_k/(k+1)

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(double s) const;

    bool operator==(const Poly& other) const = default;

private:
    std::vector<double> c_;
    void canonicalize();
};

/* Text forms accepted:
 *   - monomial sum:  [+-][coef]["*"]["x"["^" uint]] ...   e.g. "6x^2-10x+4"
 *   - coefficient list, constant term first:  "coeffs:4,-10,6"
 * Whitespace is ignored.  Decimal literals are parsed with correct rounding.
 * Throws parse_error carrying a 0-based offset into the input. */
Poly parse_poly(std::string_view text);

// Canonical rendering in descending powers ("6x^2-10x+4", zero -> "0").
// Coefficients print in shortest round-trip form, so parse(render(p)) == p.
std::string render(const Poly& p);

}  // namespace separatrix
