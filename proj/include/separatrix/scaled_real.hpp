#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "separatrix/errors.hpp"

namespace separatrix {

/* Value m * 2^e with the mantissa normalized into ±[1,2) (zero stored as
 * m = 0, e = 0) and a 64-bit exponent, so sequences that decay far below
 * binary64's underflow threshold stay exactly representable.  Every
 * operation renormalizes; |e| is kept below 2^62 and overflowing that
 * throws exponent_overflow. */
class ScaledReal {
public:
    static constexpr std::int64_t kExponentLimit = std::int64_t(1) << 62;

    constexpr ScaledReal() = default;
    ScaledReal(double m, std::int64_t e) : m_(m), e_(e) { normalize(); }
    static ScaledReal from_double(double v) { return ScaledReal(v, 0); }

    double mantissa() const noexcept { return m_; }
    std::int64_t exponent() const noexcept { return e_; }
    bool is_zero() const noexcept { return m_ == 0.0; }
    int sign() const noexcept { return m_ > 0 ? 1 : (m_ < 0 ? -1 : 0); }

    // May flush to 0 / ±inf when the exponent leaves binary64 range.
    double to_double() const noexcept {
        if (m_ == 0.0) return 0.0;
        int e = int(std::max<std::int64_t>(-6000, std::min<std::int64_t>(6000, e_)));
        return std::ldexp(m_, e);
    }

    // Natural log of a positive value; ln2 split keeps the absolute error
    // near the representation limit even for exponents ~1e5.
    double log() const {
        if (!(m_ > 0.0)) throw precondition_error("log of non-positive ScaledReal");
        constexpr double ln2_hi = 0x1.62e42fee00000p-1;   // upper 26 bits of ln 2
        constexpr double ln2_lo = 0x1.a39ef35793c76p-33;  // remainder
        double e = double(e_);
        return (e * ln2_hi + std::log(m_)) + e * ln2_lo;
    }

    // this/denom collapsed to double (exponent difference must be sane).
    double ratio(const ScaledReal& denom) const {
        if (denom.is_zero()) throw precondition_error("ScaledReal ratio by zero");
        if (is_zero()) return 0.0;
        std::int64_t de = e_ - denom.e_;
        int e = int(std::max<std::int64_t>(-6000, std::min<std::int64_t>(6000, de)));
        return std::ldexp(m_ / denom.m_, e);
    }

    friend ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) {
        if (a.is_zero() || b.is_zero()) return {};
        __int128 e = __int128(a.e_) + b.e_;  // widened: the sum may pass int64
        if (e >= kExponentLimit || e <= -kExponentLimit)
            throw exponent_overflow("ScaledReal exponent out of range");
        return ScaledReal(a.m_ * b.m_, std::int64_t(e));
    }
    ScaledReal& operator*=(double s) {
        m_ *= s;
        normalize();
        return *this;
    }

    bool operator==(const ScaledReal& other) const = default;

private:
    double m_ = 0.0;
    std::int64_t e_ = 0;

    void normalize() {
        if (m_ == 0.0) {
            e_ = 0;
            return;
        }
        if (!std::isfinite(m_)) throw precondition_error("non-finite ScaledReal mantissa");
        std::uint64_t u = std::bit_cast<std::uint64_t>(m_);
        int k = int((u >> 52) & 0x7FF);
        if (k == 0) {  // subnormal mantissa: slow path
            int kk;
            m_ = 2.0 * std::frexp(m_, &kk);
            e_ += kk - 1;
        } else {
            m_ = std::bit_cast<double>((u & 0x800FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
            e_ += k - 1023;
        }
        if (e_ >= kExponentLimit || e_ <= -kExponentLimit)
            throw exponent_overflow("ScaledReal exponent out of range");
    }
};

}  // namespace separatrix
