#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace separatrix {

/* Error taxonomy shared by the library and the CLI.  Every error carries a
 * short machine-readable code; the CLI prints one line per failure,
 *     error: <code>: <message>
 * and maps the category to its exit status (1 input, 2 assumption, 3 numeric). */

class error : public std::runtime_error {
public:
    error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// ---- bad input: grammar, config, violated preconditions  (exit 1) ----

class parse_error : public error {
public:
    parse_error(const std::string& msg, std::size_t offset)
        : error("syntax", msg), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class precondition_error : public error {
public:
    explicit precondition_error(const std::string& msg) : error("precondition", msg) {}
};

class kernel_error : public error {     // degenerate_kernel | non_positive_integral
public:
    using error::error;
};

// ---- assumption checks that cannot pass or cannot decide  (exit 2) ----

class assumption_error : public error {
public:
    explicit assumption_error(const std::string& msg) : error("assumption", msg) {}
};

// Positivity certification hit the subdivision width floor with the minimum
// still straddling zero: neither verdict is safe to report.
class inconclusive_error : public error {
public:
    inconclusive_error(const std::string& msg, double lower, double upper)
        : error("inconclusive", msg), lower_(lower), upper_(upper) {}
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_, upper_;
};

// ---- numerical failures  (exit 3) ----

class numeric_error : public error {
public:
    using error::error;
};

class exponent_overflow : public numeric_error {
public:
    explicit exponent_overflow(const std::string& msg)
        : numeric_error("exponent_overflow", msg) {}
};

class non_positive_lambda : public numeric_error {
public:
    non_positive_lambda(const std::string& msg, int p)
        : numeric_error("non_positive_lambda", msg), p_(p) {}
    int p() const noexcept { return p_; }

private:
    int p_;
};

class no_convergence : public numeric_error {
public:
    no_convergence(const std::string& msg, std::vector<std::complex<double>> partial)
        : numeric_error("no_convergence", msg), partial_(std::move(partial)) {}
    const std::vector<std::complex<double>>& partial() const noexcept { return partial_; }

private:
    std::vector<std::complex<double>> partial_;
};

class degenerate_fit : public numeric_error {
public:
    explicit degenerate_fit(const std::string& msg)
        : numeric_error("degenerate_fit", msg) {}
};

}  // namespace separatrix
