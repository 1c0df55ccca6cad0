#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qd {

/// Argument outside the mathematical domain of an operation (negative n, k > n, q not in (0,1), ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// An Exact and a Float value met in one expression.
struct backend_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested route or variant is not provided by the operation.
struct unsupported_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// q-derivative of a non-polynomial function requested at x = 0.
struct undefined_at_origin : domain_error {
    using domain_error::domain_error;
};

/// q-Taylor remainder evaluated at t = q x, where (t - x)_q^2 vanishes.
struct singular_point_error : domain_error {
    using domain_error::domain_error;
};

/// Jackson series hit max_terms before the truncation tolerance.
class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& what, double last_term, std::size_t terms,
                     std::optional<int> k = std::nullopt)
        : std::runtime_error(what), last_term_(last_term), terms_(terms), k_(k) {}

    double last_term() const { return last_term_; }
    std::size_t terms() const { return terms_; }
    /// Basis index of the kernel integral that failed, when raised from an operator.
    std::optional<int> k() const { return k_; }

private:
    double last_term_;
    std::size_t terms_;
    std::optional<int> k_;
};

} // namespace qd
