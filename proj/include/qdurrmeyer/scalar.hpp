#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include <gmpxx.h>

#include "qdurrmeyer/errors.hpp"

namespace qd {

using Rational = mpq_class;

enum class Backend { Exact, Float };

inline const char* to_string(Backend b) { return b == Backend::Exact ? "exact" : "float"; }

/// A number carried either as an exact rational or as a binary double.
///
/// Arithmetic never coerces between the two representations: combining an
/// Exact and a Float operand throws backend_mismatch. Plain integers are
/// promoted into the backend of the Scalar they are combined with.
class Scalar {
public:
    Scalar() : value_(Rational(0)) {}
    Scalar(Rational r) : value_(std::move(r)) { std::get<Rational>(value_).canonicalize(); }
    explicit Scalar(double d) : value_(d) {}

    static Scalar exact(long num, long den = 1) {
        if (den == 0) throw domain_error("zero denominator");
        return Scalar(Rational(num, den));
    }
    static Scalar real(double d) { return Scalar(d); }
    static Scalar integer(long v, Backend b) {
        return b == Backend::Exact ? Scalar(Rational(v)) : Scalar(static_cast<double>(v));
    }
    static Scalar zero(Backend b) { return integer(0, b); }
    static Scalar one(Backend b) { return integer(1, b); }

    Backend backend() const { return value_.index() == 0 ? Backend::Exact : Backend::Float; }
    bool is_exact() const { return backend() == Backend::Exact; }

    const Rational& rational() const {
        if (!is_exact()) throw backend_mismatch("rational() on a float scalar");
        return std::get<Rational>(value_);
    }
    double as_float() const {
        if (is_exact()) throw backend_mismatch("as_float() on an exact scalar");
        return std::get<double>(value_);
    }
    /// Lossy view for reporting; never used inside exact computations.
    double to_double() const {
        return is_exact() ? std::get<Rational>(value_).get_d() : std::get<double>(value_);
    }

    bool is_zero() const {
        return is_exact() ? sgn(std::get<Rational>(value_)) == 0 : std::get<double>(value_) == 0.0;
    }
    int sign() const {
        if (is_exact()) return sgn(std::get<Rational>(value_));
        double d = std::get<double>(value_);
        return (d > 0) - (d < 0);
    }

    /// "p/q" for exact values, shortest round-trip decimal for floats.
    std::string str() const {
        if (is_exact()) {
            const auto& r = std::get<Rational>(value_);
            return r.get_num().get_str() + "/" + r.get_den().get_str();
        }
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(value_));
        return std::string(buf, res.ptr);
    }

    Scalar& operator+=(const Scalar& o) { return apply(o, [](auto& a, const auto& b) { a += b; }); }
    Scalar& operator-=(const Scalar& o) { return apply(o, [](auto& a, const auto& b) { a -= b; }); }
    Scalar& operator*=(const Scalar& o) { return apply(o, [](auto& a, const auto& b) { a *= b; }); }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) throw domain_error("division by zero");
        return apply(o, [](auto& a, const auto& b) { a /= b; });
    }

    Scalar& operator+=(long v) { return *this += integer(v, backend()); }
    Scalar& operator-=(long v) { return *this -= integer(v, backend()); }
    Scalar& operator*=(long v) { return *this *= integer(v, backend()); }
    Scalar& operator/=(long v) { return *this /= integer(v, backend()); }

    Scalar operator-() const {
        Scalar r = *this;
        std::visit([](auto& a) { a = -a; }, r.value_);
        return r;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend Scalar operator+(Scalar a, long b) { return a += b; }
    friend Scalar operator-(Scalar a, long b) { return a -= b; }
    friend Scalar operator*(Scalar a, long b) { return a *= b; }
    friend Scalar operator/(Scalar a, long b) { return a /= b; }
    friend Scalar operator+(long a, const Scalar& b) { return integer(a, b.backend()) + b; }
    friend Scalar operator-(long a, const Scalar& b) { return integer(a, b.backend()) - b; }
    friend Scalar operator*(long a, const Scalar& b) { return integer(a, b.backend()) * b; }
    friend Scalar operator/(long a, const Scalar& b) { return integer(a, b.backend()) / b; }

    /// Exact equality on the Exact backend, bitwise value equality on Float.
    friend bool operator==(const Scalar& a, const Scalar& b) {
        check_same(a, b);
        return a.value_ == b.value_;
    }
    friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b) {
        check_same(a, b);
        if (a.is_exact()) {
            int c = cmp(std::get<Rational>(a.value_), std::get<Rational>(b.value_));
            return c < 0 ? std::partial_ordering::less
                 : c > 0 ? std::partial_ordering::greater
                         : std::partial_ordering::equivalent;
        }
        return std::get<double>(a.value_) <=> std::get<double>(b.value_);
    }
    friend bool operator==(const Scalar& a, long b) { return a == integer(b, a.backend()); }
    friend std::partial_ordering operator<=>(const Scalar& a, long b) {
        return a <=> integer(b, a.backend());
    }

    friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

private:
    static void check_same(const Scalar& a, const Scalar& b) {
        if (a.backend() != b.backend())
            throw backend_mismatch(std::string("cannot combine ") + to_string(a.backend()) +
                                   " and " + to_string(b.backend()) + " scalars");
    }

    template <class Op>
    Scalar& apply(const Scalar& o, Op op) {
        check_same(*this, o);
        if (is_exact()) {
            auto& a = std::get<Rational>(value_);
            op(a, std::get<Rational>(o.value_));
            a.canonicalize();
        } else {
            op(std::get<double>(value_), std::get<double>(o.value_));
        }
        return *this;
    }

    std::variant<Rational, double> value_;
};

inline Scalar abs(const Scalar& s) { return s.sign() < 0 ? -s : s; }

/// Integer power with exponent >= 0.
inline Scalar pow(const Scalar& base, unsigned long e) {
    if (base.is_exact()) {
        const Rational& r = base.rational();
        mpz_class num, den;
        mpz_pow_ui(num.get_mpz_t(), r.get_num_mpz_t(), e);
        mpz_pow_ui(den.get_mpz_t(), r.get_den_mpz_t(), e);
        return Scalar(Rational(num, den));
    }
    return Scalar(std::pow(base.as_float(), static_cast<double>(e)));
}

/// Parses "p/q", "p", or a decimal literal such as "0.3" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    auto dot = text.find('.');
    if (dot == std::string::npos && text.find_first_of("eE") == std::string::npos) {
        Rational r;
        if (r.set_str(text, 10) != 0 || text.empty()) throw domain_error("not a rational: " + text);
        if (r.get_den() == 0) throw domain_error("zero denominator: " + text);
        r.canonicalize();
        return r;
    }
    if (text.find_first_of("eE/") != std::string::npos)
        throw domain_error("unsupported rational literal: " + text);
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    if (digits.empty() || digits == "-" || digits == "+") throw domain_error("not a rational: " + text);
    if (digits.front() == '+') digits.erase(0, 1);
    mpz_class num;
    if (num.set_str(digits, 10) != 0) throw domain_error("not a rational: " + text);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - dot - 1);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

} // namespace qd
