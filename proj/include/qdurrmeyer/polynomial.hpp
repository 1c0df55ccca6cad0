#pragma once

#include <algorithm>
#include <climits>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "qdurrmeyer/context.hpp"
#include "qdurrmeyer/scalar.hpp"

namespace qd {

/// Dense univariate polynomial over Scalar; coeffs()[i] multiplies X^i.
///
/// Always normalized: trailing coefficients equal to zero are stripped, so the
/// zero polynomial has no coefficients. Nonzero float coefficients are kept no
/// matter how small.
class Polynomial {
public:
    static constexpr int neg_infinity = INT_MIN;

    Polynomial() = default;
    explicit Polynomial(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { normalize(); }
    Polynomial(std::initializer_list<Scalar> coeffs) : c_(coeffs) { normalize(); }

    static Polynomial constant(const Scalar& c) { return Polynomial(std::vector<Scalar>{c}); }
    /// X^m with coefficient one in backend b.
    static Polynomial monomial(int m, Backend b) {
        std::vector<Scalar> c(m + 1, Scalar::zero(b));
        c[m] = Scalar::one(b);
        return Polynomial(std::move(c));
    }

    /// Degree, or neg_infinity for the zero polynomial.
    int degree() const { return c_.empty() ? neg_infinity : static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Scalar>& coeffs() const { return c_; }
    /// Coefficient of X^i (zero beyond the degree; backend follows the polynomial).
    Scalar coeff(int i) const {
        if (i >= 0 && i < static_cast<int>(c_.size())) return c_[i];
        return Scalar::zero(backend().value_or(Backend::Exact));
    }
    /// Backend of the coefficients; none for the zero polynomial.
    std::optional<Backend> backend() const {
        if (c_.empty()) return std::nullopt;
        return c_.front().backend();
    }

    Scalar operator()(const Scalar& x) const {
        Scalar acc = Scalar::zero(x.backend());
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc *= x;
            acc += *it;
        }
        return acc;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), Scalar::zero(*o.backend()));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        normalize();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
    Polynomial& operator*=(const Scalar& s) {
        for (auto& c : c_) c *= s;
        normalize();
        return *this;
    }
    Polynomial& operator/=(const Scalar& s) {
        for (auto& c : c_) c /= s;
        return *this;
    }

    Polynomial operator-() const {
        Polynomial r = *this;
        for (auto& c : r.c_) c = -c;
        return r;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Scalar& s) { return a *= s; }
    friend Polynomial operator*(const Scalar& s, Polynomial a) { return a *= s; }
    friend Polynomial operator/(Polynomial a, const Scalar& s) { return a /= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1, Scalar::zero(*a.backend()));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Polynomial(std::move(r));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }

    /// Coefficient list "[c0, c1, ...]", lowest degree first.
    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i) s += ", ";
            s += c_[i].str();
        }
        return s + "]";
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
        if (c_.size() > 1) {
            Backend b = c_.front().backend();
            for (const auto& c : c_)
                if (c.backend() != b) throw backend_mismatch("mixed backends in polynomial coefficients");
        }
    }

    std::vector<Scalar> c_;
};

enum class PolyOp { Add, Sub, Mul };

inline Polynomial poly_arith(const Polynomial& a, const Polynomial& b, PolyOp op) {
    switch (op) {
    case PolyOp::Add: return a + b;
    case PolyOp::Sub: return a - b;
    case PolyOp::Mul: return a * b;
    }
    return {};
}

inline Scalar poly_eval(const Polynomial& p, const Scalar& x) { return p(x); }

/// D_q by the coefficient rule D_q X^m = [m]_q X^{m-1}.
inline Polynomial poly_q_derivative(const Polynomial& p, const QContext& ctx) {
    if (p.degree() <= 0) return {};
    std::vector<Scalar> r;
    r.reserve(p.coeffs().size() - 1);
    for (int m = 1; m <= p.degree(); ++m) r.push_back(ctx.q_int(m) * p.coeffs()[m]);
    return Polynomial(std::move(r));
}

/// Ordinary derivative (the q = 1 limit of poly_q_derivative).
inline Polynomial poly_derivative(const Polynomial& p) {
    if (p.degree() <= 0) return {};
    std::vector<Scalar> r;
    for (int m = 1; m <= p.degree(); ++m) r.push_back(p.coeffs()[m] * static_cast<long>(m));
    return Polynomial(std::move(r));
}

/// p(a X + b), expanded with Horner's scheme over the affine factor.
inline Polynomial poly_compose_affine(const Polynomial& p, const Scalar& a, const Scalar& b) {
    if (p.is_zero()) return {};
    Polynomial lin{b, a};
    Polynomial acc;
    const auto& c = p.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * lin + Polynomial::constant(*it);
    return acc;
}

/// Σ_j c_j(x) t^j with x-polynomial coefficients; t_coeffs[j] is c_j.
struct BivariateExpansion {
    std::vector<Polynomial> t_coeffs;

    int t_degree() const { return static_cast<int>(t_coeffs.size()) - 1; }
    const Polynomial& coeff(int j) const { return t_coeffs.at(j); }

    Scalar operator()(const Scalar& t, const Scalar& x) const {
        Scalar acc = Scalar::zero(t.backend());
        for (auto it = t_coeffs.rbegin(); it != t_coeffs.rend(); ++it) {
            acc *= t;
            acc += (*it)(x);
        }
        return acc;
    }
};

} // namespace qd
