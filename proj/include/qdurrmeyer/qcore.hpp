#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qdurrmeyer/context.hpp"
#include "qdurrmeyer/polynomial.hpp"
#include "qdurrmeyer/scalar.hpp"

namespace qd {

enum class Builtin { Exp, Sin, SqrtShift, AbsShift, ReciprocalShift };

inline const char* to_string(Builtin b) {
    switch (b) {
    case Builtin::Exp: return "exp";
    case Builtin::Sin: return "sin";
    case Builtin::SqrtShift: return "sqrt-shift";
    case Builtin::AbsShift: return "abs-shift";
    case Builtin::ReciprocalShift: return "reciprocal-shift";
    }
    return "?";
}

/// A bounded function on [0,1]: an exact polynomial, a named transcendental
/// builtin, or a piecewise-linear table.
///
/// Builtins and tables evaluate on the Float backend only. A function may carry
/// an affine argument map t -> a t + b (used by the Stancu operator); for
/// polynomials the map is expanded into the coefficients instead.
class FunctionSpec {
public:
    enum class Kind { Polynomial, Builtin, Tabulated };

    static FunctionSpec polynomial(Polynomial p) {
        FunctionSpec f(Kind::Polynomial);
        f.poly_ = std::move(p);
        return f;
    }
    /// sqrt-shift is sqrt(1+t), abs-shift is |t - 1/2|, reciprocal-shift is 1/(1+t).
    static FunctionSpec builtin(Builtin b) {
        FunctionSpec f(Kind::Builtin);
        f.builtin_ = b;
        return f;
    }
    /// Knots (t_i, y_i) sorted by t, covering [0,1]; linear in between.
    static FunctionSpec tabulated(std::vector<std::pair<double, double>> knots) {
        if (knots.size() < 2) throw domain_error("tabulated function needs at least two knots");
        std::sort(knots.begin(), knots.end());
        if (knots.front().first > 0.0 || knots.back().first < 1.0)
            throw domain_error("tabulated knots must cover [0,1]");
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (knots[i].first == knots[i - 1].first) throw domain_error("duplicate tabulated knot");
        FunctionSpec f(Kind::Tabulated);
        f.knots_ = std::move(knots);
        return f;
    }

    Kind kind() const { return kind_; }
    bool is_polynomial() const { return kind_ == Kind::Polynomial; }
    /// The polynomial, or nullptr for other kinds.
    const Polynomial* as_polynomial() const { return is_polynomial() ? &poly_ : nullptr; }

    Scalar operator()(const Scalar& t) const {
        if (is_polynomial()) return poly_(t);
        if (t.is_exact()) throw backend_mismatch("non-polynomial function evaluated on the exact backend");
        return Scalar(eval_double(map_argument(t.as_float())));
    }

    /// f(a t + b).
    FunctionSpec with_affine_argument(const Scalar& a, const Scalar& b) const {
        if (is_polynomial()) return polynomial(poly_compose_affine(poly_, a, b));
        FunctionSpec f = *this;
        // f(a0 (a t + b) + b0) = f(a0 a t + a0 b + b0)
        double a0 = scale_, b0 = shift_;
        f.scale_ = a0 * a.to_double();
        f.shift_ = a0 * b.to_double() + b0;
        return f;
    }

    /// Ordinary derivative f^{(order)}(x), order in {0,1,2}; exact for polynomials.
    Scalar derivative(const Scalar& x, int order) const {
        if (order < 0 || order > 2) throw domain_error("derivative order must be 0, 1 or 2");
        if (is_polynomial()) {
            Polynomial p = poly_;
            for (int i = 0; i < order; ++i) p = poly_derivative(p);
            return p(x);
        }
        if (kind_ == Kind::Tabulated) throw unsupported_error("derivatives of a tabulated function");
        if (x.is_exact()) throw backend_mismatch("builtin derivative on the exact backend");
        double u = map_argument(x.as_float());
        double chain = order == 0 ? 1.0 : order == 1 ? scale_ : scale_ * scale_;
        return Scalar(chain * builtin_derivative(u, order));
    }

    std::string name() const {
        if (is_polynomial()) return "poly" + poly_.str();
        std::string base = kind_ == Kind::Builtin ? to_string(builtin_) : "tabulated";
        if (scale_ != 1.0 || shift_ != 0.0) base += "(affine)";
        return base;
    }

private:
    explicit FunctionSpec(Kind k) : kind_(k) {}

    double map_argument(double t) const { return scale_ * t + shift_; }

    double eval_double(double u) const {
        if (kind_ == Kind::Tabulated) {
            auto it = std::lower_bound(knots_.begin(), knots_.end(), std::make_pair(u, -HUGE_VAL));
            if (it == knots_.begin()) return it->second;
            if (it == knots_.end()) return knots_.back().second;
            auto prev = it - 1;
            double w = (u - prev->first) / (it->first - prev->first);
            return prev->second + w * (it->second - prev->second);
        }
        return builtin_derivative(u, 0);
    }

    double builtin_derivative(double u, int order) const {
        switch (builtin_) {
        case Builtin::Exp: return std::exp(u);
        case Builtin::Sin: return order == 0 ? std::sin(u) : order == 1 ? std::cos(u) : -std::sin(u);
        case Builtin::SqrtShift: {
            double s = std::sqrt(1.0 + u);
            return order == 0 ? s : order == 1 ? 0.5 / s : -0.25 / (s * s * s);
        }
        case Builtin::AbsShift: {
            double d = u - 0.5;
            if (order == 0) return std::abs(d);
            if (d == 0.0) throw domain_error("abs-shift is not differentiable at 1/2");
            return order == 1 ? (d > 0 ? 1.0 : -1.0) : 0.0;
        }
        case Builtin::ReciprocalShift: {
            double v = 1.0 / (1.0 + u);
            return order == 0 ? v : order == 1 ? -v * v : 2.0 * v * v * v;
        }
        }
        return 0.0;
    }

    Kind kind_;
    Polynomial poly_;
    Builtin builtin_ = Builtin::Exp;
    std::vector<std::pair<double, double>> knots_;
    double scale_ = 1.0;
    double shift_ = 0.0;
};

// ---------------------------------------------------------------------------
// q-integers, factorials, binomials

inline Scalar q_integer(int n, const QContext& ctx) {
    if (n < 0) throw domain_error("q_integer: negative n");
    return ctx.q_int(n);
}

inline Scalar q_factorial(int n, const QContext& ctx) {
    if (n < 0) throw domain_error("q_factorial: negative n");
    Scalar r = Scalar::one(ctx.backend());
    for (int i = 2; i <= n; ++i) r *= ctx.q_int(i);
    return r;
}

inline Scalar q_binomial(int n, int k, const QContext& ctx) {
    if (n < 0 || k < 0 || k > n) throw domain_error("q_binomial: need 0 <= k <= n");
    k = std::min(k, n - k);
    Scalar r = Scalar::one(ctx.backend());
    for (int i = 0; i < k; ++i) r *= ctx.q_int(n - i);
    for (int i = 2; i <= k; ++i) r /= ctx.q_int(i);
    return r;
}

/// (1 - x)_q^m = Π_{s=0}^{m-1} (1 - q^s x).
inline Scalar q_pochhammer_one_minus(const Scalar& x, int m, const QContext& ctx) {
    if (m < 0) throw domain_error("q_pochhammer_one_minus: negative m");
    Scalar r = Scalar::one(x.backend());
    for (int s = 0; s < m; ++s) {
        Scalar factor = 1L - ctx.q_pow(s) * x;
        if (factor.is_zero()) return Scalar::zero(x.backend());
        r *= factor;
    }
    return r;
}

/// (1 - x)_q^m as a polynomial in x.
inline Polynomial q_pochhammer_one_minus_poly(int m, const QContext& ctx) {
    Backend b = ctx.backend();
    Polynomial r = Polynomial::constant(Scalar::one(b));
    for (int s = 0; s < m; ++s) r = r * Polynomial{Scalar::one(b), -ctx.q_pow(s)};
    return r;
}

// ---------------------------------------------------------------------------
// q-derivative

/// D_q f(x) for order 1, D_q(D_q f)(x) for order 2.
///
/// Polynomials use D_q X^m = [m]_q X^{m-1} at every x, including 0. Other
/// functions use the difference quotient (f(qx) - f(x)) / ((q - 1) x), which is
/// undefined at the origin.
inline Scalar q_derivative(const FunctionSpec& f, const Scalar& x, const QContext& ctx, int order) {
    if (order != 1 && order != 2) throw domain_error("q_derivative: order must be 1 or 2");
    if (x < 0L || x > 1L) throw domain_error("q_derivative: x outside [0,1]");
    if (const Polynomial* p = f.as_polynomial()) {
        Polynomial d = poly_q_derivative(*p, ctx);
        if (order == 2) d = poly_q_derivative(d, ctx);
        return d(x);
    }
    if (x.is_zero()) throw undefined_at_origin("q_derivative of a non-polynomial function at x = 0");
    const Scalar& q = ctx.q();
    auto first = [&](const Scalar& y) { return (f(q * y) - f(y)) / ((q - 1L) * y); };
    if (order == 1) return first(x);
    return (first(q * x) - first(x)) / ((q - 1L) * x);
}

// ---------------------------------------------------------------------------
// Jackson integral

struct JacksonOptions {
    double tol = 1e-12;
    std::size_t max_terms = 4096;
};

/// (1 - q) Σ_{j>=0} q^j g(q^j) for a callable g on the Float backend.
///
/// Stops at the first node whose weighted magnitude (1-q) q^j max(|g(q^j)|, 1)
/// falls below tol; throws truncation_error if max_terms is reached first.
template <class Fn>
Scalar jackson_series(Fn&& g, const QContext& ctx, JacksonOptions opt = {}) {
    if (ctx.backend() != Backend::Float)
        throw backend_mismatch("Jackson series of a non-polynomial integrand needs the float backend");
    if (!(opt.tol > 0.0)) throw domain_error("Jackson tolerance must be positive");
    const double q = ctx.q().as_float();
    double node = 1.0;
    double sum = 0.0;
    double last = 0.0;
    for (std::size_t j = 0; j < opt.max_terms; ++j) {
        double value = g(Scalar(node)).as_float();
        double term = (1.0 - q) * node * value;
        sum += term;
        last = std::abs(term);
        if ((1.0 - q) * node * std::max(std::abs(value), 1.0) < opt.tol) return Scalar(sum);
        node *= q;
    }
    throw truncation_error("Jackson series did not reach tolerance within " + std::to_string(opt.max_terms) +
                               " terms (last term " + std::to_string(last) + ")",
                           last, opt.max_terms);
}

/// ∫_0^1 f(t) d_q t. Polynomials are integrated exactly via ∫ t^m d_q t = 1/[m+1]_q.
inline Scalar jackson_integral(const FunctionSpec& f, const QContext& ctx, JacksonOptions opt = {}) {
    if (const Polynomial* p = f.as_polynomial()) {
        Scalar acc = Scalar::zero(ctx.backend());
        const auto& c = p->coeffs();
        for (std::size_t m = 0; m < c.size(); ++m) acc += c[m] / ctx.q_int(static_cast<int>(m) + 1);
        return acc;
    }
    return jackson_series([&](const Scalar& t) { return f(t); }, ctx, opt);
}

/// ∫_0^1 t^{a-1} (1 - qt)_q^{b-1} d_q t = [a-1]_q! [b-1]_q! / [a+b-1]_q!.
inline Scalar q_beta(int a, int b, const QContext& ctx) {
    if (a < 1 || b < 1) throw domain_error("q_beta: need a >= 1 and b >= 1");
    // [a-1]! / [a+b-1]! = 1 / ([a][a+1]...[a+b-1])
    Scalar r = q_factorial(b - 1, ctx);
    for (int i = a; i <= a + b - 1; ++i) r /= ctx.q_int(i);
    return r;
}

} // namespace qd
