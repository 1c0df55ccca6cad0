#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qdurrmeyer/context.hpp"
#include "qdurrmeyer/polynomial.hpp"
#include "qdurrmeyer/qcore.hpp"

namespace qd {

struct Plain {};
struct Stancu {
    Scalar alpha;
    Scalar beta;
};
struct Classical {};

using Variant = std::variant<Plain, Stancu, Classical>;

/// Degree n, the q context and which of the three operators is meant.
class OperatorSpec {
public:
    static OperatorSpec plain(int n, QContext ctx) { return OperatorSpec(n, std::move(ctx), Plain{}); }

    /// Requires 0 <= alpha <= beta.
    static OperatorSpec stancu(int n, QContext ctx, Scalar alpha, Scalar beta) {
        if (alpha < 0L || alpha > beta)
            throw domain_error("Stancu parameters must satisfy 0 <= alpha <= beta");
        if (alpha.backend() != ctx.backend() || beta.backend() != ctx.backend())
            throw backend_mismatch("Stancu parameters must share the context backend");
        return OperatorSpec(n, std::move(ctx), Stancu{std::move(alpha), std::move(beta)});
    }

    static OperatorSpec classical(int n, Backend b = Backend::Exact) {
        return OperatorSpec(n, QContext::classical(b, n + 8), Classical{});
    }

    /// Stancu with the given parameters, or Plain for Variant=Plain.
    static OperatorSpec make(int n, QContext ctx, const Variant& v) {
        if (auto* s = std::get_if<Stancu>(&v)) return stancu(n, std::move(ctx), s->alpha, s->beta);
        if (std::holds_alternative<Classical>(v)) return classical(n, ctx.backend());
        return plain(n, std::move(ctx));
    }

    int n() const { return n_; }
    const QContext& ctx() const { return ctx_; }
    const Variant& variant() const { return variant_; }
    Backend backend() const { return ctx_.backend(); }
    bool is_plain() const { return std::holds_alternative<Plain>(variant_); }
    bool is_stancu() const { return std::holds_alternative<Stancu>(variant_); }
    bool is_classical() const { return std::holds_alternative<Classical>(variant_); }
    const Stancu& stancu_params() const { return std::get<Stancu>(variant_); }

    OperatorSpec as_plain() const { return OperatorSpec(n_, ctx_, Plain{}); }

private:
    OperatorSpec(int n, QContext ctx, Variant v) : n_(n), ctx_(std::move(ctx)), variant_(std::move(v)) {
        if (n < 1) throw domain_error("operator degree n must be positive");
        bool classical = std::holds_alternative<Classical>(variant_);
        if (classical != ctx_.is_classical())
            throw domain_error(classical ? "classical operator needs the q = 1 context"
                                         : "q-operators need 0 < q < 1");
    }

    int n_;
    QContext ctx_;
    Variant variant_;
};

namespace detail {

inline void check_unit_interval(const Scalar& x) {
    if (x < 0L || x > 1L) throw domain_error("x = " + x.str() + " outside [0,1]");
}

inline void check_k(const OperatorSpec& spec, int k) {
    if (k < 0 || k > spec.n()) throw domain_error("basis index k out of range");
}

/// Ordinary binomial coefficient as a Scalar.
inline Scalar binomial(int n, int k, Backend b) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), n, k);
    if (b == Backend::Exact) return Scalar(Rational(c));
    return Scalar(c.get_d());
}

inline Scalar factorial(int n, Backend b) {
    mpz_class c;
    mpz_fac_ui(c.get_mpz_t(), n);
    if (b == Backend::Exact) return Scalar(Rational(c));
    return Scalar(c.get_d());
}

/// p_nk(q;x) as a polynomial in x (classical basis when the context is classical).
inline Polynomial basis_polynomial(const OperatorSpec& spec, int k) {
    const QContext& ctx = spec.ctx();
    Backend b = ctx.backend();
    Scalar coeff = spec.is_classical() ? binomial(spec.n(), k, b) : q_binomial(spec.n(), k, ctx);
    Polynomial p = Polynomial::monomial(k, b) * coeff;
    return p * q_pochhammer_one_minus_poly(spec.n() - k, ctx);
}

} // namespace detail

/// p_nk(q;x) = [n k]_q x^k (1-x)_q^{n-k}; the ordinary Bernstein basis for Classical.
inline Scalar bernstein_basis(const OperatorSpec& spec, int k, const Scalar& x) {
    detail::check_k(spec, k);
    detail::check_unit_interval(x);
    const QContext& ctx = spec.ctx();
    Scalar coeff = spec.is_classical() ? detail::binomial(spec.n(), k, x.backend())
                                       : q_binomial(spec.n(), k, ctx);
    return coeff * pow(x, k) * q_pochhammer_one_minus(x, spec.n() - k, ctx);
}

/// ∫_0^1 p_nk(q; qt) d_q t, computed through q_beta; equals q^k / [n+1]_q.
inline Scalar kernel_mass(const OperatorSpec& spec, int k) {
    detail::check_k(spec, k);
    if (spec.is_classical()) throw unsupported_error("kernel_mass: use the classical evaluator");
    const QContext& ctx = spec.ctx();
    // p_nk(q; qt) = [n k]_q q^k t^k (1 - qt)_q^{n-k}
    return q_binomial(spec.n(), k, ctx) * ctx.q_pow(k) * q_beta(k + 1, spec.n() - k + 1, ctx);
}

/// Exact image D_{n,q}(p; x) as a polynomial in x, through the kernel sum.
///
/// The weight q^{-k} cancels against the q^k of p_nk(q; qt), leaving
/// [n+1]_q [n k]_q Σ_m p_m B_q(k+m+1, n-k+1) per basis function.
inline Polynomial durrmeyer_apply_poly(const OperatorSpec& spec, const Polynomial& p) {
    if (!spec.is_plain()) throw unsupported_error("durrmeyer_apply_poly needs the Plain variant");
    const QContext& ctx = spec.ctx();
    const int n = spec.n();
    Polynomial out;
    if (p.is_zero()) return out;
    if (p.backend() != ctx.backend()) throw backend_mismatch("polynomial and context backends differ");
    const Scalar scale = ctx.q_int(n + 1);
    for (int k = 0; k <= n; ++k) {
        Scalar inner = Scalar::zero(ctx.backend());
        for (int m = 0; m <= p.degree(); ++m) {
            const Scalar& c = p.coeffs()[m];
            if (c.is_zero()) continue;
            inner += c * q_beta(k + m + 1, n - k + 1, ctx);
        }
        if (inner.is_zero()) continue;
        out += detail::basis_polynomial(spec, k) * (scale * q_binomial(n, k, ctx) * inner);
    }
    return out;
}

/// D_{n,q}(f; x). Polynomials go through the exact path; other functions use a
/// Jackson series per basis function (Float backend).
inline Scalar durrmeyer_apply_fn(const OperatorSpec& spec, const FunctionSpec& f, const Scalar& x,
                                 JacksonOptions opt = {}) {
    if (!spec.is_plain()) throw unsupported_error("durrmeyer_apply_fn needs the Plain variant");
    detail::check_unit_interval(x);
    if (const Polynomial* p = f.as_polynomial()) return durrmeyer_apply_poly(spec, *p)(x);

    const QContext& ctx = spec.ctx();
    const int n = spec.n();
    Scalar acc = Scalar::zero(x.backend());
    for (int k = 0; k <= n; ++k) {
        Scalar basis = bernstein_basis(spec, k, x);
        if (basis.is_zero()) continue;
        Scalar binom = q_binomial(n, k, ctx);
        // q^{-k} p_nk(q; qt) = [n k]_q t^k Π_{s=1}^{n-k} (1 - q^s t)
        auto integrand = [&](const Scalar& t) {
            Scalar v = f(t) * binom * pow(t, k);
            for (int s = 1; s <= n - k; ++s) v *= 1L - ctx.q_pow(s) * t;
            return v;
        };
        try {
            acc += basis * jackson_series(integrand, ctx, opt);
        } catch (const truncation_error& e) {
            throw truncation_error(std::string(e.what()) + " in kernel k = " + std::to_string(k), e.last_term(),
                                   e.terms(), k);
        }
    }
    return acc * ctx.q_int(n + 1);
}

namespace detail {

/// t -> ([n]_q t + alpha) / ([n]_q + beta).
inline std::pair<Scalar, Scalar> stancu_map(const OperatorSpec& spec) {
    const auto& s = spec.stancu_params();
    Scalar nq = spec.ctx().q_int(spec.n());
    Scalar den = nq + s.beta;
    return {nq / den, s.alpha / den};
}

} // namespace detail

/// D^{α,β}_{n,q}(p) as a polynomial in x: compose with the Stancu map, then apply D_{n,q}.
inline Polynomial stancu_apply(const OperatorSpec& spec, const Polynomial& p) {
    if (!spec.is_stancu()) throw unsupported_error("stancu_apply needs the Stancu variant");
    auto [a, b] = detail::stancu_map(spec);
    return durrmeyer_apply_poly(spec.as_plain(), poly_compose_affine(p, a, b));
}

/// D^{α,β}_{n,q}(f; x).
inline Scalar stancu_apply(const OperatorSpec& spec, const FunctionSpec& f, const Scalar& x,
                           JacksonOptions opt = {}) {
    if (!spec.is_stancu()) throw unsupported_error("stancu_apply needs the Stancu variant");
    auto [a, b] = detail::stancu_map(spec);
    return durrmeyer_apply_fn(spec.as_plain(), f.with_affine_argument(a, b), x, opt);
}

/// Classical Durrmeyer image (n+1) Σ_k p_nk(x) ∫_0^1 p_nk(t) p(t) dt, exactly,
/// using ∫ t^a (1-t)^b dt = a! b! / (a+b+1)!.
inline Polynomial classical_durrmeyer_apply(const OperatorSpec& spec, const Polynomial& p) {
    if (!spec.is_classical()) throw unsupported_error("classical_durrmeyer_apply needs the Classical variant");
    const int n = spec.n();
    const Backend b = spec.backend();
    Polynomial out;
    if (p.is_zero()) return out;
    if (p.backend() != b) throw backend_mismatch("polynomial and context backends differ");
    for (int k = 0; k <= n; ++k) {
        Scalar inner = Scalar::zero(b);
        for (int m = 0; m <= p.degree(); ++m) {
            const Scalar& c = p.coeffs()[m];
            if (c.is_zero()) continue;
            inner += c * detail::factorial(k + m, b) * detail::factorial(n - k, b) /
                     detail::factorial(n + m + 1, b);
        }
        out += detail::basis_polynomial(spec, k) * (detail::binomial(n, k, b) * inner);
    }
    return out * Scalar::integer(n + 1, b);
}

} // namespace qd
