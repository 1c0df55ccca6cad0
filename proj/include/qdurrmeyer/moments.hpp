#pragma once

#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "qdurrmeyer/operators.hpp"
#include "qdurrmeyer/polynomial.hpp"
#include "qdurrmeyer/qcore.hpp"

namespace qd {

enum class MomentRoute { Closed, ProductForm, Recurrence, BruteForce, StancuRecursion };

inline const char* to_string(MomentRoute r) {
    switch (r) {
    case MomentRoute::Closed: return "closed";
    case MomentRoute::ProductForm: return "product-form";
    case MomentRoute::Recurrence: return "recurrence";
    case MomentRoute::BruteForce: return "brute";
    case MomentRoute::StancuRecursion: return "stancu-recursion";
    }
    return "?";
}

struct MomentReport {
    int n = 0;
    int m = 0;
    MomentRoute route = MomentRoute::BruteForce;
    Polynomial value;
};

/// Where raw moments feeding a derived quantity come from.
enum class RawSource { BruteForce, Recurrence };

namespace detail {

/// Helpers for transcribing closed forms written in q-integers of n.
struct QTerms {
    const QContext& ctx;
    int n;

    Backend backend() const { return ctx.backend(); }
    Scalar one() const { return Scalar::one(backend()); }
    Scalar q() const { return ctx.q(); }
    Scalar qp(int i) const { return ctx.q_pow(i); }
    /// [i]_q
    Scalar Q(int i) const { return ctx.q_int(i); }
    /// [n+j]_q, j >= -n
    Scalar N(int j) const { return ctx.q_int(n + j); }
    /// [n]_q [n-1]_q ... [n-len+1]_q, zero when the product reaches [0]_q.
    Scalar falling(int len) const {
        Scalar r = one();
        for (int i = 0; i < len; ++i) {
            if (n - i <= 0) return Scalar::zero(backend());
            r *= ctx.q_int(n - i);
        }
        return r;
    }
    /// Σ_i c_i q^i for small integer coefficients.
    Scalar qpoly(std::initializer_list<long> c) const {
        Scalar acc = Scalar::zero(backend());
        int i = 0;
        for (long v : c) acc += qp(i++) * v;
        return acc;
    }
    Polynomial poly(std::initializer_list<Scalar> c) const { return Polynomial(c); }
};

} // namespace detail

/// D_{n,q}(t^m; x) by the kernel sum with exact q-Beta integrals. The oracle for every other route.
inline Polynomial raw_moment_brute(int n, int m, const QContext& ctx) {
    if (m < 0) throw domain_error("moment order must be nonnegative");
    return durrmeyer_apply_poly(OperatorSpec::plain(n, ctx), Polynomial::monomial(m, ctx.backend()));
}

/// The raw-moment closed forms for m = 0..4 exactly as printed.
///
/// The printed forms for m >= 2 do not agree with the kernel sum (see
/// audit_raw_closed); raw_moment_product_form is the corrected closed form.
inline Polynomial raw_moment_closed(int n, int m, const QContext& ctx) {
    if (n < 1) throw domain_error("n must be positive");
    detail::QTerms T{ctx, n};
    const Scalar q = T.q();
    switch (m) {
    case 0: return Polynomial::constant(T.one());
    case 1: return T.poly({T.one(), q * T.N(0)}) / T.N(2);
    case 2: {
        Scalar c2 = T.qp(3) * T.falling(2);
        Scalar c1 = pow(1L + q, 2) * q * T.N(0);
        Scalar c0 = 1L + q;
        return T.poly({c0, c1, c2}) / (T.N(3) * T.N(2));
    }
    case 3: {
        Scalar c3 = T.qp(8) * T.falling(3);
        Scalar c2 = T.qp(3) * T.falling(2) * T.qpoly({1, 1, 2, 3, 2});
        Scalar c1 = q * T.Q(2) * T.N(0) * T.qpoly({1, 2, 3, 2, 1});
        Scalar c0 = T.Q(3) * T.Q(2);
        return T.poly({c0, c1, c2, c3}) / (T.N(4) * T.N(3) * T.N(2));
    }
    case 4: {
        Scalar c4 = T.qp(15) * T.falling(4);
        Scalar c3 = T.qp(8) * T.falling(3) * T.qpoly({1, 2, 2, 3, 4, 3, 1});
        Scalar c2 = T.qp(3) * T.falling(2) * T.qpoly({1, 2, 4, 8, 12, 14, 13, 10, 6, 2});
        Scalar c1 = q * T.Q(2) * T.N(0) * T.qpoly({1, 3, 6, 9, 10, 9, 6, 3, 1});
        Scalar c0 = T.Q(4) * T.Q(3) * T.Q(2);
        return T.poly({c0, c1, c2, c3, c4}) / (T.N(5) * T.N(4) * T.N(3) * T.N(2));
    }
    default: throw unsupported_error("raw_moment_closed covers m = 0..4; use the recurrence route");
    }
}

/// Closed form valid for every m:
/// D_{n,q}(t^m; x) = Σ_j q^{j²} [m j]_q ([m]_q!/[j]_q!) [n]_q⋯[n-j+1]_q x^j / Π_{i=2}^{m+1} [n+i]_q.
inline Polynomial raw_moment_product_form(int n, int m, const QContext& ctx) {
    if (n < 1) throw domain_error("n must be positive");
    if (m < 0) throw domain_error("moment order must be nonnegative");
    detail::QTerms T{ctx, n};
    std::vector<Scalar> c;
    c.reserve(m + 1);
    Scalar mfact_over_jfact = q_factorial(m, ctx);
    for (int j = 0; j <= m; ++j) {
        if (j > 0) mfact_over_jfact /= ctx.q_int(j);
        c.push_back(T.qp(j * j) * q_binomial(m, j, ctx) * mfact_over_jfact * T.falling(j));
    }
    Scalar den = T.one();
    for (int i = 2; i <= m + 1; ++i) den *= T.N(i);
    return Polynomial(std::move(c)) / den;
}

/// Moments D_{n,q}(t^m; x), m = 0..m_max, by the three-term recurrence
/// [n+m+2]_q D_{m+1} = ([m+1]_q + q^{m+1} [n]_q x) D_m + q^{m+1} x(1-x) D_q D_m.
///
/// A step m -> m+1 is taken only when n > m+2; from the first step outside
/// that range on, entries come from raw_moment_brute and are marked as such.
inline std::vector<MomentReport> raw_moment_recurrence(int n, int m_max, const QContext& ctx) {
    if (n < 1) throw domain_error("n must be positive");
    if (m_max < 0) throw domain_error("m_max must be nonnegative");
    const Backend b = ctx.backend();
    std::vector<MomentReport> out;
    out.push_back({n, 0, MomentRoute::Recurrence, Polynomial::constant(Scalar::one(b))});
    const Polynomial x_one_minus_x{Scalar::zero(b), Scalar::one(b), -Scalar::one(b)};
    for (int m = 0; m < m_max; ++m) {
        if (!(n > m + 2)) {
            out.push_back({n, m + 1, MomentRoute::BruteForce, raw_moment_brute(n, m + 1, ctx)});
            continue;
        }
        const Polynomial& d = out.back().value;
        Scalar qm1 = ctx.q_pow(m + 1);
        Polynomial lead{ctx.q_int(m + 1), qm1 * ctx.q_int(n)};
        Polynomial next = lead * d + x_one_minus_x * poly_q_derivative(d, ctx) * qm1;
        out.push_back({n, m + 1, MomentRoute::Recurrence, next / ctx.q_int(n + m + 2)});
    }
    return out;
}

/// Raw moments 0..m_max from the chosen source.
inline std::vector<Polynomial> raw_moments(int n, int m_max, const QContext& ctx, RawSource src) {
    std::vector<Polynomial> out;
    if (src == RawSource::Recurrence) {
        for (auto& r : raw_moment_recurrence(n, m_max, ctx)) out.push_back(std::move(r.value));
    } else {
        for (int m = 0; m <= m_max; ++m) out.push_back(raw_moment_brute(n, m, ctx));
    }
    return out;
}

/// Memo of recurrence-route raw moments keyed by (context identity, n).
///
/// Entries hold a copy of their context so an identity can never be reused by
/// a different q while cached. Safe for concurrent use; published vectors are
/// never modified.
class MomentCache {
public:
    std::vector<Polynomial> raw(int n, int m_max, const QContext& ctx) {
        std::lock_guard lock(mu_);
        auto key = std::make_pair(ctx.id(), n);
        auto it = entries_.find(key);
        if (it != entries_.end() && static_cast<int>(it->second.moments.size()) > m_max) {
            return {it->second.moments.begin(), it->second.moments.begin() + m_max + 1};
        }
        Entry e{ctx, raw_moments(n, m_max, ctx, RawSource::Recurrence)};
        auto result = e.moments;
        entries_.insert_or_assign(key, std::move(e));
        return result;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return entries_.size();
    }

private:
    struct Entry {
        QContext ctx;
        std::vector<Polynomial> moments;
    };
    mutable std::mutex mu_;
    std::map<std::pair<std::uintptr_t, int>, Entry> entries_;
};

// ---------------------------------------------------------------------------
// Central moments

/// (t - x)_q^m = Π_{s=0}^{m-1} (t - q^s x) as an expansion in t.
inline BivariateExpansion central_factor_expand(int m, const QContext& ctx) {
    if (m < 0) throw domain_error("m must be nonnegative");
    const Backend b = ctx.backend();
    std::vector<Polynomial> c{Polynomial::constant(Scalar::one(b))};
    for (int s = 0; s < m; ++s) {
        // multiply by (t - q^s x)
        Polynomial minus_qsx{Scalar::zero(b), -ctx.q_pow(s)};
        std::vector<Polynomial> next(c.size() + 1);
        for (std::size_t j = 0; j < c.size(); ++j) {
            next[j + 1] += c[j];
            next[j] += c[j] * minus_qsx;
        }
        c = std::move(next);
    }
    return {std::move(c)};
}

/// The printed expansions of (t-x)_q^m for m = 1..4.
inline BivariateExpansion central_factor_printed(int m, const QContext& ctx) {
    const Backend b = ctx.backend();
    const Scalar z = Scalar::zero(b), one = Scalar::one(b), q = ctx.q();
    auto xpow = [&](int k, const Scalar& c) {
        std::vector<Scalar> v(k + 1, z);
        v[k] = c;
        return Polynomial(std::move(v));
    };
    switch (m) {
    case 1: return {{xpow(1, -one), xpow(0, one)}};
    case 2: return {{xpow(2, q), xpow(1, -ctx.q_int(2)), xpow(0, one)}};
    case 3:
        return {{xpow(3, -ctx.q_pow(3)), xpow(2, q * ctx.q_int(2)), xpow(1, -ctx.q_int(3)), xpow(0, one)}};
    case 4:
        return {{xpow(4, ctx.q_pow(6)), xpow(3, -ctx.q_pow(3) * ctx.q_int(4)),
                 xpow(2, q * (ctx.q_int(5) + ctx.q_pow(2))), xpow(1, -ctx.q_int(4)), xpow(0, one)}};
    default: throw unsupported_error("printed central factors exist for m = 1..4");
    }
}

/// Σ_j c_j(x) · raw[j](x).
inline Polynomial combine_with_raw(const BivariateExpansion& e, const std::vector<Polynomial>& raw) {
    Polynomial acc;
    for (int j = 0; j <= e.t_degree(); ++j) acc += e.coeff(j) * raw.at(j);
    return acc;
}

/// Published closed forms of D_{n,q}((t-x)_q^m; x), m = 1..4, transcribed verbatim.
inline Polynomial central_moment_closed(int n, int m, const QContext& ctx) {
    if (n < 1) throw domain_error("n must be positive");
    detail::QTerms T{ctx, n};
    const Scalar q = T.q(), one = T.one();
    switch (m) {
    case 1: return T.poly({one, -(1L + T.qp(n + 1))}) / T.N(2);
    case 2: {
        Scalar c2 = T.qp(2) * (1L + T.qp(n)) * (T.qp(n + 1) * T.Q(2) - T.N(0));
        Scalar c1 = (1L + q) * (T.qp(2) * T.N(0) - 1L - T.qp(n + 2));
        return T.poly({1L + q, c1, c2}) / (T.N(3) * T.N(2));
    }
    case 3: {
        Scalar D = T.N(2) * T.N(3) * T.N(4);
        Scalar c3 = T.qp(2) * (T.qp(6) * T.falling(3) - q * T.Q(3) * T.falling(2) * T.N(4) +
                               T.N(4) * T.N(3) * T.Q(2) * T.N(0) - q * T.N(4) * T.N(3) * T.N(2));
        Scalar c2 = q * (T.qp(2) * T.falling(2) * T.qpoly({1, 1, 2, 3, 2}) -
                         pow(1L + q, 2) * T.Q(3) * T.N(0) * T.N(4) + T.Q(2) * T.N(4) * T.N(3));
        Scalar c1 = q * T.Q(2) * T.N(0) * T.qpoly({1, 2, 3, 2, 1}) - (1L + q) * T.Q(3) * T.N(4);
        Scalar c0 = T.Q(3) * T.Q(2);
        return T.poly({c0, c1, c2, c3}) / D;
    }
    case 4: {
        Scalar D2 = T.N(3) * T.N(2), D3 = T.N(4) * D2, D4 = T.N(5) * D3;
        Scalar c5 = T.Q(5) + T.qp(2);
        Scalar p7 = T.qpoly({1, 2, 2, 3, 4, 3, 1});
        Scalar p5 = T.qpoly({1, 1, 2, 3, 2});
        Scalar p5b = T.qpoly({1, 2, 3, 2, 1});
        Scalar p10 = T.qpoly({1, 2, 4, 8, 12, 14, 13, 10, 6, 2});
        Scalar p9 = T.qpoly({1, 3, 6, 9, 10, 9, 6, 3, 1});
        Scalar x4 = T.qp(4) * (T.qp(11) * T.falling(4) / D4 - T.qp(4) * T.Q(4) * T.falling(3) / D3 +
                               c5 * T.falling(2) / D2 - T.Q(4) * T.N(0) / T.N(2) + T.qp(2));
        Scalar x3 = T.qp(2) * (T.qp(6) * T.falling(3) * p7 / D4 - q * T.Q(4) * T.falling(2) * p5 / D3 +
                               pow(1L + q, 2) * c5 * T.N(0) / D2 - q * T.Q(4));
        Scalar x2 = T.qp(2) * T.falling(2) * p10 / D4 - T.Q(4) * T.Q(2) * T.N(0) * p5b / D3 + (1L + q) * c5 / D2;
        Scalar x1 = (q * T.Q(2) * T.N(0) * p9 + T.Q(4) * T.Q(3) * T.Q(2) * T.N(5)) / D4;
        Scalar x0 = T.Q(4) * T.Q(3) * T.Q(2) / D4;
        return T.poly({x0, x1, x2, x3, x4});
    }
    default: throw unsupported_error("central_moment_closed covers m = 1..4");
    }
}

enum class CentralRoute { Closed, Expansion };

/// D_{n,q}((t-x)_q^m; x). Expansion combines central_factor_expand with raw moments.
inline Polynomial central_moment(int n, int m, const QContext& ctx, CentralRoute route,
                                 RawSource raw = RawSource::BruteForce) {
    if (route == CentralRoute::Closed) return central_moment_closed(n, m, ctx);
    if (m < 0) throw domain_error("m must be nonnegative");
    return combine_with_raw(central_factor_expand(m, ctx), raw_moments(n, m, ctx, raw));
}

// ---------------------------------------------------------------------------
// Stancu moments

enum class StancuRoute { Closed, Recursion };

/// D^{α,β}_{n,q}(t^m; x).
///
/// Recursion: Σ_j C(m,j) [n]^j α^{m-j} / ([n]+β)^m · D_{n,q}(t^j; x).
/// Closed: the printed forms for m <= 2.
inline Polynomial stancu_moment(int n, int m, const QContext& ctx, const Scalar& alpha, const Scalar& beta,
                                StancuRoute route, RawSource raw = RawSource::BruteForce) {
    if (alpha < 0L || alpha > beta) throw domain_error("Stancu parameters must satisfy 0 <= alpha <= beta");
    if (n < 1) throw domain_error("n must be positive");
    if (m < 0) throw domain_error("moment order must be nonnegative");
    detail::QTerms T{ctx, n};
    const Scalar nq = T.N(0);
    const Scalar nb = nq + beta;
    if (route == StancuRoute::Closed) {
        const Scalar q = T.q();
        switch (m) {
        case 0: return Polynomial::constant(T.one());
        case 1: return T.poly({nq + alpha * T.N(2), q * nq * nq}) / (T.N(2) * nb);
        case 2: {
            Scalar den = nb * nb * T.N(2) * T.N(3);
            Scalar c2 = T.qp(3) * pow(nq, 3) * (nq - 1L);
            Scalar c1 = (q * pow(1L + q, 2) + 2L * alpha * T.qp(4)) * pow(nq, 3) + 2L * alpha * q * T.Q(3) * nq * nq;
            Scalar c0 = ((1L + q + 2L * alpha * T.qp(3)) * nq * nq + 2L * alpha * T.Q(3) * nq) / den +
                        alpha * alpha / (nb * nb);
            return T.poly({c0, c1 / den, c2 / den});
        }
        default: throw unsupported_error("Stancu closed forms cover m <= 2; use the recursion route");
        }
    }
    auto D = raw_moments(n, m, ctx, raw);
    Polynomial acc;
    Scalar nq_pow = T.one();
    for (int j = 0; j <= m; ++j) {
        Scalar w = detail::binomial(m, j, ctx.backend()) * nq_pow * pow(alpha, m - j);
        acc += D[j] * w;
        nq_pow *= nq;
    }
    return acc / pow(nb, m);
}

/// D^{α,β}_{n,q}(t^m; x) evaluated directly as stancu_apply(t^m).
inline Polynomial stancu_moment_direct(int n, int m, const QContext& ctx, const Scalar& alpha, const Scalar& beta) {
    return stancu_apply(OperatorSpec::stancu(n, ctx, alpha, beta), Polynomial::monomial(m, ctx.backend()));
}

enum class StancuCentralRoute { Closed, Recombination };

/// D^{α,β}_{n,q}((t - x)^m; x) with the ordinary power, m in {1, 2}.
inline Polynomial stancu_central_moment(int n, int m, const QContext& ctx, const Scalar& alpha, const Scalar& beta,
                                        StancuCentralRoute route, RawSource raw = RawSource::BruteForce) {
    if (m < 1 || m > 2) throw unsupported_error("stancu_central_moment covers m = 1, 2");
    if (alpha < 0L || alpha > beta) throw domain_error("Stancu parameters must satisfy 0 <= alpha <= beta");
    const Backend b = ctx.backend();
    if (route == StancuCentralRoute::Recombination) {
        Polynomial acc;
        Polynomial minus_x_pow = Polynomial::constant(Scalar::one(b));
        const Polynomial minus_x{Scalar::zero(b), -Scalar::one(b)};
        for (int j = m; j >= 0; --j) {
            acc += stancu_moment(n, j, ctx, alpha, beta, StancuRoute::Recursion, raw) * minus_x_pow *
                   detail::binomial(m, j, b);
            minus_x_pow = minus_x_pow * minus_x;
        }
        return acc;
    }
    detail::QTerms T{ctx, n};
    const Scalar q = T.q(), nq = T.N(0), nb = nq + beta;
    if (m == 1) {
        Scalar c1 = q * nq * nq / (T.N(2) * nb) - 1L;
        Scalar c0 = (nq + alpha * T.N(2)) / (T.N(2) * nb);
        return T.poly({c0, c1});
    }
    Scalar den = nb * nb * T.N(2) * T.N(3);
    Scalar c2 = T.qp(4) * pow(nq, 4) - T.qp(3) * pow(nq, 3) - 2L * q * nq * nq * T.N(3) * nb +
                T.N(2) * T.N(3) * nb * nb;
    Scalar c1 = q * pow(1L + q, 2) * pow(nq, 3) + 2L * q * alpha * nq * nq * T.N(3) -
                (2L * nq + 2L * alpha * T.N(2)) * T.N(3) * nb;
    Scalar c0 = (1L + q) * nq * nq + 2L * alpha * nq * T.N(3);
    return T.poly({c0, c1, c2}) / den;
}

// ---------------------------------------------------------------------------
// Transcription audits

/// Comparison of a printed closed form with an independently computed reference.
struct TranscriptionAudit {
    std::string name;
    int n = 0;
    int m = 0;
    Polynomial printed;
    Polynomial reference;

    bool match() const { return printed == reference; }
    Polynomial difference() const { return printed - reference; }
    const char* status() const { return match() ? "match" : "mismatch-documented"; }
};

inline TranscriptionAudit audit_raw_closed(int n, int m, const QContext& ctx) {
    return {"raw-moment-m" + std::to_string(m) + "-transcription", n, m, raw_moment_closed(n, m, ctx),
            raw_moment_brute(n, m, ctx)};
}

/// Central moment closed form against the expansion route.
inline TranscriptionAudit audit_central_closed(int n, int m, const QContext& ctx) {
    return {"lemma1.1-m" + std::to_string(m) + "-transcription", n, m, central_moment_closed(n, m, ctx),
            central_moment(n, m, ctx, CentralRoute::Expansion)};
}

/// Printed (t-x)_q^m identity against the product expansion, compared per t-power.
struct FactorAudit {
    int m = 0;
    BivariateExpansion printed;
    BivariateExpansion product;

    bool match() const {
        if (printed.t_coeffs.size() != product.t_coeffs.size()) return false;
        for (std::size_t j = 0; j < printed.t_coeffs.size(); ++j)
            if (!(printed.t_coeffs[j] == product.t_coeffs[j])) return false;
        return true;
    }
    /// t-powers whose x-coefficient differs.
    std::vector<int> mismatched_powers() const {
        std::vector<int> out;
        for (std::size_t j = 0; j < std::max(printed.t_coeffs.size(), product.t_coeffs.size()); ++j) {
            Polynomial a = j < printed.t_coeffs.size() ? printed.t_coeffs[j] : Polynomial{};
            Polynomial b = j < product.t_coeffs.size() ? product.t_coeffs[j] : Polynomial{};
            if (!(a == b)) out.push_back(static_cast<int>(j));
        }
        return out;
    }
};

inline FactorAudit audit_central_factor(int m, const QContext& ctx) {
    return {m, central_factor_printed(m, ctx), central_factor_expand(m, ctx)};
}

inline TranscriptionAudit audit_stancu_closed(int n, int m, const QContext& ctx, const Scalar& alpha,
                                              const Scalar& beta) {
    return {"stancu-moment-m" + std::to_string(m) + "-transcription", n, m,
            stancu_moment(n, m, ctx, alpha, beta, StancuRoute::Closed),
            stancu_moment(n, m, ctx, alpha, beta, StancuRoute::Recursion)};
}

inline TranscriptionAudit audit_stancu_central(int n, int m, const QContext& ctx, const Scalar& alpha,
                                               const Scalar& beta) {
    return {"stancu-central-m" + std::to_string(m) + "-transcription", n, m,
            stancu_central_moment(n, m, ctx, alpha, beta, StancuCentralRoute::Closed),
            stancu_central_moment(n, m, ctx, alpha, beta, StancuCentralRoute::Recombination)};
}

} // namespace qd
