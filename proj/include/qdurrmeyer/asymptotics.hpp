#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdurrmeyer/moments.hpp"
#include "qdurrmeyer/operators.hpp"
#include "qdurrmeyer/qcore.hpp"

namespace qd {

/// A rule producing q_n in (0,1) for each n.
class QSequence {
public:
    enum class Kind { OneMinusInvN, OneMinusInvSqrtN, OneMinusInvNSquared, Custom };

    static QSequence one_minus_inv_n() { return QSequence(Kind::OneMinusInvN); }
    /// Irrational for non-square n, so exact evaluation needs a perfect square n.
    static QSequence one_minus_inv_sqrt_n() { return QSequence(Kind::OneMinusInvSqrtN); }
    /// q_n = 1 - 1/n², for which q_n^n -> 1.
    static QSequence one_minus_inv_n_squared() { return QSequence(Kind::OneMinusInvNSquared); }
    static QSequence custom(std::map<int, Scalar> table) {
        for (const auto& [n, q] : table)
            if (!(q > 0L && q < 1L)) throw domain_error("custom q_n must lie in (0,1)");
        QSequence s(Kind::Custom);
        s.table_ = std::move(table);
        return s;
    }

    Kind kind() const { return kind_; }

    Scalar at(int n, Backend b) const {
        if (n < 2 && kind_ != Kind::Custom) throw domain_error("builtin q-sequences need n >= 2");
        switch (kind_) {
        case Kind::OneMinusInvN:
            return b == Backend::Exact ? Scalar::exact(n - 1, n) : Scalar(1.0 - 1.0 / n);
        case Kind::OneMinusInvNSquared: {
            long n2 = static_cast<long>(n) * n;
            return b == Backend::Exact ? Scalar::exact(n2 - 1, n2) : Scalar(1.0 - 1.0 / static_cast<double>(n2));
        }
        case Kind::OneMinusInvSqrtN: {
            if (b == Backend::Float) return Scalar(1.0 - 1.0 / std::sqrt(static_cast<double>(n)));
            long r = std::lround(std::sqrt(static_cast<double>(n)));
            if (r * r != n) throw domain_error("1 - 1/sqrt(n) is irrational for n = " + std::to_string(n));
            return Scalar::exact(r - 1, r);
        }
        case Kind::Custom: {
            auto it = table_.find(n);
            if (it == table_.end()) throw domain_error("custom q-sequence has no entry for n = " + std::to_string(n));
            if (it->second.backend() != b) throw backend_mismatch("custom q-sequence backend differs");
            return it->second;
        }
        }
        return Scalar::zero(b);
    }

private:
    explicit QSequence(Kind k) : kind_(k) {}
    Kind kind_;
    std::map<int, Scalar> table_;
};

namespace detail {

inline void check_open_unit(const Scalar& x) {
    if (!(x > 0L && x < 1L)) throw domain_error("x = " + x.str() + " must lie in (0,1)");
}

/// D(p) for a polynomial p through raw moments: Σ_m p_m D(t^m).
inline Polynomial image_from_moments(const Polynomial& p, int n, const QContext& ctx, MomentCache* cache) {
    if (p.is_zero()) return {};
    auto D = cache ? cache->raw(n, p.degree(), ctx) : raw_moments(n, p.degree(), ctx, RawSource::Recurrence);
    Polynomial acc;
    for (int m = 0; m <= p.degree(); ++m)
        if (!p.coeffs()[m].is_zero()) acc += D[m] * p.coeffs()[m];
    return acc;
}

} // namespace detail

/// Operator image at x for Plain or Stancu specs. Polynomial f is exact via the
/// recurrence moments; other functions go through the Jackson-series path.
inline Scalar operator_image(const FunctionSpec& f, const Scalar& x, const OperatorSpec& spec, JacksonOptions opt = {},
                             MomentCache* cache = nullptr) {
    if (spec.is_classical()) throw unsupported_error("operator_image: classical variant");
    if (const Polynomial* p = f.as_polynomial()) {
        Polynomial composed = *p;
        if (spec.is_stancu()) {
            auto [a, b] = detail::stancu_map(spec);
            composed = poly_compose_affine(*p, a, b);
        }
        return detail::image_from_moments(composed, spec.n(), spec.ctx(), cache)(x);
    }
    return spec.is_stancu() ? stancu_apply(spec, f, x, opt) : durrmeyer_apply_fn(spec, f, x, opt);
}

/// [n]_q (D(f; x) - f(x)).
inline Scalar voronovskaja_lhs(const FunctionSpec& f, const Scalar& x, const OperatorSpec& spec,
                               JacksonOptions opt = {}, MomentCache* cache = nullptr) {
    detail::check_open_unit(x);
    return spec.ctx().q_int(spec.n()) * (operator_image(f, x, spec, opt, cache) - f(x));
}

namespace detail {

/// First-order coefficient: 1 - 2x (Plain) or 1 + α - (2 + β) x (Stancu).
inline Scalar drift(const Scalar& x, const Variant& v) {
    if (std::holds_alternative<Classical>(v)) throw unsupported_error("no q-asymptotic formula for the classical variant");
    if (auto* s = std::get_if<Stancu>(&v)) return 1L + s->alpha - (2L + s->beta) * x;
    return 1L - 2L * x;
}

} // namespace detail

/// Limit form: drift(x) f'(x) + x(1-x) f''(x) with classical derivatives.
inline Scalar voronovskaja_rhs_limit(const FunctionSpec& f, const Scalar& x, const Variant& v) {
    detail::check_open_unit(x);
    return detail::drift(x, v) * f.derivative(x, 1) + x * (1L - x) * f.derivative(x, 2);
}

/// Finite-q form: drift(x) D_q f(x) + x(1-x) D_q^2 f(x).
inline Scalar voronovskaja_rhs_q(const FunctionSpec& f, const Scalar& x, const QContext& ctx, const Variant& v) {
    detail::check_open_unit(x);
    return detail::drift(x, v) * q_derivative(f, x, ctx, 1) + x * (1L - x) * q_derivative(f, x, ctx, 2);
}

/// Pass iff abs_err <= 5% of max(|limit|, 0.1).
inline bool within_limit_tolerance(const Scalar& abs_err, const Scalar& limit) {
    const Backend b = limit.backend();
    Scalar floor = b == Backend::Exact ? Scalar::exact(1, 10) : Scalar(0.1);
    Scalar rel = b == Backend::Exact ? Scalar::exact(5, 100) : Scalar(0.05);
    Scalar scale = abs(limit) > floor ? abs(limit) : floor;
    return abs_err <= rel * scale;
}

struct ConvergenceRow {
    int n = 0;
    Scalar q_n;
    Scalar lhs;
    Scalar rhs_limit;
    std::optional<std::string> error;

    bool ok() const { return !error.has_value(); }
    /// |lhs - rhs_limit|, recomputed on every call.
    Scalar abs_err() const { return abs(lhs - rhs_limit); }
};

struct ConvergenceTable {
    Scalar x;
    Scalar rhs_limit;
    std::vector<ConvergenceRow> rows;
    /// abs_err strictly decreasing over the last half of the rows.
    bool trend_decreasing = false;

    const ConvergenceRow& last() const { return rows.back(); }
    bool final_within_tolerance() const {
        return !rows.empty() && rows.back().ok() && within_limit_tolerance(rows.back().abs_err(), rhs_limit);
    }
};

/// One row per n: [n]_{q_n} (D_{n,q_n}(f; x) - f(x)) against the limit-form right-hand side.
inline ConvergenceTable convergence_table(const FunctionSpec& f, const Scalar& x, const QSequence& seq,
                                          const std::vector<int>& n_list, const Variant& v, JacksonOptions opt = {}) {
    detail::check_open_unit(x);
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw domain_error("n_list must be strictly increasing");
    const Backend b = x.backend();
    ConvergenceTable table;
    table.x = x;
    table.rhs_limit = voronovskaja_rhs_limit(f, x, v);
    for (int n : n_list) {
        ConvergenceRow row;
        row.n = n;
        row.rhs_limit = table.rhs_limit;
        try {
            row.q_n = seq.at(n, b);
            QContext ctx(row.q_n, n + 8);
            Variant vv = v;
            row.lhs = voronovskaja_lhs(f, x, OperatorSpec::make(n, ctx, vv), opt);
        } catch (const std::exception& e) {
            row.error = e.what();
            row.lhs = Scalar::zero(b);
        }
        table.rows.push_back(std::move(row));
    }
    const std::size_t half = table.rows.size() / 2;
    bool decreasing = table.rows.size() >= 2;
    for (std::size_t i = half + 1; i < table.rows.size(); ++i) {
        const auto& prev = table.rows[i - 1];
        const auto& cur = table.rows[i];
        if (!prev.ok() || !cur.ok() || !(cur.abs_err() < prev.abs_err())) decreasing = false;
    }
    if (half < table.rows.size() && !table.rows[half].ok()) decreasing = false;
    table.trend_decreasing = decreasing;
    return table;
}

/// Least-squares slope of log|y| against log x.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw domain_error("loglog_slope needs matching samples");
    double mx = 0, my = 0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(std::abs(ys[i])));
        mx += lx.back();
        my += ly.back();
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

/// θ_q(x; t): the normalized remainder of the second-order q-Taylor expansion,
/// (f(t) - f(x) - D_q f(x)(t-x) - D_q²f(x)(t-x)_q² / [2]_q) / (t-x)_q², zero at t = x.
inline Scalar q_taylor_remainder(const FunctionSpec& f, const Scalar& x, const Scalar& t, const QContext& ctx) {
    detail::check_open_unit(x);
    detail::check_unit_interval(t);
    if (t == x) return Scalar::zero(t.backend());
    const Scalar qx = ctx.q() * x;
    if (t == qx) throw singular_point_error("q-Taylor remainder is singular at t = q x");
    Scalar sq = (t - x) * (t - qx);
    Scalar d1 = q_derivative(f, x, ctx, 1);
    Scalar d2 = q_derivative(f, x, ctx, 2);
    Scalar num = f(t) - f(x) - d1 * (t - x) - d2 * sq / ctx.q_int(2);
    return num / sq;
}

} // namespace qd
