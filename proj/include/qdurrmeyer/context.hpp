#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qdurrmeyer/scalar.hpp"

namespace qd {

/// The deformation parameter q together with precomputed tables of q^i and [i]_q.
///
/// A context is immutable once built and cheap to copy (the tables are shared).
/// Caches elsewhere key on id(), so two contexts built from the same q never share
/// cached results by accident.
class QContext {
public:
    /// Validates 0 < q < 1 and precomputes tables up to n_max_hint.
    explicit QContext(Scalar q, int n_max_hint = 64) : QContext(std::move(q), n_max_hint, false) {}

    static QContext exact(const Rational& q, int n_max_hint = 64) { return QContext(Scalar(q), n_max_hint); }
    static QContext exact(int num, int den, int n_max_hint = 64) {
        return QContext(Scalar::exact(num, den), n_max_hint);
    }
    static QContext real(double q, int n_max_hint = 64) { return QContext(Scalar(q), n_max_hint); }

    /// The q = 1 context reserved for the classical Durrmeyer evaluator.
    static QContext classical(Backend b = Backend::Exact, int n_max_hint = 64) {
        return QContext(Scalar::one(b), n_max_hint, true);
    }

    const Scalar& q() const { return tables_->q; }
    Backend backend() const { return tables_->q.backend(); }
    bool is_classical() const { return tables_->classical; }
    int n_max_hint() const { return static_cast<int>(tables_->qint.size()) - 1; }
    std::uintptr_t id() const { return reinterpret_cast<std::uintptr_t>(tables_.get()); }

    /// q^i for i >= 0.
    Scalar q_pow(int i) const {
        if (i < 0) throw domain_error("negative exponent");
        if (i < static_cast<int>(tables_->qpow.size())) return tables_->qpow[i];
        return pow(tables_->q, static_cast<unsigned long>(i));
    }

    /// [n]_q = 1 + q + ... + q^{n-1}, with [0]_q = 0.
    Scalar q_int(int n) const {
        if (n < 0) throw domain_error("q-integer of negative n");
        const auto& tab = tables_->qint;
        if (n < static_cast<int>(tab.size())) return tab[n];
        Scalar acc = tab.back();
        Scalar qp = q_pow(static_cast<int>(tab.size()) - 1);
        for (int i = static_cast<int>(tab.size()); i <= n; ++i) {
            acc += qp;
            qp *= tables_->q;
        }
        return acc;
    }

private:
    struct Tables {
        Scalar q;
        bool classical = false;
        std::vector<Scalar> qpow;
        std::vector<Scalar> qint;
    };

    QContext(Scalar q, int n_max_hint, bool classical) {
        if (n_max_hint < 1) throw domain_error("n_max_hint must be positive");
        if (!classical && !(q > 0L && q < 1L)) throw domain_error("q must satisfy 0 < q < 1, got " + q.str());
        auto t = std::make_shared<Tables>();
        t->q = q;
        t->classical = classical;
        t->qpow.reserve(n_max_hint + 1);
        t->qint.reserve(n_max_hint + 1);
        Scalar p = Scalar::one(q.backend());
        Scalar s = Scalar::zero(q.backend());
        for (int i = 0; i <= n_max_hint; ++i) {
            t->qpow.push_back(p);
            t->qint.push_back(s);
            s += p;
            p *= q;
        }
        tables_ = std::move(t);
    }

    std::shared_ptr<const Tables> tables_;
};

} // namespace qd
