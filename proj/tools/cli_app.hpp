#pragma once

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdurrmeyer/qdurrmeyer.hpp"

namespace qd::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kTolerance = 3, kRouteDisagreement = 4 };

using json = nlohmann::ordered_json;

struct RunConfig {
    std::string command;
    std::vector<int> n_list;
    std::optional<std::string> q;
    std::string q_seq = "one-minus-inv-n";
    std::optional<std::string> x;
    std::optional<std::string> x_grid;
    std::optional<std::string> alpha;
    std::optional<std::string> beta;
    std::string f = "t2";
    std::optional<std::string> backend;
    double tol = 1e-12;
    std::size_t max_terms = 4096;
    int m_max = 4;
    std::optional<std::string> format;
    std::optional<std::string> out;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rows of a table plus the overall verdict, rendered as CSV or JSON.
struct Report {
    std::vector<std::string> header;
    std::vector<json> rows;
    json verdict = json::object();
    int exit_code = kOk;
};

// ---------------------------------------------------------------------------
// Parsing helpers

inline Backend parse_backend(const std::string& s) {
    if (s == "exact") return Backend::Exact;
    if (s == "float") return Backend::Float;
    throw UsageError("unknown backend: " + s);
}

inline Scalar parse_scalar(const std::string& text, Backend b) {
    try {
        if (b == Backend::Exact) return Scalar(parse_rational(text));
        auto slash = text.find('/');
        if (slash != std::string::npos)
            return Scalar(std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1)));
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw UsageError("not a number: " + text);
        return Scalar(v);
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("not a number: " + text);
    }
}

/// "a:b:steps" -> steps equally spaced points from a to b inclusive.
inline std::vector<Scalar> parse_grid(const std::string& spec, Backend b) {
    auto c1 = spec.find(':');
    auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw UsageError("grid must look like a:b:steps, got " + spec);
    Scalar lo = parse_scalar(spec.substr(0, c1), b);
    Scalar hi = parse_scalar(spec.substr(c1 + 1, c2 - c1 - 1), b);
    int steps = 0;
    try {
        steps = std::stoi(spec.substr(c2 + 1));
    } catch (const std::exception&) {
        throw UsageError("grid steps must be an integer: " + spec);
    }
    if (steps < 1) throw UsageError("grid needs at least one step");
    std::vector<Scalar> pts;
    for (int i = 0; i < steps; ++i) {
        if (steps == 1) {
            pts.push_back(lo);
            break;
        }
        pts.push_back(lo + (hi - lo) * Scalar::integer(i, b) / Scalar::integer(steps - 1, b));
    }
    return pts;
}

inline bool is_polynomial_name(const std::string& f) {
    return f == "one" || f == "t" || f == "t2" || f == "t3" || f == "t4";
}

inline FunctionSpec make_function(const std::string& name, Backend b) {
    if (name == "one") return FunctionSpec::polynomial(Polynomial::monomial(0, b));
    if (name == "t") return FunctionSpec::polynomial(Polynomial::monomial(1, b));
    if (name == "t2") return FunctionSpec::polynomial(Polynomial::monomial(2, b));
    if (name == "t3") return FunctionSpec::polynomial(Polynomial::monomial(3, b));
    if (name == "t4") return FunctionSpec::polynomial(Polynomial::monomial(4, b));
    if (name == "exp") return FunctionSpec::builtin(Builtin::Exp);
    if (name == "sin") return FunctionSpec::builtin(Builtin::Sin);
    if (name == "abs-shift") return FunctionSpec::builtin(Builtin::AbsShift);
    throw UsageError("unknown function: " + name);
}

inline QSequence make_sequence(const std::string& name) {
    if (name == "one-minus-inv-n") return QSequence::one_minus_inv_n();
    if (name == "one-minus-inv-sqrt-n") return QSequence::one_minus_inv_sqrt_n();
    if (name == "one-minus-inv-n-squared") return QSequence::one_minus_inv_n_squared();
    throw UsageError("unknown q-sequence: " + name);
}

inline json coeff_array(const Polynomial& p) {
    json a = json::array();
    for (const auto& c : p.coeffs()) a.push_back(c.str());
    return a;
}

/// Exact equality, or coefficientwise |a-b| <= tol max(1, |b|) on floats.
inline bool poly_agree(const Polynomial& a, const Polynomial& b, double tol) {
    if (a.backend().value_or(Backend::Exact) == Backend::Exact &&
        b.backend().value_or(Backend::Exact) == Backend::Exact)
        return a == b;
    int deg = std::max(a.degree(), b.degree());
    for (int i = 0; i <= deg; ++i) {
        double av = a.coeff(i).to_double(), bv = b.coeff(i).to_double();
        if (std::abs(av - bv) > tol * std::max(1.0, std::abs(bv))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Validated configuration

struct Resolved {
    RunConfig cfg;
    Backend backend = Backend::Exact;
    std::string format = "csv";
};

inline Resolved validate(const RunConfig& cfg) {
    Resolved r{cfg};
    if (cfg.backend) {
        r.backend = parse_backend(*cfg.backend);
    } else {
        r.backend = is_polynomial_name(cfg.f) ? Backend::Exact : Backend::Float;
    }
    make_function(cfg.f, r.backend);
    if (!is_polynomial_name(cfg.f) && r.backend == Backend::Exact)
        throw UsageError("function " + cfg.f + " needs --backend float");
    r.format = cfg.format.value_or(cfg.command == "verify" ? "json" : "csv");
    if (r.format != "csv" && r.format != "json") throw UsageError("unknown format: " + r.format);
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
        if (cfg.n_list[i] < 1) throw UsageError("n must be a positive integer");
        if (i && cfg.n_list[i] <= cfg.n_list[i - 1]) throw UsageError("--n-list must be strictly increasing");
    }
    bool stancu_capable = cfg.command == "stancu-moments" || cfg.command == "voronovskaja";
    if ((cfg.alpha || cfg.beta) && !stancu_capable)
        throw UsageError("--alpha/--beta are only accepted by stancu-moments and voronovskaja");
    if (cfg.alpha.has_value() != cfg.beta.has_value()) throw UsageError("--alpha and --beta go together");
    if (cfg.alpha) {
        Scalar a = parse_scalar(*cfg.alpha, r.backend), b = parse_scalar(*cfg.beta, r.backend);
        if (a < 0L || a > b) throw UsageError("Stancu parameters must satisfy 0 <= alpha <= beta");
    }
    if (cfg.q) {
        Scalar q = parse_scalar(*cfg.q, r.backend);
        if (!(q > 0L && q < 1L)) throw UsageError("--q must lie in (0,1)");
    }
    make_sequence(cfg.q_seq);
    auto open_unit = [](const Scalar& v) { return v > 0L && v < 1L; };
    if (cfg.x) {
        Scalar x = parse_scalar(*cfg.x, r.backend);
        bool needs_open = cfg.command == "voronovskaja" || cfg.command == "remainder";
        if (needs_open && !open_unit(x)) throw UsageError("--x must lie in (0,1)");
    }
    if (cfg.x_grid) {
        for (const Scalar& v : parse_grid(*cfg.x_grid, r.backend)) {
            if (cfg.command == "voronovskaja" && !open_unit(v)) throw UsageError("--x-grid points must lie in (0,1)");
            if (v < 0L || v > 1L) throw UsageError("--x-grid points must lie in [0,1]");
        }
    }
    if (!(cfg.tol > 0)) throw UsageError("--tol must be positive");
    if (cfg.max_terms < 1) throw UsageError("--max-terms must be positive");
    if (cfg.m_max < 0 || cfg.m_max > 12) throw UsageError("--m-max must lie in 0..12");
    if (cfg.command == "stancu-moments" && !cfg.alpha) throw UsageError("stancu-moments needs --alpha and --beta");
    if (cfg.command == "remainder" && !cfg.x) throw UsageError("remainder needs --x");
    return r;
}

inline json config_json(const Resolved& r) {
    json c;
    c["command"] = r.cfg.command;
    c["backend"] = to_string(r.backend);
    c["n"] = r.cfg.n_list;
    if (r.cfg.q) c["q"] = *r.cfg.q;
    c["q_seq"] = r.cfg.q_seq;
    if (r.cfg.x) c["x"] = *r.cfg.x;
    if (r.cfg.x_grid) c["x_grid"] = *r.cfg.x_grid;
    if (r.cfg.alpha) c["alpha"] = *r.cfg.alpha;
    if (r.cfg.beta) c["beta"] = *r.cfg.beta;
    c["f"] = r.cfg.f;
    c["m_max"] = r.cfg.m_max;
    c["tol"] = r.cfg.tol;
    c["max_terms"] = r.cfg.max_terms;
    return c;
}

inline QContext context_for(const Resolved& r, const std::string& fallback_q, int hint) {
    return QContext(parse_scalar(r.cfg.q.value_or(fallback_q), r.backend), hint);
}

inline std::vector<int> n_values(const Resolved& r, std::vector<int> fallback) {
    return r.cfg.n_list.empty() ? fallback : r.cfg.n_list;
}

// ---------------------------------------------------------------------------
// Commands

inline Report run_moments(const Resolved& r) {
    Report rep;
    rep.header = {"n", "q", "m", "route", "coefficients", "agrees"};
    bool all = true;
    for (int n : n_values(r, {2})) {
        QContext ctx = context_for(r, "1/2", n + r.cfg.m_max + 8);
        auto rec = raw_moment_recurrence(n, r.cfg.m_max, ctx);
        for (int m = 0; m <= r.cfg.m_max; ++m) {
            Polynomial brute = raw_moment_brute(n, m, ctx);
            auto emit = [&](const std::string& route, const Polynomial& p) {
                bool ok = poly_agree(p, brute, r.cfg.tol);
                all = all && ok;
                rep.rows.push_back(json{{"n", n}, {"q", ctx.q().str()}, {"m", m}, {"route", route},
                                        {"coefficients", coeff_array(p)}, {"agrees", ok}});
            };
            if (m <= 4) emit("closed", raw_moment_closed(n, m, ctx));
            emit("product-form", raw_moment_product_form(n, m, ctx));
            emit(rec[m].route == MomentRoute::Recurrence ? "recurrence" : "recurrence(brute-fallback)", rec[m].value);
            emit("brute", brute);
        }
    }
    rep.verdict = json{{"all_routes_agree", all}};
    rep.exit_code = all ? kOk : kRouteDisagreement;
    return rep;
}

inline Report run_central_moments(const Resolved& r) {
    Report rep;
    rep.header = {"n", "q", "m", "route", "coefficients", "status"};
    int mismatches = 0;
    for (int n : n_values(r, {2})) {
        QContext ctx = context_for(r, "1/2", n + 16);
        for (int m = 1; m <= std::min(4, std::max(1, r.cfg.m_max)); ++m) {
            Polynomial expansion = central_moment(n, m, ctx, CentralRoute::Expansion);
            Polynomial closed = central_moment(n, m, ctx, CentralRoute::Closed);
            bool ok = poly_agree(closed, expansion, r.cfg.tol);
            if (!ok) ++mismatches;
            rep.rows.push_back(json{{"n", n}, {"q", ctx.q().str()}, {"m", m}, {"route", "expansion"},
                                    {"coefficients", coeff_array(expansion)}, {"status", "reference"}});
            rep.rows.push_back(json{{"n", n}, {"q", ctx.q().str()}, {"m", m}, {"route", "closed"},
                                    {"coefficients", coeff_array(closed)},
                                    {"status", ok ? "match" : "mismatch-documented"}});
        }
    }
    rep.verdict = json{{"documented_mismatches", mismatches}};
    return rep;
}

inline Report run_stancu_moments(const Resolved& r) {
    Report rep;
    rep.header = {"n", "q", "alpha", "beta", "m", "route", "coefficients", "agrees"};
    Scalar alpha = parse_scalar(*r.cfg.alpha, r.backend), beta = parse_scalar(*r.cfg.beta, r.backend);
    bool all = true;
    for (int n : n_values(r, {2})) {
        QContext ctx = context_for(r, "1/2", n + r.cfg.m_max + 8);
        for (int m = 0; m <= r.cfg.m_max; ++m) {
            Polynomial direct = stancu_moment_direct(n, m, ctx, alpha, beta);
            auto emit = [&](const std::string& route, const Polynomial& p) {
                bool ok = poly_agree(p, direct, r.cfg.tol);
                all = all && ok;
                rep.rows.push_back(json{{"n", n}, {"q", ctx.q().str()}, {"alpha", alpha.str()}, {"beta", beta.str()},
                                        {"m", m}, {"route", route}, {"coefficients", coeff_array(p)}, {"agrees", ok}});
            };
            if (m <= 2) emit("closed", stancu_moment(n, m, ctx, alpha, beta, StancuRoute::Closed));
            emit("recursion", stancu_moment(n, m, ctx, alpha, beta, StancuRoute::Recursion));
            emit("direct", direct);
        }
    }
    rep.verdict = json{{"all_routes_agree", all}};
    rep.exit_code = all ? kOk : kRouteDisagreement;
    return rep;
}

inline Report run_voronovskaja(const Resolved& r, std::ostream& err) {
    Report rep;
    rep.header = {"n", "q_n", "x", "lhs", "rhs_limit", "abs_err", "trend"};
    std::vector<Scalar> xs;
    if (r.cfg.x_grid) xs = parse_grid(*r.cfg.x_grid, r.backend);
    else xs.push_back(parse_scalar(r.cfg.x.value_or("3/10"), r.backend));
    std::vector<int> ns = n_values(r, {4, 8, 16, 32, 64, 128, 256, 512});
    Variant v = Plain{};
    if (r.cfg.alpha)
        v = Stancu{parse_scalar(*r.cfg.alpha, r.backend), parse_scalar(*r.cfg.beta, r.backend)};
    FunctionSpec f = make_function(r.cfg.f, r.backend);
    QSequence seq = make_sequence(r.cfg.q_seq);
    JacksonOptions opt{r.cfg.tol, r.cfg.max_terms};

    bool all = true;
    std::optional<json> worst;
    double worst_ratio = -1;
    for (const Scalar& x : xs) {
        if (!(x > 0L && x < 1L)) throw UsageError("voronovskaja needs x in (0,1), got " + x.str());
        ConvergenceTable table = convergence_table(f, x, seq, ns, v, opt);
        for (const auto& row : table.rows) {
            json j{{"n", row.n}, {"q_n", row.q_n.str()}, {"x", x.str()},
                   {"lhs", row.ok() ? row.lhs.str() : "error"}, {"rhs_limit", row.rhs_limit.str()},
                   {"abs_err", row.ok() ? row.abs_err().str() : "error"},
                   {"trend", table.trend_decreasing ? "decreasing" : "not-decreasing"}};
            if (row.error) j["error"] = *row.error;
            rep.rows.push_back(j);
        }
        bool pass = table.final_within_tolerance();
        all = all && pass;
        if (!pass) {
            const auto& last = table.last();
            double scale = std::max(std::abs(table.rhs_limit.to_double()), 0.1);
            double ratio = last.ok() ? last.abs_err().to_double() / scale : 1e300;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst = rep.rows.back();
            }
        }
    }
    rep.verdict = json{{"within_tolerance", all}};
    if (!all) {
        rep.verdict["worst_offender"] = *worst;
        err << "tolerance failure: worst offender x=" << (*worst)["x"].get<std::string>()
            << " n=" << (*worst)["n"].get<int>() << "\n";
        rep.exit_code = kTolerance;
    }
    return rep;
}

inline Report run_remainder(const Resolved& r) {
    Report rep;
    rep.header = {"q", "x", "t", "theta"};
    QContext ctx = context_for(r, "1/2", 16);
    FunctionSpec f = make_function(r.cfg.f, r.backend);
    Scalar x = parse_scalar(*r.cfg.x, r.backend);
    if (!(x > 0L && x < 1L)) throw UsageError("remainder needs x in (0,1)");
    std::vector<Scalar> ts = r.cfg.x_grid ? parse_grid(*r.cfg.x_grid, r.backend)
                                          : parse_grid("0:1:11", r.backend);
    int singular = 0;
    for (const Scalar& t : ts) {
        json j{{"q", ctx.q().str()}, {"x", x.str()}, {"t", t.str()}};
        try {
            j["theta"] = q_taylor_remainder(f, x, t, ctx).str();
        } catch (const singular_point_error&) {
            j["theta"] = "singular";
            ++singular;
        }
        rep.rows.push_back(j);
    }
    rep.verdict = json{{"singular_points", singular}};
    return rep;
}

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
    std::string name;
    bool mandatory = true;
    bool pass = true;
    std::string witness;
};

inline std::vector<CheckResult> verify_checks(int n_max) {
    std::vector<CheckResult> out;
    const std::vector<QContext> ctxs{QContext::exact(1, 4), QContext::exact(1, 2), QContext::exact(3, 4)};
    std::vector<Scalar> xs;
    for (int i = 0; i < 16; ++i) xs.push_back(Scalar::exact(i, 15));

    auto check = [&](const std::string& name, auto&& body) {
        CheckResult c;
        c.name = name;
        try {
            body(c);
        } catch (const std::exception& e) {
            c.pass = false;
            c.witness = std::string("exception: ") + e.what();
        }
        out.push_back(c);
    };
    auto fail = [](CheckResult& c, const std::string& w) {
        if (c.pass) c.witness = w;
        c.pass = false;
    };

    check("partition-of-unity", [&](CheckResult& c) {
        for (const auto& ctx : ctxs)
            for (int n = 1; n <= n_max; ++n) {
                auto spec = OperatorSpec::plain(n, ctx);
                for (const auto& x : xs) {
                    Scalar s = Scalar::zero(Backend::Exact);
                    for (int k = 0; k <= n; ++k) s += bernstein_basis(spec, k, x);
                    if (!(s == 1L)) fail(c, "n=" + std::to_string(n) + " q=" + ctx.q().str() + " x=" + x.str());
                }
            }
    });
    check("kernel-mass", [&](CheckResult& c) {
        for (const auto& ctx : ctxs)
            for (int n = 1; n <= n_max; ++n) {
                auto spec = OperatorSpec::plain(n, ctx);
                for (int k = 0; k <= n; ++k)
                    if (!(kernel_mass(spec, k) == ctx.q_pow(k) / ctx.q_int(n + 1)))
                        fail(c, "n=" + std::to_string(n) + " k=" + std::to_string(k) + " q=" + ctx.q().str());
            }
    });
    check("normalization", [&](CheckResult& c) {
        for (const auto& ctx : ctxs)
            for (int n = 1; n <= n_max; ++n) {
                Polynomial one = durrmeyer_apply_poly(OperatorSpec::plain(n, ctx),
                                                      Polynomial::monomial(0, Backend::Exact));
                if (!(one == Polynomial::monomial(0, Backend::Exact)))
                    fail(c, "n=" + std::to_string(n) + " q=" + ctx.q().str() + " image " + one.str());
            }
    });
    check("route-agreement", [&](CheckResult& c) {
        for (const auto& ctx : ctxs)
            for (int n = 1; n <= n_max; ++n) {
                auto rec = raw_moment_recurrence(n, 4, ctx);
                for (int m = 0; m <= 4; ++m) {
                    Polynomial brute = raw_moment_brute(n, m, ctx);
                    if (!(rec[m].value == brute) || !(raw_moment_product_form(n, m, ctx) == brute))
                        fail(c, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " q=" + ctx.q().str());
                }
            }
    });
    check("central-first-moment", [&](CheckResult& c) {
        for (const auto& ctx : ctxs)
            for (int n = 1; n <= n_max; ++n) {
                Polynomial lhs = central_moment(n, 1, ctx, CentralRoute::Expansion);
                Polynomial rhs = raw_moment_brute(n, 1, ctx) - Polynomial::monomial(1, Backend::Exact);
                if (!(lhs == rhs)) fail(c, "n=" + std::to_string(n) + " q=" + ctx.q().str());
            }
    });
    check("central-factor-roots", [&](CheckResult& c) {
        for (const auto& ctx : ctxs)
            for (int m = 1; m <= 6; ++m) {
                auto e = central_factor_expand(m, ctx);
                for (const auto& x : xs)
                    for (int s = 0; s < m; ++s)
                        if (!e(ctx.q_pow(s) * x, x).is_zero())
                            fail(c, "m=" + std::to_string(m) + " s=" + std::to_string(s) + " x=" + x.str());
            }
    });
    check("stancu-recursion-vs-direct", [&](CheckResult& c) {
        const std::vector<std::pair<int, int>> params{{0, 0}, {1, 2}, {2, 5}};
        for (const auto& ctx : ctxs)
            for (int n = 1; n <= std::min(n_max, 6); ++n)
                for (auto [a, b] : params)
                    for (int m = 0; m <= 4; ++m) {
                        Scalar al = Scalar::exact(a), be = Scalar::exact(b);
                        Polynomial rec = stancu_moment(n, m, ctx, al, be, StancuRoute::Recursion);
                        if (!(rec == stancu_moment_direct(n, m, ctx, al, be)))
                            fail(c, "n=" + std::to_string(n) + " m=" + std::to_string(m));
                        if (a == 0 && b == 0 && !(rec == raw_moment_brute(n, m, ctx)))
                            fail(c, "plain collapse n=" + std::to_string(n) + " m=" + std::to_string(m));
                    }
    });
    check("remainder-quadratic-zero", [&](CheckResult& c) {
        std::mt19937 rng(20240611);
        std::uniform_int_distribution<int> num(1, 99);
        const auto& ctx = ctxs[1];
        int done = 0;
        while (done < 64) {
            Scalar x = Scalar::exact(num(rng), 100), t = Scalar::exact(num(rng) - 1, 98);
            if (t == x || t == ctx.q() * x) continue;
            Polynomial p{Scalar::exact(num(rng) - 50, 7), Scalar::exact(num(rng) - 50, 11),
                         Scalar::exact(num(rng) - 50, 13)};
            if (!q_taylor_remainder(FunctionSpec::polynomial(p), x, t, ctx).is_zero())
                fail(c, "x=" + x.str() + " t=" + t.str());
            ++done;
        }
    });
    check("classical-bridge", [&](CheckResult& c) {
        for (int n = 1; n <= 4; ++n) {
            Polynomial classical = classical_durrmeyer_apply(OperatorSpec::classical(n),
                                                             Polynomial::monomial(1, Backend::Exact));
            Polynomial expect{Scalar::exact(1, n + 2), Scalar::exact(n, n + 2)};
            if (!(classical == expect)) fail(c, "classical n=" + std::to_string(n));
        }
    });

    // Printed-formula audits: informational.
    const QContext& half = ctxs[1];
    auto audit = [&](const std::string& name, bool match, const std::string& detail) {
        out.push_back(CheckResult{name, false, match, match ? "" : detail});
    };
    const int na = std::max(4, std::min(n_max, 8));
    for (int m = 0; m <= 4; ++m) {
        auto a = audit_raw_closed(na, m, half);
        audit(a.name, a.match(), "n=" + std::to_string(na) + " q=1/2 difference " + a.difference().str());
    }
    for (int m = 1; m <= 4; ++m) {
        auto a = audit_central_closed(na, m, half);
        audit(a.name, a.match(), "n=" + std::to_string(na) + " q=1/2 difference " + a.difference().str());
    }
    for (int m = 2; m <= 4; ++m) {
        auto a = audit_central_factor(m, half);
        std::string powers;
        for (int p : a.mismatched_powers()) powers += (powers.empty() ? "" : ",") + std::to_string(p);
        audit("central-factor-m" + std::to_string(m) + "-identity", a.match(), "differing t-powers: " + powers);
    }
    Scalar al = Scalar::exact(1), be = Scalar::exact(2);
    for (int m = 0; m <= 2; ++m) {
        auto a = audit_stancu_closed(na, m, half, al, be);
        audit(a.name, a.match(), "alpha=1 beta=2 difference " + a.difference().str());
    }
    for (int m = 1; m <= 2; ++m) {
        auto a = audit_stancu_central(na, m, half, al, be);
        audit(a.name, a.match(), "alpha=1 beta=2 difference " + a.difference().str());
    }
    return out;
}

inline Report run_verify(const Resolved& r) {
    Report rep;
    rep.header = {"name", "kind", "status", "witness"};
    int n_max = r.cfg.n_list.empty() ? 8 : r.cfg.n_list.back();
    if (r.backend != Backend::Exact) throw UsageError("verify runs on the exact backend");
    int failures = 0, documented = 0;
    for (const auto& c : verify_checks(n_max)) {
        std::string status = c.mandatory ? (c.pass ? "pass" : "fail") : (c.pass ? "match" : "mismatch-documented");
        if (c.mandatory && !c.pass) ++failures;
        if (!c.mandatory && !c.pass) ++documented;
        rep.rows.push_back(json{{"name", c.name}, {"kind", c.mandatory ? "mandatory" : "audit"}, {"status", status},
                                {"witness", c.witness}});
    }
    rep.verdict = json{{"pass", failures == 0}, {"mandatory_failures", failures}, {"documented_mismatches", documented}};
    rep.exit_code = failures == 0 ? kOk : kTolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
        return s;
    }
    return v.dump();
}

inline void render(const Report& rep, const Resolved& r, std::ostream& os) {
    if (r.format == "json") {
        json doc;
        doc["config"] = config_json(r);
        doc["rows"] = rep.rows;
        doc["verdict"] = rep.verdict;
        os << doc.dump(2) << "\n";
        return;
    }
    for (std::size_t i = 0; i < rep.header.size(); ++i) os << (i ? "," : "") << rep.header[i];
    os << "\n";
    for (const auto& row : rep.rows) {
        for (std::size_t i = 0; i < rep.header.size(); ++i) {
            const auto& key = rep.header[i];
            os << (i ? "," : "") << (row.contains(key) ? csv_cell(row[key]) : "");
        }
        os << "\n";
    }
}

inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Resolved r;
    try {
        r = validate(cfg);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    Report rep;
    try {
        if (cfg.command == "moments") rep = run_moments(r);
        else if (cfg.command == "central-moments") rep = run_central_moments(r);
        else if (cfg.command == "stancu-moments") rep = run_stancu_moments(r);
        else if (cfg.command == "voronovskaja") rep = run_voronovskaja(r, err);
        else if (cfg.command == "remainder") rep = run_remainder(r);
        else if (cfg.command == "verify") rep = run_verify(r);
        else throw UsageError("unknown command: " + cfg.command);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const qd::domain_error& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    if (cfg.out) {
        std::ofstream file(*cfg.out, std::ios::binary);
        if (!file) {
            err << "cannot open " << *cfg.out << "\n";
            return kUsage;
        }
        render(rep, r, file);
    } else {
        render(rep, r, out);
    }
    return rep.exit_code;
}

/// Parses argv and runs the selected command. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"q-Durrmeyer operator toolkit: moments, audits and Voronovskaja tables"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::optional<int> n_single;

    const std::vector<std::string> commands{"moments", "central-moments", "stancu-moments",
                                            "voronovskaja", "remainder", "verify"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--n", n_single, "operator degree");
        sub->add_option("--n-list", cfg.n_list, "strictly increasing degrees")->delimiter(',');
        sub->add_option("--q", cfg.q, "q as p/q or decimal");
        sub->add_option("--q-seq", cfg.q_seq, "one-minus-inv-n | one-minus-inv-sqrt-n | one-minus-inv-n-squared");
        sub->add_option("--x", cfg.x, "evaluation point");
        sub->add_option("--x-grid", cfg.x_grid, "a:b:steps");
        sub->add_option("--alpha", cfg.alpha, "Stancu alpha");
        sub->add_option("--beta", cfg.beta, "Stancu beta");
        sub->add_option("--f", cfg.f, "one|t|t2|t3|t4|exp|sin|abs-shift");
        sub->add_option("--backend", cfg.backend, "exact|float");
        sub->add_option("--tol", cfg.tol, "Jackson / float comparison tolerance");
        sub->add_option("--max-terms", cfg.max_terms, "Jackson series term cap");
        sub->add_option("--m-max", cfg.m_max, "highest moment order");
        sub->add_option("--format", cfg.format, "csv|json");
        sub->add_option("--out", cfg.out, "output path (stdout if omitted)");
        sub->callback([&cfg, name] { cfg.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    if (n_single) {
        if (!cfg.n_list.empty()) {
            err << "usage error: give either --n or --n-list\n";
            return kUsage;
        }
        cfg.n_list = {*n_single};
    }
    return execute(cfg, out, err);
}

} // namespace qd::cli
