#pragma once

// Exact Weil heights over Q, the duplication iteration on projective
// x-coordinates, and the Tate-limit Neron-Tate height
//
//     hhat(P) = lim_l  h(x(2^l P)) / 4^l.
//
// All x-coordinate iterates are exact rationals; floating point enters only
// at the final logarithm.  Heights in this module are taken with respect to
// the x-map divisor (degree 2); callers wanting a differently normalized
// canonical height apply a fixed positive rescale.
//
// The successive differences d_l = |t_{l+1} - t_l| obey the Cauchy envelope
// d_l <= C 4^{-l} but are not monotone: the per-step duplication defect
// oscillates between places.  The stopping rule and the reported error bound
// therefore use a three-term envelope max(d_l, d_{l-1}/4, d_{l-2}/16) instead
// of the last difference alone, which under clean 4x decay reduces to the
// plain rule "stop once d < (3/4) tol, report (4/3) d".

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "elliptic.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace bettilab {

struct RationalProjectivePoint {
    std::vector<mpz_class> coords;

    // normalize: divide by the gcd, fix the sign of the first nonzero entry
    explicit RationalProjectivePoint(std::vector<mpz_class> c) : coords(std::move(c)) {
        mpz_class g = 0;
        for (const auto& x : coords) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 0) throw validation_error("ZeroPoint", "all projective coordinates are zero");
        for (auto& x : coords) x /= g;
        for (const auto& x : coords) {
            if (x != 0) {
                if (x < 0)
                    for (auto& y : coords) y = -y;
                break;
            }
        }
    }
};

namespace detail {

inline double log_abs_mpz(const mpz_class& z) {
    if (z == 0) return 0.0;
    signed long exp2 = 0;
    const double d = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(std::abs(d)) + static_cast<double>(exp2) * M_LN2;
}

} // namespace detail

// log max |x_i| over the coprime integer representative
inline double weil_height(const RationalProjectivePoint& p) {
    mpz_class m = 0;
    for (const auto& x : p.coords) {
        mpz_class a = abs(x);
        if (a > m) m = a;
    }
    return detail::log_abs_mpz(m);
}

// x-coordinate height: h([num : den]) for x in lowest terms
inline double weil_height(const mpq_class& x) {
    return detail::log_abs_mpz(std::max(mpz_class(abs(x.get_num())), mpz_class(abs(x.get_den()))));
}

inline double naive_total_height(const RationalProjectivePoint& fiber,
                                 const RationalProjectivePoint& base) {
    return weil_height(fiber) + weil_height(base);
}

// ---------------------------------------------------------------------------
// Duplication on projective x-coordinates.

namespace detail {

// Integer-cleared coefficients of the duplication quartics for
// y^2 = x^3 + a2 x^2 + a4 x + a6:
//   num = X^4 - b4 X^2 Z^2 - 2 b6 X Z^3 - b8 Z^4
//   den = 4 X^3 Z + b2 X^2 Z^2 + 2 b4 X Z^3 + b6 Z^4
struct DuplicationPolys {
    mpz_class n0, n2, n3, n4;   // num = n0 X^4 + n2 X^2 Z^2 + n3 X Z^3 + n4 Z^4
    mpz_class d1, d2, d3, d4;   // den = d1 X^3 Z + d2 X^2 Z^2 + d3 X Z^3 + d4 Z^4

    explicit DuplicationPolys(const RationalCurve& c) {
        const mpq_class b2 = 4 * c.a2(), b4 = 2 * c.a4(), b6 = 4 * c.a6();
        const mpq_class b8 = 4 * c.a2() * c.a6() - c.a4() * c.a4();
        mpz_class den = 1;
        for (const mpq_class& q : {b2, b4, b6, b8})
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
        auto cleared = [&](const mpq_class& q) -> mpz_class {
            mpq_class v = q * den;
            return v.get_num();
        };
        n0 = den;
        n2 = -cleared(b4);
        n3 = -2 * cleared(b6);
        n4 = -cleared(b8);
        d1 = 4 * den;
        d2 = cleared(b2);
        d3 = 2 * cleared(b4);
        d4 = cleared(b6);
    }

    // one duplication step on coprime [X:Z]; output again coprime
    std::pair<mpz_class, mpz_class> step(const mpz_class& X, const mpz_class& Z) const {
        const mpz_class X2 = X * X, Z2 = Z * Z;
        const mpz_class X3 = X2 * X, Z3 = Z2 * Z;
        mpz_class N = n0 * (X2 * X2) + n2 * (X2 * Z2) + n3 * (X * Z3) + n4 * (Z2 * Z2);
        mpz_class D = d1 * (X3 * Z) + d2 * (X2 * Z2) + d3 * (X * Z3) + d4 * (Z2 * Z2);
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), N.get_mpz_t(), D.get_mpz_t());
        if (g != 0) {
            N /= g;
            D /= g;
        }
        if (D < 0) {
            N = -N;
            D = -D;
        }
        return {N, D};
    }
};

inline std::size_t mpz_digits(const mpz_class& z) {
    return mpz_sizeinbase(z.get_mpz_t(), 10);
}

} // namespace detail

// Exact x(2P) from x(P); TwoTorsion when 2P is the point at infinity.
inline mpq_class x_duplication(const RationalCurve& c, const mpq_class& x) {
    const detail::DuplicationPolys dup(c);
    const auto [N, D] = dup.step(x.get_num(), x.get_den());
    if (D == 0) throw validation_error("TwoTorsion", "2P is the point at infinity");
    mpq_class r(N, D);
    r.canonicalize();
    return r;
}

struct HeightReport {
    double naive = 0.0;            // x-height of the input point
    double canonical = 0.0;        // Tate limit (x-map normalization, degree 2)
    double error_estimate = 0.0;   // conservative tail bound, 0 for torsion
    int iterations = 0;            // duplications performed
    double base_height = 0.0;      // height of the curve coefficient tuple
    bool torsion = false;
    bool paranoia_ok = true;
    std::string divisor = "x-map (degree 2)";
    std::vector<double> iterates;      // t_l
    std::vector<double> differences;   // |t_{l+1} - t_l|
};

struct TateOptions {
    std::size_t digit_budget = 200000;   // max decimal digits of an iterate
    int max_iterations = 64;
    bool paranoia = false;               // run 2 extra steps, check the estimate held
};

// height of the cleared coefficient tuple [1 : a2 : a4 : a6]
inline double curve_base_height(const RationalCurve& c) {
    mpz_class den = 1;
    for (const mpq_class& q : {c.a2(), c.a4(), c.a6()})
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
    std::vector<mpz_class> v{den};
    for (const mpq_class& q : {c.a2(), c.a4(), c.a6()}) {
        mpq_class s = q * den;
        v.push_back(s.get_num());
    }
    return weil_height(RationalProjectivePoint(v));
}

namespace detail {

inline double tail_envelope(const std::vector<double>& diffs) {
    const std::size_t n = diffs.size();
    double w = diffs[n - 1];
    if (n >= 2) w = std::max(w, diffs[n - 2] / 4.0);
    if (n >= 3) w = std::max(w, diffs[n - 3] / 16.0);
    return (4.0 / 3.0) * w;
}

} // namespace detail

inline HeightReport tate_limit_height(const RationalCurve& c, const RationalPoint& P,
                                      double tol, const TateOptions& opt = {}) {
    if (!(tol > 0)) throw validation_error("BadTolerance", "tol must be positive");
    if (!c.contains(P)) throw validation_error("BadInput", "point is not on the curve");

    HeightReport rep;
    rep.base_height = curve_base_height(c);
    if (P.infinity) {
        rep.torsion = true;
        return rep;
    }

    mpz_class X = P.x.get_num(), Z = P.x.get_den();
    rep.naive = detail::log_abs_mpz(std::max(mpz_class(abs(X)), mpz_class(abs(Z))));
    rep.iterates.push_back(rep.naive);

    const detail::DuplicationPolys dup(c);
    // orbit repetition means the x-values cycle, hence P is torsion; only
    // small iterates can recur, so cap what gets remembered
    std::set<std::pair<std::string, std::string>> seen;

    double pending_estimate = -1.0;
    int pending_extra = 0;
    double value_at_stop = 0.0;

    for (int l = 1; l <= opt.max_iterations; ++l) {
        if (detail::mpz_digits(X) < 64 && detail::mpz_digits(Z) < 64) {
            auto key = std::make_pair(X.get_str(), Z.get_str());
            if (!seen.insert(key).second) {
                rep.torsion = true;
                rep.canonical = 0.0;
                rep.error_estimate = 0.0;
                rep.iterations = l - 1;
                return rep;
            }
        }
        auto [N, D] = dup.step(X, Z);
        if (D == 0) {   // reached infinity: P is (2-power) torsion
            rep.torsion = true;
            rep.canonical = 0.0;
            rep.error_estimate = 0.0;
            rep.iterations = l;
            return rep;
        }
        X = std::move(N);
        Z = std::move(D);
        if (detail::mpz_digits(X) > opt.digit_budget || detail::mpz_digits(Z) > opt.digit_budget)
            throw budget_error("BudgetExceeded",
                               "iterate exceeds the digit budget of " +
                                   std::to_string(opt.digit_budget) + " digits at l=" +
                                   std::to_string(l));

        const double h = detail::log_abs_mpz(std::max(mpz_class(abs(X)), mpz_class(abs(Z))));
        const double t = h / std::pow(4.0, l);
        rep.differences.push_back(std::abs(t - rep.iterates.back()));
        rep.iterates.push_back(t);
        rep.iterations = l;

        if (pending_estimate >= 0.0) {
            if (++pending_extra == 2) {
                rep.paranoia_ok = std::abs(t - value_at_stop) <= pending_estimate;
                rep.canonical = value_at_stop;
                rep.error_estimate = pending_estimate;
                if (!rep.paranoia_ok)
                    throw numeric_error("EstimateNotConservative",
                                        "paranoia check: tail exceeded the reported estimate");
                return rep;
            }
            continue;
        }

        if (rep.differences.size() >= 3) {
            const double est = detail::tail_envelope(rep.differences);
            if (est <= tol) {
                if (opt.paranoia) {
                    pending_estimate = est;
                    value_at_stop = t;
                    continue;
                }
                rep.canonical = t;
                rep.error_estimate = est;
                return rep;
            }
        }
    }
    if (pending_estimate >= 0.0) {   // converged, but the extra paranoia steps ran out
        rep.canonical = value_at_stop;
        rep.error_estimate = pending_estimate;
        return rep;
    }
    throw numeric_error("NoConvergence",
                        "Tate iteration did not reach tol within max_iterations");
}

// |h(x(2P)) - 4 h(x(P))| and its ratio against max(1, base height).
inline std::pair<double, double> duplication_defect(const RationalCurve& c,
                                                    const RationalPoint& P,
                                                    double base_height) {
    if (P.infinity) throw validation_error("BadInput", "need an affine point");
    const double hP =
        detail::log_abs_mpz(std::max(mpz_class(abs(P.x.get_num())), mpz_class(abs(P.x.get_den()))));
    const mpq_class x2 = x_duplication(c, P.x);
    const double h2 =
        detail::log_abs_mpz(std::max(mpz_class(abs(x2.get_num())), mpz_class(abs(x2.get_den()))));
    const double defect = std::abs(h2 - 4.0 * hP);
    return {defect, defect / std::max(1.0, base_height)};
}

// ---------------------------------------------------------------------------
// Silverman--Tate ratio scan over the Legendre family.

struct ScanSample {
    mpq_class lambda;
    std::string section;
    double canonical = 0.0;
    double naive = 0.0;
    double ratio = 0.0;
    double base_height = 0.0;
    bool torsion = false;
};

struct ScanReport {
    std::vector<ScanSample> samples;
    std::vector<std::pair<std::string, std::string>> skipped;   // (lambda, reason)
    std::vector<std::pair<std::string, std::string>> errors;
    double sup_ratio = 0.0;
    double sup_ratio_first_half = 0.0;
    // stability indicator: relative change of the sup between the first half
    // of the grid and the full grid
    double stability() const {
        if (sup_ratio <= 0.0) return 0.0;
        return std::abs(sup_ratio - sup_ratio_first_half) / sup_ratio;
    }
};

// Rational point of the named section on E_lambda, if it exists.
inline std::optional<RationalPoint> rational_section(const std::string& name,
                                                     const mpq_class& lambda) {
    if (name == "two_torsion_0") return RationalPoint::affine(0, 0);
    if (name == "two_torsion_1") return RationalPoint::affine(1, 0);
    if (name == "const_x2") {
        const mpq_class y2 = 2 * (2 - lambda);   // = 2(2-lambda) at x = 2
        if (y2 <= 0) return std::nullopt;
        mpz_class sn, sd;
        if (!mpz_perfect_square_p(y2.get_num().get_mpz_t()) ||
            !mpz_perfect_square_p(y2.get_den().get_mpz_t()))
            return std::nullopt;
        mpz_sqrt(sn.get_mpz_t(), y2.get_num().get_mpz_t());
        mpz_sqrt(sd.get_mpz_t(), y2.get_den().get_mpz_t());
        return RationalPoint::affine(2, mpq_class(sn, sd));
    }
    throw validation_error("UnknownSection", "unknown section name: " + name);
}

inline ScanReport silverman_tate_scan(const std::vector<mpq_class>& lambdas,
                                      const std::vector<std::string>& sections, double tol,
                                      const TateOptions& opt = {}) {
    struct Cell {
        std::optional<ScanSample> sample;
        std::optional<std::pair<std::string, std::string>> skip;
        std::optional<std::pair<std::string, std::string>> err;
        bool first_half = false;
    };

    const std::size_t half = (lambdas.size() + 1) / 2;
    std::vector<Cell> cells(lambdas.size() * sections.size());

    // data-parallel over (lambda, section); results merged by index below,
    // so the report is independent of the scheduling
    parallel_for(cells.size(), [&](std::size_t idx) {
        const std::size_t i = idx / sections.size();
        const std::size_t j = idx % sections.size();
        const mpq_class& lam = lambdas[i];
        const std::string& sec = sections[j];
        Cell& cell = cells[idx];
        cell.first_half = i < half;
        if (lam <= 0 || lam >= 1) {
            if (j == 0) cell.skip = {lam.get_str(), "lambda outside (0,1)"};
            return;
        }
        try {
            const std::optional<RationalPoint> pt = rational_section(sec, lam);
            if (!pt) {
                cell.skip = {lam.get_str(), sec + " is irrational here"};
                return;
            }
            const double hlam =
                weil_height(RationalProjectivePoint({lam.get_num(), lam.get_den()}));
            const RationalCurve curve = RationalCurve::legendre(lam);
            const HeightReport h = tate_limit_height(curve, *pt, tol, opt);
            ScanSample s;
            s.lambda = lam;
            s.section = sec;
            s.canonical = h.canonical;
            s.naive = h.naive;
            s.base_height = hlam;
            s.torsion = h.torsion;
            s.ratio = std::abs(h.canonical - h.naive) / std::max(1.0, hlam);
            cell.sample = std::move(s);
        } catch (const error& e) {
            cell.err = {lam.get_str() + ":" + sec, e.what()};
        }
    });

    ScanReport rep;
    for (const Cell& cell : cells) {
        if (cell.skip) rep.skipped.push_back(*cell.skip);
        if (cell.err) rep.errors.push_back(*cell.err);
        if (cell.sample) {
            rep.sup_ratio = std::max(rep.sup_ratio, cell.sample->ratio);
            if (cell.first_half)
                rep.sup_ratio_first_half = std::max(rep.sup_ratio_first_half, cell.sample->ratio);
            rep.samples.push_back(*cell.sample);
        }
    }
    return rep;
}

// Default scan grid: n uniform lambda in (0,1) plus the family
// lambda = (4k+3)/(2(k+1)^2) on which the const_x2 section is rational
// (these are lambda = 2 - t^2/2 for t = (2k+1)/(k+1)).
inline std::vector<mpq_class> default_scan_grid(int n) {
    std::vector<mpq_class> g;
    for (int i = 1; i <= n; ++i) {
        mpq_class lam(i, n + 1);
        lam.canonicalize();
        g.push_back(std::move(lam));
    }
    for (int k = 1; k <= n / 2; ++k) {
        mpq_class lam(4 * k + 3, 2 * (k + 1) * (k + 1));
        lam.canonicalize();
        if (lam > 0 && lam < 1) g.push_back(std::move(lam));
    }
    std::sort(g.begin(), g.end());   // keeps the first-half indicator meaningful
    return g;
}

// ---------------------------------------------------------------------------
// Constant assembly: N is the least power of 2 with N^2 >= 2 c0 / c1, and the
// final constants are c1/2 and (c2(N) + c0)/N^2.

struct AssembledConstants {
    long N = 1;
    mpq_class c1_final;
    mpq_class c2_final;
};

inline AssembledConstants assemble_constants(const mpq_class& c0, const mpq_class& c1,
                                             const std::map<long, mpq_class>& c2_of_N) {
    if (c0 < 0) throw validation_error("BadInput", "c0 must be nonnegative");
    if (c1 <= 0) throw validation_error("BadInput", "c1 must be positive");
    long N = 1;
    const mpq_class target = 2 * c0 / c1;
    while (mpq_class(N) * N < target) {
        if (N > (1L << 60)) throw validation_error("BadInput", "required N is out of range");
        N *= 2;
    }
    const auto it = c2_of_N.find(N);
    if (it == c2_of_N.end())
        throw validation_error("MissingC2", "c2 is not provided at N = " + std::to_string(N));
    AssembledConstants out;
    out.N = N;
    out.c1_final = c1 / 2;
    out.c2_final = (it->second + c0) / (mpq_class(N) * N);
    return out;
}

} // namespace bettilab
