#pragma once

// Concrete g = 1 fibers: Legendre curves y^2 = x(x-1)(x-lambda), their period
// lattices via the arithmetic-geometric mean, the elliptic exponential through
// q-series for the Weierstrass function, and the elliptic logarithm through a
// Carlson-style duplication seed refined by Newton.
//
// Conventions.  The lattice stored in Lattice is the period lattice of the
// differential dx/y, so for 0 < lambda < 1
//
//     omega_1 = 2 pi / agm(1, sqrt(1 - lambda)),
//     omega_2 = 2 pi i / agm(1, sqrt(lambda)),
//
// and tau = omega_2/omega_1 has positive imaginary part.  The elliptic
// logarithm z of a point is the Abel--Jacobi integral of dx/y, reduced to the
// fundamental parallelogram; 2-torsion sits at the half periods.  The g = 1
// Siegel point is [tau] and the fiber coordinate is w = z/omega_1, so the
// lattice becomes Z + tau Z.

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "siegel.hpp"

namespace bettilab {

// ---------------------------------------------------------------------------
// Exact side: curves over Q in the form y^2 = x^3 + a2 x^2 + a4 x + a6.

struct RationalPoint {
    mpq_class x, y;
    bool infinity = false;

    static RationalPoint at_infinity() {
        RationalPoint p;
        p.infinity = true;
        return p;
    }
    static RationalPoint affine(mpq_class px, mpq_class py) {
        RationalPoint p;
        p.x = std::move(px);
        p.y = std::move(py);
        return p;
    }
};

class RationalCurve {
public:
    RationalCurve(mpq_class a2, mpq_class a4, mpq_class a6)
        : a2_(std::move(a2)), a4_(std::move(a4)), a6_(std::move(a6)) {
        if (discriminant() == 0)
            throw validation_error("SingularCurve", "curve discriminant vanishes");
    }

    static RationalCurve short_form(const mpq_class& A, const mpq_class& B) {
        return RationalCurve(0, A, B);
    }
    // y^2 = x(x-1)(x-lambda)
    static RationalCurve legendre(const mpq_class& lambda) {
        if (lambda == 0 || lambda == 1)
            throw validation_error("SingularCurve", "Legendre parameter must avoid {0,1}");
        RationalCurve c(-(1 + lambda), lambda, 0);
        c.lambda_ = lambda;
        return c;
    }

    const mpq_class& a2() const { return a2_; }
    const mpq_class& a4() const { return a4_; }
    const mpq_class& a6() const { return a6_; }
    const std::optional<mpq_class>& legendre_lambda() const { return lambda_; }

    mpq_class rhs(const mpq_class& x) const { return ((x + a2_) * x + a4_) * x + a6_; }

    bool contains(const RationalPoint& p) const {
        return p.infinity || p.y * p.y == rhs(p.x);
    }

    // 16 Disc(x^3 + a2 x^2 + a4 x + a6); only its vanishing matters here
    mpq_class discriminant() const {
        const mpq_class b2 = 4 * a2_, b4 = 2 * a4_, b6 = 4 * a6_;
        const mpq_class b8 = 4 * a2_ * a6_ - a4_ * a4_;
        return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
    }

private:
    mpq_class a2_, a4_, a6_;
    std::optional<mpq_class> lambda_;
};

inline RationalPoint neg(const RationalCurve&, const RationalPoint& p) {
    if (p.infinity) return p;
    return RationalPoint::affine(p.x, -p.y);
}

inline RationalPoint add(const RationalCurve& c, const RationalPoint& p,
                         const RationalPoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    mpq_class m;
    if (p.x == q.x) {
        if (p.y == -q.y) return RationalPoint::at_infinity();
        m = (3 * p.x * p.x + 2 * c.a2() * p.x + c.a4()) / (2 * p.y);
    } else {
        m = (q.y - p.y) / (q.x - p.x);
    }
    const mpq_class x3 = m * m - c.a2() - p.x - q.x;
    return RationalPoint::affine(x3, m * (p.x - x3) - p.y);
}

inline RationalPoint dbl(const RationalCurve& c, const RationalPoint& p) {
    return add(c, p, p);
}

inline RationalPoint sub(const RationalCurve& c, const RationalPoint& p,
                         const RationalPoint& q) {
    return add(c, p, neg(c, q));
}

inline RationalPoint mul(const RationalCurve& c, long n, RationalPoint p) {
    if (n < 0) {
        p = neg(c, p);
        n = -n;
    }
    RationalPoint acc = RationalPoint::at_infinity();
    while (n > 0) {
        if (n & 1) acc = add(c, acc, p);
        n >>= 1;
        if (n) p = dbl(c, p);
    }
    return acc;
}

// (P_0, ..., P_M) -> (P_1 - P_0, ..., P_M - P_0)
inline std::vector<RationalPoint> faltings_zhang(const RationalCurve& c,
                                                 const std::vector<RationalPoint>& pts) {
    if (pts.empty()) throw validation_error("BadInput", "need at least one point");
    std::vector<RationalPoint> out;
    out.reserve(pts.size() - 1);
    const RationalPoint p0n = neg(c, pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) out.push_back(add(c, pts[i], p0n));
    return out;
}

// ---------------------------------------------------------------------------
// Complex side.

struct Lattice {
    cx w1, w2;
    cx tau() const { return w2 / w1; }
};

struct CPoint {
    cx x, y;
    bool infinity = false;

    static CPoint at_infinity() {
        CPoint p;
        p.infinity = true;
        return p;
    }
    static CPoint affine(cx px, cx py) {
        CPoint p;
        p.x = px;
        p.y = py;
        return p;
    }
};

namespace detail {

constexpr int kAgmMaxIter = 64;

// AGM with the square-root branch chosen so that |a - g| <= |a + g|.
inline cx agm(cx a, cx b) {
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kAgmMaxIter; ++i) {
        const double gap = std::abs(a - b);
        const double scale = std::abs(a) + std::abs(b);
        if (gap <= 4.0 * std::numeric_limits<double>::epsilon() * scale) return (a + b) / 2.0;
        if (i > 8 && gap >= prev_gap) return (a + b) / 2.0;   // roundoff floor reached
        prev_gap = gap;
        const cx am = (a + b) / 2.0;
        cx gm = std::sqrt(a * b);
        if (std::abs(am - gm) > std::abs(am + gm)) gm = -gm;
        a = am;
        b = gm;
    }
    throw numeric_error("NoConvergence", "AGM failed to contract in 64 iterations");
}

// Reduce tau into the SL_2(Z) fundamental domain.  Returns the reduced tau'
// and mu with Z + tau Z = mu (Z + tau' Z).
inline std::pair<cx, cx> reduce_tau(cx tau) {
    cx mu = 1.0;
    for (int i = 0; i < 300; ++i) {
        tau -= std::floor(tau.real() + 0.5);
        if (std::abs(tau) >= 1.0 - 1e-15) return {tau, mu};
        mu *= tau;   // Z + (-1/tau) Z = (1/tau)(Z + tau Z)
        tau = -1.0 / tau;
    }
    throw numeric_error("NoConvergence", "modular reduction of tau did not terminate");
}

struct WpValue {
    cx p, dp;
};

// wp and wp' on the lattice Z + tau Z via the q-series; z is reduced
// internally so that the series contracts at least like e^{-pi Im tau}.
inline WpValue wp_qseries(cx z, cx tau) {
    const double two_pi = 2.0 * M_PI;
    // z = x1 + x2 tau with centered representatives
    double x2 = z.imag() / tau.imag();
    double x1 = z.real() - x2 * tau.real();
    x1 -= std::floor(x1 + 0.5);
    x2 -= std::floor(x2 + 0.5);
    z = cx(x1, 0) + x2 * tau;

    const cx q = std::exp(cx(0, two_pi) * tau);
    const cx u = std::exp(cx(0, two_pi) * z);
    const cx one = 1.0;

    cx s = 1.0 / 12.0 + u / ((one - u) * (one - u));
    cx sp = u * (one + u) / std::pow(one - u, 3);
    cx qn = 1.0;
    for (int n = 1; n < 256; ++n) {
        qn *= q;
        if (std::abs(qn) < 1e-18) break;
        const cx qu = qn * u, qiu = qn / u;
        s += qu / ((one - qu) * (one - qu)) + qiu / ((one - qiu) * (one - qiu)) -
             2.0 * qn / ((one - qn) * (one - qn));
        sp += qu * (one + qu) / std::pow(one - qu, 3) -
              qiu * (one + qiu) / std::pow(one - qiu, 3);
    }
    const cx tp(0, two_pi);
    return {s * tp * tp, sp * tp * tp * tp};
}

// Carlson symmetric integral R_F by the duplication theorem; tolerates
// complex arguments off the negative real axis.
inline cx carlson_rf(cx x, cx y, cx z) {
    cx mu;
    for (int i = 0; i < 200; ++i) {
        const cx sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const cx lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
        mu = (x + y + z) / 3.0;
        if (std::abs(x - mu) + std::abs(y - mu) + std::abs(z - mu) < 1e-14 * std::abs(mu))
            break;
    }
    const cx X = (mu - x) / mu, Y = (mu - y) / mu, Zv = (mu - z) / mu;
    const cx e2 = X * Y + Y * Zv + Zv * X, e3 = X * Y * Zv;
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) /
           std::sqrt(mu);
}

} // namespace detail

// Default scan domain for the Legendre parameter: the real interval (0,1)
// shrunk by 1e-3, plus a complex rectangle avoiding {0,1} by radius 1e-2.
inline bool legendre_domain_ok(cx lambda) {
    if (std::abs(lambda) < 1e-2 || std::abs(lambda - 1.0) < 1e-2) return false;
    if (std::abs(lambda.imag()) < 1e-12)
        return lambda.real() >= 1e-3 && lambda.real() <= 1.0 - 1e-3;
    return lambda.real() >= -0.5 && lambda.real() <= 1.5 && std::abs(lambda.imag()) <= 0.5;
}

inline Lattice periods_legendre(cx lambda) {
    if (std::abs(lambda) < 1e-12 || std::abs(lambda - 1.0) < 1e-12)
        throw validation_error("SingularCurve", "Legendre parameter must avoid {0,1}");
    Lattice L;
    L.w1 = 2.0 * M_PI / detail::agm(1.0, std::sqrt(1.0 - lambda));
    L.w2 = cx(0, 2.0 * M_PI) / detail::agm(1.0, std::sqrt(lambda));
    if ((L.w2 / L.w1).imag() < 0) L.w2 = -L.w2;
    return L;
}

// Point of y^2 = x(x-1)(x-lambda) with dx/y-logarithm z; lattice points map
// to infinity.  Wraps the q-series on the half lattice (the wp lattice of
// dx/(2y)) and the modular reduction of tau.
inline CPoint elliptic_exp(cx lambda, const Lattice& L, cx z) {
    const cx tau = L.tau();
    // lattice coordinates of z; reject near-lattice points
    const double det = L.w1.real() * L.w2.imag() - L.w1.imag() * L.w2.real();
    const double a = (z.real() * L.w2.imag() - z.imag() * L.w2.real()) / det;
    const double b = (L.w1.real() * z.imag() - L.w1.imag() * z.real()) / det;
    if (std::abs(a - std::round(a)) < 1e-8 && std::abs(b - std::round(b)) < 1e-8)
        return CPoint::at_infinity();

    const auto [taur, mu] = detail::reduce_tau(tau);
    const cx c = L.w1 / 2.0;                  // wp lattice is c (Z + tau Z)
    const cx v = (z / 2.0) / c / mu;
    const auto wp = detail::wp_qseries(v, taur);
    const cx m2 = mu * mu * c * c;
    const cx p = wp.p / m2;
    const cx dp = wp.dp / (m2 * mu * c);
    const cx shift = (1.0 + lambda) / 3.0;
    return CPoint::affine(p + shift, dp / 2.0);
}

inline CPoint cneg(const CPoint& p) {
    if (p.infinity) return p;
    return CPoint::affine(p.x, -p.y);
}

inline CPoint cadd(cx lambda, const CPoint& p, const CPoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    const cx a2 = -(1.0 + lambda), a4 = lambda;
    cx m;
    const double scale = std::abs(p.x) + std::abs(q.x) + 1.0;
    if (std::abs(p.x - q.x) < 1e-12 * scale) {
        if (std::abs(p.y + q.y) < 1e-12 * (std::abs(p.y) + std::abs(q.y) + 1.0))
            return CPoint::at_infinity();
        m = (3.0 * p.x * p.x + 2.0 * a2 * p.x + a4) / (2.0 * p.y);
    } else {
        m = (q.y - p.y) / (q.x - p.x);
    }
    const cx x3 = m * m - a2 - p.x - q.x;
    return CPoint::affine(x3, m * (p.x - x3) - p.y);
}

namespace detail {

// Half periods paired with the curve point they exponentiate to.
inline std::array<std::pair<cx, CPoint>, 3> half_period_points(cx lambda, const Lattice& L) {
    std::array<std::pair<cx, CPoint>, 3> hp;
    const cx zs[3] = {L.w1 / 2.0, L.w2 / 2.0, (L.w1 + L.w2) / 2.0};
    for (int i = 0; i < 3; ++i) hp[i] = {zs[i], elliptic_exp(lambda, L, zs[i])};
    return hp;
}

inline cx reduce_to_cell(cx z, const Lattice& L) {
    const double det = L.w1.real() * L.w2.imag() - L.w1.imag() * L.w2.real();
    double a = (z.real() * L.w2.imag() - z.imag() * L.w2.real()) / det;
    double b = (L.w1.real() * z.imag() - L.w1.imag() * z.real()) / det;
    a -= std::floor(a);
    b -= std::floor(b);
    return a * L.w1 + b * L.w2;
}

} // namespace detail

// Elliptic logarithm: z with elliptic_exp(lambda, L, z) = P, reduced to the
// fundamental parallelogram.  Seeded by the Carlson integral
// 2 R_F(x, x-1, x-lambda), refined by Newton on x(z) - x_P (note dx/dz = y),
// with a coarse grid fallback.
inline cx elliptic_log(cx lambda, const Lattice& L, const CPoint& P) {
    if (P.infinity)
        throw validation_error("BadInput", "elliptic_log requires an affine point");

    const double xscale = std::abs(P.x) + 1.0;

    // exact 2-torsion goes straight to a half period
    if (std::abs(P.y) < 1e-10 * xscale) {
        const auto hp = detail::half_period_points(lambda, L);
        int best = 0;
        double bd = 1e300;
        for (int i = 0; i < 3; ++i) {
            const double d = std::abs(hp[i].second.x - P.x);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        if (bd < 1e-6 * xscale) return hp[best].first;
    }

    auto residual = [&](cx z) -> double {
        const CPoint Q = elliptic_exp(lambda, L, z);
        if (Q.infinity) return 1e300;
        return std::abs(Q.x - P.x) + std::abs(Q.y - P.y);
    };

    cx z;
    bool seeded = false;
    const cx zc = 2.0 * detail::carlson_rf(P.x, P.x - 1.0, P.x - lambda);
    for (const cx cand : {zc, -zc}) {
        if (residual(cand) < 1e-6 * xscale) {
            z = cand;
            seeded = true;
            break;
        }
    }
    if (!seeded) {
        double bd = 1e300;
        const int n = 24;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const cx cand = (i + 0.5) / n * L.w1 + (j + 0.5) / n * L.w2;
                const CPoint Q = elliptic_exp(lambda, L, cand);
                if (Q.infinity) continue;
                const double d = std::abs(Q.x - P.x);
                if (d < bd) {
                    bd = d;
                    z = cand;
                }
            }
        }
    }

    for (int it = 0; it < 80; ++it) {
        const CPoint Q = elliptic_exp(lambda, L, z);
        if (Q.infinity) break;
        const cx step = (Q.x - P.x) / Q.y;
        z -= step;
        if (std::abs(step) < 1e-15 * (std::abs(z) + 1.0)) break;
    }
    {   // pick the sign branch matching y
        const CPoint Q = elliptic_exp(lambda, L, z);
        if (!Q.infinity && std::abs(Q.y - P.y) > std::abs(Q.y + P.y)) z = -z;
    }
    z = detail::reduce_to_cell(z, L);
    if (residual(z) > 1e-9 * xscale)
        throw numeric_error("NoConvergence", "elliptic logarithm failed to invert the point");
    return z;
}

// Betti coordinates of a curve point: w = z/omega_1 on Z = [tau], principal
// polarization; the group identity maps to (0,0).
inline BettiCoords betti_of_point(cx lambda, const Lattice& L, const CPoint& P) {
    const int g = 1;
    if (P.infinity) {
        BettiCoords c;
        c.a = c.b = c.a_raw = c.b_raw = VectorXd::Zero(g);
        return c;
    }
    const cx z = elliptic_log(lambda, L, P);
    MatrixXcd Zm(1, 1);
    Zm(0, 0) = L.tau();
    VectorXcd w(1);
    w[0] = z / L.w1;
    return betti_coordinates(SiegelPoint(Zm), w, PolarizationType::principal(g));
}

// Built-in sections of the Legendre family used by the non-degeneracy scans.
// const_x2 takes the principal branch of sqrt(2(2-lambda)), which is
// continuous on the scan domain; the cut would require 2-lambda <= 0.
inline CPoint legendre_section(const std::string& name, cx lambda) {
    if (name == "two_torsion_0") return CPoint::affine(0.0, 0.0);
    if (name == "two_torsion_1") return CPoint::affine(1.0, 0.0);
    if (name == "const_x2") {
        const cx y2 = 2.0 * (2.0 - lambda);
        if (y2.real() <= 0.0 && std::abs(y2.imag()) < 1e-12)
            throw numeric_error("BranchCut", "const_x2 branch cut at this lambda");
        return CPoint::affine(2.0, std::sqrt(y2));
    }
    throw validation_error("UnknownSection", "unknown section name: " + name);
}

// Chart over the real 2-cube (t1, t2) |-> lambda0 + t1 + i t2 for the rank
// scans; Z = [tau(lambda)], w = log(section(lambda))/omega_1.
inline Chart make_legendre_chart(const std::string& section, cx lambda0) {
    return [section, lambda0](const VectorXd& t) -> ChartSample {
        const cx lambda = lambda0 + cx(t[0], t[1]);
        const Lattice L = periods_legendre(lambda);
        const CPoint P = legendre_section(section, lambda);
        MatrixXcd Zm(1, 1);
        Zm(0, 0) = L.tau();
        VectorXcd w(1);
        w[0] = P.infinity ? cx(0.0) : elliptic_log(lambda, L, P) / L.w1;
        return ChartSample{SiegelPoint(Zm), w};
    };
}

} // namespace bettilab
