#pragma once

// Betti coordinates and the Betti form on C^g x H_g, where H_g is the Siegel
// upper half space of complex symmetric g x g matrices Z with Im(Z) > 0.
//
// A point of the fiber over Z is w in C^g taken modulo the lattice
// D Z^g + Z Z^g, where D = diag(d_1,...,d_g) is the polarization type
// (D = identity in the principal case).  The Betti coordinates of w are the
// real solutions (a, b) of
//
//     w = D a + Z b,   i.e.   Im(w) = Y b  and  Re(w) = D a + X b
//
// with Z = X + iY.  The associated semi-positive Hermitian form on tangent
// vectors (xi_w, xi_Z) is
//
//     H(xi, eta) = v(xi)^T Y^{-1} conj(v(eta)),
//     v(xi)      = xi_Z Y^{-1} Im(w) - xi_w,
//
// and in the real coordinates (a, b, Z) the corresponding 2-form is the flat
// expression 2 (da)^T /\ db.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "error.hpp"

namespace bettilab {

using cx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace detail {

inline MatrixXcd symmetrize_from_upper(const MatrixXcd& m) {
    const auto g = m.rows();
    MatrixXcd s(g, g);
    for (Eigen::Index i = 0; i < g; ++i)
        for (Eigen::Index j = 0; j < g; ++j)
            s(i, j) = (i <= j) ? m(i, j) : m(j, i);
    return s;
}

} // namespace detail

// Base coordinate on the Siegel upper half space.  Exact symmetry is enforced
// at construction by storing the upper triangle; Y = Im Z must be positive
// definite with condition number below 1e12 (near-singular inputs are
// rejected rather than regularized).
class SiegelPoint {
public:
    explicit SiegelPoint(const MatrixXcd& z_upper) {
        if (z_upper.rows() != z_upper.cols() || z_upper.rows() < 1)
            throw validation_error("BadDimension", "Z must be a square matrix of positive size");
        z_ = detail::symmetrize_from_upper(z_upper);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(z_.imag());
        const VectorXd ev = es.eigenvalues();
        const double lo = ev.minCoeff(), hi = ev.maxCoeff();
        if (!(lo > 0.0) || hi / lo > 1e12)
            throw validation_error("SingularY",
                                   "Im(Z) is not positive definite within condition 1e12");
        yinv_ = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
        ycond_ = hi / lo;
    }

    int dim() const { return static_cast<int>(z_.rows()); }
    const MatrixXcd& Z() const { return z_; }
    MatrixXd X() const { return z_.real(); }
    MatrixXd Y() const { return z_.imag(); }
    const MatrixXd& Yinv() const { return yinv_; }
    double y_condition() const { return ycond_; }

private:
    MatrixXcd z_;
    MatrixXd yinv_;
    double ycond_ = 0.0;
};

// Polarization type D = diag(d_1,...,d_g) with d_1 | d_2 | ... | d_g.
class PolarizationType {
public:
    explicit PolarizationType(std::vector<long> d) : d_(std::move(d)) {
        if (d_.empty())
            throw validation_error("BadPolarization", "polarization type must be nonempty");
        for (std::size_t i = 0; i < d_.size(); ++i) {
            if (d_[i] <= 0)
                throw validation_error("BadPolarization", "polarization entries must be positive");
            if (i > 0 && d_[i] % d_[i - 1] != 0)
                throw validation_error("BadPolarization",
                                       "polarization entries must satisfy d_i | d_{i+1}");
        }
    }

    static PolarizationType principal(int g) {
        return PolarizationType(std::vector<long>(static_cast<std::size_t>(g), 1));
    }

    int dim() const { return static_cast<int>(d_.size()); }
    long d(int i) const { return d_[static_cast<std::size_t>(i)]; }
    const std::vector<long>& entries() const { return d_; }

    VectorXd as_vector() const {
        VectorXd v(dim());
        for (int i = 0; i < dim(); ++i) v[i] = static_cast<double>(d_[static_cast<std::size_t>(i)]);
        return v;
    }

private:
    std::vector<long> d_;
};

// Value of the Betti map: representatives in [0,1)^g plus the unreduced real
// solution of w = D a + Z b, kept for round trips and branch tracking.
struct BettiCoords {
    VectorXd a;      // reduced to [0,1)
    VectorXd b;      // reduced to [0,1)
    VectorXd a_raw;  // unreduced solution
    VectorXd b_raw;

    // (a_raw, b_raw) stacked; the natural object to differentiate.
    VectorXd raw() const {
        VectorXd v(a_raw.size() + b_raw.size());
        v << a_raw, b_raw;
        return v;
    }
};

struct TangentVector {
    VectorXcd w;   // xi_w in C^g
    MatrixXcd Z;   // xi_Z symmetric

    TangentVector(VectorXcd xw, const MatrixXcd& xz)
        : w(std::move(xw)), Z(detail::symmetrize_from_upper(xz)) {}
};

inline double reduce_mod_one(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;  // guards against floor rounding at the boundary
    return r;
}

// Solve w = D a + Z b for real (a, b); the canonical branch is fixed by the
// lattice basis (D e_i, Z e_j) in that order.
inline BettiCoords betti_coordinates(const SiegelPoint& Z, const VectorXcd& w,
                                     const PolarizationType& D) {
    const int g = Z.dim();
    if (D.dim() != g || w.size() != g)
        throw validation_error("BadDimension", "w and D must match the dimension of Z");

    MatrixXd M(2 * g, 2 * g);
    M.setZero();
    for (int i = 0; i < g; ++i) M(i, i) = static_cast<double>(D.d(i));
    M.block(0, g, g, g) = Z.X();
    M.block(g, g, g, g) = Z.Y();

    VectorXd rhs(2 * g);
    rhs << w.real(), w.imag();

    const VectorXd sol = M.partialPivLu().solve(rhs);

    BettiCoords c;
    c.a_raw = sol.head(g);
    c.b_raw = sol.tail(g);
    c.a = c.a_raw.unaryExpr([](double x) { return reduce_mod_one(x); });
    c.b = c.b_raw.unaryExpr([](double x) { return reduce_mod_one(x); });
    return c;
}

// Inverse direction, from the unreduced representatives.
inline VectorXcd betti_to_fiber(const SiegelPoint& Z, const BettiCoords& c,
                                const PolarizationType& D) {
    const int g = Z.dim();
    if (D.dim() != g || c.a_raw.size() != g || c.b_raw.size() != g)
        throw validation_error("BadDimension", "coordinates and D must match the dimension of Z");
    VectorXd re = D.as_vector().cwiseProduct(c.a_raw) + Z.X() * c.b_raw;
    VectorXd im = Z.Y() * c.b_raw;
    VectorXcd w(g);
    w.real() = re;
    w.imag() = im;
    return w;
}

namespace detail {

inline VectorXcd form_vector(const SiegelPoint& Z, const VectorXcd& w,
                             const TangentVector& xi) {
    const VectorXd yinv_imw = Z.Yinv() * w.imag();
    return xi.Z * yinv_imw.cast<cx>() - xi.w;
}

} // namespace detail

// Hermitian form attached to the Betti form; H(xi, xi) is real and >= 0.
inline cx betti_form_hermitian(const SiegelPoint& Z, const VectorXcd& w,
                               const TangentVector& xi, const TangentVector& eta) {
    const VectorXcd v = detail::form_vector(Z, w, xi);
    const VectorXcd u = detail::form_vector(Z, w, eta);
    return (v.transpose() * Z.Yinv().cast<cx>() * u.conjugate()).value();
}

// Real value of the 2-form on a pair of tangent vectors.
inline double betti_form_omega(const SiegelPoint& Z, const VectorXcd& w,
                               const TangentVector& xi, const TangentVector& eta) {
    return -2.0 * betti_form_hermitian(Z, w, xi, eta).imag();
}

// Flat expression 2 (da)^T /\ db on real tangent vectors split as (da, db).
inline double betti_form_flat(const VectorXd& xi_ab, const VectorXd& eta_ab) {
    const auto n = xi_ab.size();
    if (n != eta_ab.size() || n % 2 != 0)
        throw validation_error("BadDimension", "flat tangents must be real 2g-vectors");
    const auto g = n / 2;
    double s = 0.0;
    for (Eigen::Index i = 0; i < g; ++i)
        s += xi_ab[i] * eta_ab[g + i] - eta_ab[i] * xi_ab[g + i];
    return 2.0 * s;
}

// Push a tangent vector through the coordinate change (a,b,Z) -> (Da+Zb, Z).
// Solves
//     xi_w = D da + xi_Z b + Z db     with da, db real,
// where b = Y^{-1} Im w, and returns the stacked pair (d(Da), db).  In these
// variables the 2-form is exactly the flat pairing 2 (d(Da))^T /\ db for
// every polarization type, so betti_form_flat on two pushed tangents
// reproduces betti_form_omega; in the principal case d(Da) = da.
inline VectorXd flat_tangent(const SiegelPoint& Z, const VectorXcd& w,
                             const TangentVector& xi, const PolarizationType& D) {
    const int g = Z.dim();
    if (D.dim() != g) throw validation_error("BadDimension", "D must match the dimension of Z");
    const VectorXd b = Z.Yinv() * w.imag();
    const VectorXcd xiZb = xi.Z * b.cast<cx>();
    const VectorXd db = Z.Yinv() * (xi.w.imag() - xiZb.imag());
    const VectorXd dDa = xi.w.real() - xiZb.real() - Z.X() * db;
    VectorXd out(2 * g);
    out << dDa, db;
    return out;
}

// [N]^* scaling ratio H((N xi_w, xi_Z)) at (Z, N w) over H(xi) at (Z, w);
// equals N^2 whenever the denominator does not vanish.
inline double pullback_scaling(const SiegelPoint& Z, const VectorXcd& w,
                               const TangentVector& xi, long N) {
    if (N == 0) throw validation_error("BadScale", "N must be nonzero");
    const double denom = betti_form_hermitian(Z, w, xi, xi).real();
    const double scale = xi.w.squaredNorm() + xi.Z.squaredNorm();
    if (!(denom > 1e-13 * (scale + 1e-300)))
        throw numeric_error("DegenerateDirection",
                            "H(xi, xi) vanishes; the scaling ratio is undefined");
    const VectorXcd wN = static_cast<double>(N) * w;
    const TangentVector xiN(static_cast<cx>(static_cast<double>(N)) * xi.w, xi.Z);
    const double num = betti_form_hermitian(Z, wN, xiN, xiN).real();
    return num / denom;
}

// Spanning set of the kernel { xi : xi_w = xi_Z Y^{-1} Im(w) }, parametrized
// by the symmetric matrices E_ij; dimension g(g+1)/2 over C.
inline std::vector<TangentVector> kernel_directions(const SiegelPoint& Z, const VectorXcd& w) {
    const int g = Z.dim();
    const VectorXd yinv_imw = Z.Yinv() * w.imag();
    std::vector<TangentVector> basis;
    basis.reserve(static_cast<std::size_t>(g * (g + 1) / 2));
    for (int i = 0; i < g; ++i) {
        for (int j = i; j < g; ++j) {
            MatrixXcd E = MatrixXcd::Zero(g, g);
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            basis.emplace_back(E * yinv_imw.cast<cx>(), E);
        }
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Numerical rank of the Betti map along a chart.

// One chart sample: a base point on H_g together with a fiber point.
struct ChartSample {
    SiegelPoint Z;
    VectorXcd w;
};

using Chart = std::function<ChartSample(const VectorXd& t)>;

struct BettiRankReport {
    int rank = 0;
    int rank_half_step = 0;
    bool step_stable = false;
    VectorXd singular_values;
    MatrixXd jacobian;      // 2g x k, at the requested step
};

namespace detail {

// Align a sample's Betti coordinates with a reference branch.  The reduced
// representatives may wrap around the torus between nearby samples; lattice
// translations act by integer shifts on (a, b), so the continuous branch is
// recovered by shifting to the representative nearest the reference.  If the
// aligned step still moves by more than branch_tol in some coordinate, the
// shift is untrustworthy and we report a branch jump.  (A post-alignment
// difference can never exceed 0.5; the stricter threshold below is what makes
// the check non-vacuous.)
inline VectorXd align_branch(const VectorXd& raw, const VectorXd& ref, double branch_tol) {
    VectorXd shifted = raw;
    for (Eigen::Index i = 0; i < raw.size(); ++i)
        shifted[i] = raw[i] - std::round(raw[i] - ref[i]);
    const double jump = (shifted - ref).cwiseAbs().maxCoeff();
    if (jump > branch_tol)
        throw numeric_error("BranchJump",
                            "consecutive chart samples differ by " + std::to_string(jump) +
                                " after lattice alignment; reduce the step");
    return shifted;
}

inline MatrixXd chart_jacobian(const Chart& chart, int k, const VectorXd& t0, double step,
                               const PolarizationType& D, double branch_tol) {
    const ChartSample base = chart(t0);
    const VectorXd beta0 = betti_coordinates(base.Z, base.w, D).raw();
    const auto g2 = beta0.size();
    MatrixXd J(g2, k);
    for (int j = 0; j < k; ++j) {
        VectorXd tp = t0, tm = t0;
        tp[j] += step;
        tm[j] -= step;
        const ChartSample sp = chart(tp);
        const ChartSample sm = chart(tm);
        const VectorXd bp = align_branch(betti_coordinates(sp.Z, sp.w, D).raw(), beta0, branch_tol);
        const VectorXd bm = align_branch(betti_coordinates(sm.Z, sm.w, D).raw(), beta0, branch_tol);
        J.col(j) = (bp - bm) / (2.0 * step);
    }
    return J;
}

inline int rank_from_singular_values(const VectorXd& sv, double rank_tol) {
    if (sv.size() == 0) return 0;
    const double smax = sv.maxCoeff();
    if (!(smax > 0.0)) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > rank_tol * smax) ++r;
    return r;
}

} // namespace detail

// Central-difference Jacobian of t |-> unreduced Betti coordinates along the
// chart, with branch tracking across samples.  The rank is the number of
// singular values above rank_tol relative to the largest; a halved-step
// Richardson pass reports whether the rank is stable.  A finite sample can
// certify non-degeneracy (rank attained) but never degeneracy.
inline BettiRankReport numerical_betti_rank(const Chart& chart, int k, const VectorXd& t0,
                                            const PolarizationType& D, double step = 1e-4,
                                            double rank_tol = 1e-6, double branch_tol = 0.25) {
    if (!(step > 0.0)) throw validation_error("BadStep", "step must be positive");
    if (t0.size() != k) throw validation_error("BadDimension", "t0 must have length k");

    BettiRankReport rep;
    rep.jacobian = detail::chart_jacobian(chart, k, t0, step, D, branch_tol);
    Eigen::JacobiSVD<MatrixXd> svd(rep.jacobian);
    rep.singular_values = svd.singularValues();
    rep.rank = detail::rank_from_singular_values(rep.singular_values, rank_tol);

    const MatrixXd Jh = detail::chart_jacobian(chart, k, t0, step / 2.0, D, branch_tol);
    Eigen::JacobiSVD<MatrixXd> svdh(Jh);
    rep.rank_half_step = detail::rank_from_singular_values(svdh.singularValues(), rank_tol);
    rep.step_stable = (rep.rank == rep.rank_half_step);
    return rep;
}

} // namespace bettilab
