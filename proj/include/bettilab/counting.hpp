#pragma once

// The point-counting side: Mordell--Weil lattice geometry under the
// Neron--Tate norm, the (1 + 2R/r)^rho ball-packing bound with a greedy
// cover, the small/large split at hhat <= B, the c^rho / c^{1+rho} bound
// assembly, the Alon-type product lemma on (P^n)^M with its conservative
// Bezout-product bound, the 84(g-1) packet bound, and the dichotomy scan
// over a declared finite enumeration of fiber points.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elliptic.hpp"
#include "error.hpp"
#include "heights.hpp"

namespace bettilab {

// Gram matrix of the Neron--Tate pairing on a rank-rho subgroup.
class MWLattice {
public:
    explicit MWLattice(const Eigen::MatrixXd& gram) {
        if (gram.rows() != gram.cols())
            throw validation_error("BadGram", "Gram matrix must be square");
        gram_ = 0.5 * (gram + gram.transpose());
        if (gram_.rows() > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_);
            const double lo = es.eigenvalues().minCoeff();
            const double hi = std::max(es.eigenvalues().maxCoeff(), 0.0);
            if (lo < -1e-10 * std::max(hi, 1.0))
                throw validation_error("BadGram", "Gram matrix is not positive semi-definite");
        }
    }

    int rank() const { return static_cast<int>(gram_.rows()); }
    const Eigen::MatrixXd& gram() const { return gram_; }

private:
    Eigen::MatrixXd gram_;
};

// Thresholds of the small/large machinery: B is the small-point cutoff
// (B = c0 max{1, base height}) and c >= 1 feeds the c^rho large-point bound.
struct PointBudget {
    double small_threshold = 0.0;
    double large_bound_base = 1.0;

    PointBudget(double B, double c) : small_threshold(B), large_bound_base(c) {
        if (B < 0) throw validation_error("BadInput", "small threshold must be >= 0");
        if (c < 1.0) throw validation_error("BadInput", "large bound base must be >= 1");
    }
    static PointBudget from_base_height(double c0, double base_height, double c) {
        return PointBudget(c0 * std::max(1.0, base_height), c);
    }
};

// sqrt(v^T G v), clipped at 0 against roundoff
inline double nt_norm(const MWLattice& lat, const Eigen::VectorXd& v) {
    if (v.size() != lat.rank())
        throw validation_error("RankMismatch", "coordinate vector has wrong length");
    const double q = v.dot(lat.gram() * v);
    return std::sqrt(std::max(q, 0.0));
}

inline double nt_distance(const MWLattice& lat, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
    return nt_norm(lat, a - b);
}

inline double covering_bound(double R, double r, int rho) {
    if (!(R > 0) || !(r > 0)) throw validation_error("BadInput", "R and r must be positive");
    if (rho < 0) throw validation_error("BadInput", "rho must be nonnegative");
    return std::pow(1.0 + 2.0 * R / r, rho);
}

// First-uncovered greedy cover: walk the points in order, opening a new ball
// at every point not within r of an existing center.  Centers are input
// indices; every point ends up within r of its first covering center.
inline std::vector<int> greedy_cover(const std::vector<Eigen::VectorXd>& points,
                                     const MWLattice& lat, double r) {
    if (!(r > 0)) throw validation_error("BadInput", "radius must be positive");
    std::vector<int> centers;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool covered = false;
        for (int c : centers) {
            if (nt_distance(lat, points[i], points[static_cast<std::size_t>(c)]) <= r) {
                covered = true;
                break;
            }
        }
        if (!covered) centers.push_back(static_cast<int>(i));
    }
    return centers;
}

// Stable small/large partition; the boundary hhat = B is small.
template <typename Id>
struct SplitResult {
    std::vector<Id> small;
    std::vector<Id> large;
};

template <typename Id>
SplitResult<Id> split_small_large(const std::vector<std::pair<Id, double>>& heights, double B) {
    if (B < 0) throw validation_error("BadInput", "threshold must be nonnegative");
    SplitResult<Id> out;
    for (const auto& [id, h] : heights) {
        if (h <= B)
            out.small.push_back(id);
        else
            out.large.push_back(id);
    }
    return out;
}

// (c^rho, c^{1+rho})
inline std::pair<double, double> vojta_large_bound(double c, int rho) {
    if (!(c >= 1.0)) throw validation_error("BadInput", "c must be >= 1");
    if (rho < 0) throw validation_error("BadInput", "rho must be nonnegative");
    const double large = std::pow(c, rho);
    return {large, large * c};
}

inline long hurwitz_packet_bound(int g) {
    if (g < 2) throw validation_error("GenusTooSmall", "the packet bound needs genus >= 2");
    return 84L * (g - 1);
}

// ---------------------------------------------------------------------------
// Alon-type lemma on (P^n)^M.

// One monomial c * prod_{k,j} x_{k,j}^{e[k][j]} in M blocks of n+1 variables.
struct MultiHomTerm {
    mpq_class c;
    std::vector<std::vector<int>> exps;   // M x (n+1)
};

struct MultiHomPoly {
    int M = 1;
    int n = 1;
    std::vector<MultiHomTerm> terms;

    void validate() const {
        for (const auto& t : terms) {
            if (static_cast<int>(t.exps.size()) != M)
                throw validation_error("BadInput", "term has wrong number of blocks");
            for (const auto& blk : t.exps) {
                if (static_cast<int>(blk.size()) != n + 1)
                    throw validation_error("BadInput", "term block has wrong number of variables");
                for (int e : blk)
                    if (e < 0) throw validation_error("BadInput", "negative exponent");
            }
        }
    }

    mpq_class eval(const std::vector<const RationalProjectivePoint*>& tuple) const {
        mpq_class acc = 0;
        for (const auto& t : terms) {
            mpq_class prod = t.c;
            for (int k = 0; k < M; ++k) {
                const auto& pt = *tuple[static_cast<std::size_t>(k)];
                for (int j = 0; j <= n; ++j) {
                    const int e = t.exps[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                    if (e == 0) continue;
                    mpz_class p;
                    mpz_pow_ui(p.get_mpz_t(), pt.coords[static_cast<std::size_t>(j)].get_mpz_t(),
                               static_cast<unsigned long>(e));
                    prod *= p;
                }
            }
            acc += prod;
        }
        return acc;
    }
};

// True iff some M-tuple from Sigma^M fails to satisfy every polynomial of Z,
// i.e. Sigma^M is not contained in Z(k).  Exact rational evaluation with
// early exit on the first witness.
inline bool alon_test(const std::vector<RationalProjectivePoint>& sigma,
                      const std::vector<MultiHomPoly>& Z, int M,
                      std::uint64_t tuple_budget = 1000000) {
    if (M < 1) throw validation_error("BadInput", "M must be >= 1");
    for (const auto& p : Z) {
        if (p.M != M) throw validation_error("BadInput", "polynomial block count differs from M");
        p.validate();
    }
    if (sigma.empty()) return false;   // the empty product is contained in anything

    double tuples = 1.0;
    for (int i = 0; i < M; ++i) tuples *= static_cast<double>(sigma.size());
    if (tuples > static_cast<double>(tuple_budget))
        throw budget_error("BudgetExceeded",
                           "|Sigma|^M exceeds the tuple budget of " + std::to_string(tuple_budget));
    if (Z.empty()) return false;   // Z is the whole space

    std::vector<std::size_t> idx(static_cast<std::size_t>(M), 0);
    std::vector<const RationalProjectivePoint*> tuple(static_cast<std::size_t>(M));
    while (true) {
        for (int k = 0; k < M; ++k)
            tuple[static_cast<std::size_t>(k)] = &sigma[idx[static_cast<std::size_t>(k)]];
        for (const auto& poly : Z) {
            if (poly.eval(tuple) != 0) return true;   // witness tuple outside Z
        }
        int k = M - 1;
        while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == sigma.size()) {
            idx[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return false;
}

// Conservative recursive bound for the lemma: the base case is Bezout,
// B(1) = degC degZ + 1; one induction step bounds both the component count
// B'' and the fiber degree by the Bezout product degZ * degC^M, giving
//
//     B(M) = max( B(M-1, degC, degZ degC^M),  degZ degC^M + 1 ).
//
// Monotone nondecreasing in every argument by construction.
inline mpz_class alon_bound(int M, const mpz_class& degC, const mpz_class& degZ) {
    if (M < 1 || degC < 1 || degZ < 1)
        throw validation_error("BadInput", "alon_bound needs M, degC, degZ >= 1");
    if (M == 1) return degC * degZ + 1;
    mpz_class degCM;
    mpz_pow_ui(degCM.get_mpz_t(), degC.get_mpz_t(), static_cast<unsigned long>(M));
    const mpz_class bezout = degZ * degCM;
    const mpz_class rec = alon_bound(M - 1, degC, bezout);
    return std::max(rec, mpz_class(bezout + 1));
}

// ---------------------------------------------------------------------------
// Dichotomy scan over a declared enumeration of fiber points.

enum class DichotomyLabel { AlternativeII, ExceedsC4 };

struct DichotomyRow {
    std::string id;
    double hhat_diff = 0.0;
    bool counted = false;
    bool torsion = false;
};

struct DichotomyReport {
    DichotomyLabel label = DichotomyLabel::AlternativeII;
    long count = 0;
    double threshold = 0.0;
    std::vector<DichotomyRow> rows;
    std::vector<std::pair<std::string, std::string>> errors;   // (id, message)
};

// Counts Q in the enumeration with hhat(Q - P) <= h_base / c3 (heights on the
// elliptic fiber, x-map normalization); AlternativeII when the count stays
// below c4.  c4 = nullopt means "infinity", in which case the alternative
// holds vacuously.  Per-candidate height failures are recorded and the scan
// continues.
inline DichotomyReport dichotomy_scan(const RationalCurve& curve,
                                      const std::vector<std::pair<std::string, RationalPoint>>& candidates,
                                      const RationalPoint& P, double c3, std::optional<long> c4,
                                      double h_base, double tol, const TateOptions& opt = {}) {
    if (!(c3 > 0)) throw validation_error("BadInput", "c3 must be positive");
    if (h_base < 0) throw validation_error("BadInput", "h_base must be nonnegative");
    DichotomyReport rep;
    rep.threshold = h_base / c3;
    for (const auto& [id, Q] : candidates) {
        try {
            const RationalPoint diff = sub(curve, Q, P);
            const HeightReport h = tate_limit_height(curve, diff, tol, opt);
            DichotomyRow row;
            row.id = id;
            row.hhat_diff = h.canonical;
            row.torsion = h.torsion;
            row.counted = h.canonical <= rep.threshold;
            if (row.counted) ++rep.count;
            rep.rows.push_back(std::move(row));
        } catch (const error& e) {
            rep.errors.emplace_back(id, e.what());
        }
    }
    rep.label = (!c4 || rep.count < *c4) ? DichotomyLabel::AlternativeII
                                         : DichotomyLabel::ExceedsC4;
    return rep;
}

} // namespace bettilab
