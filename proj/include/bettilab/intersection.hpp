#pragma once

// Symbolic intersection numbers on P^{n_1} x ... x P^{n_r}: integer
// polynomials in the hyperplane classes H_1,...,H_r truncated by
// H_i^{n_i + 1} = 0, the graph-construction degree recurrences
//
//     D_{l+1} = 4 D_l,  D'_{l+1} = D' + 4 D'_l,  (D_1, D'_1) = (4, D'),
//
// whose closed forms are D_l = 4^l and 3 D'_l = (4^l - 1) D', the constrained
// multinomial upper bound for (M . F^{d-1}), and the Siu bigness inequality
//
//     (F^d) > d c_1 N^2 (M . F^{d-1})
//
// in exact rational arithmetic.  No floats anywhere in this module.

#include <gmpxx.h>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace bettilab {

struct MultiProjSpace {
    std::vector<int> dims;   // (n_1, ..., n_r), each >= 1

    explicit MultiProjSpace(std::vector<int> n) : dims(std::move(n)) {
        if (dims.empty()) throw validation_error("BadSpace", "need at least one factor");
        for (int d : dims)
            if (d < 1) throw validation_error("BadSpace", "factor dimensions must be >= 1");
    }
    int factors() const { return static_cast<int>(dims.size()); }
    bool operator==(const MultiProjSpace& o) const { return dims == o.dims; }
};

// Exponent tuples are ordered lexicographically by std::map; zero
// coefficients are never stored and exponents beyond n_i are truncated
// eagerly.
class MultiClass {
public:
    using Exp = std::vector<int>;

    explicit MultiClass(MultiProjSpace s) : space_(std::move(s)) {}

    static MultiClass zero(const MultiProjSpace& s) { return MultiClass(s); }

    static MultiClass one(const MultiProjSpace& s) {
        MultiClass c(s);
        c.coef_[Exp(static_cast<std::size_t>(s.factors()), 0)] = 1;
        return c;
    }

    static MultiClass hyperplane(const MultiProjSpace& s, int i) {
        if (i < 0 || i >= s.factors())
            throw validation_error("BadIndex", "hyperplane index out of range");
        MultiClass c(s);
        Exp e(static_cast<std::size_t>(s.factors()), 0);
        e[static_cast<std::size_t>(i)] = 1;
        c.coef_[std::move(e)] = 1;
        return c;
    }

    // O(a_1, ..., a_r) = a_1 H_1 + ... + a_r H_r
    static MultiClass line_bundle(const MultiProjSpace& s, const std::vector<long>& a) {
        if (static_cast<int>(a.size()) != s.factors())
            throw validation_error("BadIndex", "need one multidegree entry per factor");
        MultiClass c(s);
        for (int i = 0; i < s.factors(); ++i)
            if (a[static_cast<std::size_t>(i)] != 0)
                c = c + mpz_class(a[static_cast<std::size_t>(i)]) * hyperplane(s, i);
        return c;
    }

    const MultiProjSpace& space() const { return space_; }
    const std::map<Exp, mpz_class>& coefficients() const { return coef_; }

    void set(const Exp& e, const mpz_class& v) {
        check_exp(e);
        if (v == 0)
            coef_.erase(e);
        else
            coef_[e] = v;
    }

    mpz_class coefficient(const Exp& e) const {
        const auto it = coef_.find(e);
        return it == coef_.end() ? mpz_class(0) : it->second;
    }

    MultiClass operator+(const MultiClass& o) const {
        require_same_space(o);
        MultiClass r = *this;
        for (const auto& [e, v] : o.coef_) {
            mpz_class s = r.coefficient(e) + v;
            if (s == 0)
                r.coef_.erase(e);
            else
                r.coef_[e] = s;
        }
        return r;
    }

    MultiClass operator*(const MultiClass& o) const {
        require_same_space(o);
        MultiClass r(space_);
        for (const auto& [e1, v1] : coef_) {
            for (const auto& [e2, v2] : o.coef_) {
                Exp e(e1.size());
                bool truncated = false;
                for (std::size_t i = 0; i < e.size(); ++i) {
                    e[i] = e1[i] + e2[i];
                    if (e[i] > space_.dims[i]) {
                        truncated = true;
                        break;
                    }
                }
                if (truncated) continue;
                mpz_class s = r.coefficient(e) + v1 * v2;
                if (s == 0)
                    r.coef_.erase(e);
                else
                    r.coef_[e] = s;
            }
        }
        return r;
    }

    friend MultiClass operator*(const mpz_class& k, const MultiClass& c) {
        MultiClass r(c.space_);
        if (k == 0) return r;
        for (const auto& [e, v] : c.coef_) r.coef_[e] = k * v;
        return r;
    }

    MultiClass pow(int k) const {
        if (k < 0) throw validation_error("BadIndex", "negative power");
        MultiClass r = one(space_);
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    // coefficient of H_1^{n_1} ... H_r^{n_r}
    mpz_class intersection_number() const {
        Exp top(space_.dims.begin(), space_.dims.end());
        return coefficient(top);
    }

private:
    void check_exp(const Exp& e) const {
        if (static_cast<int>(e.size()) != space_.factors())
            throw validation_error("BadIndex", "exponent tuple has wrong length");
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] < 0 || e[i] > space_.dims[i])
                throw validation_error("BadIndex", "exponent outside the truncation range");
    }
    void require_same_space(const MultiClass& o) const {
        if (!(space_ == o.space_))
            throw validation_error("SpaceMismatch", "classes live on different spaces");
    }

    MultiProjSpace space_;
    std::map<Exp, mpz_class> coef_;
};

inline mpz_class intersection_number(const MultiClass& v) { return v.intersection_number(); }

// ---------------------------------------------------------------------------
// Degree recurrences of the iterated duplication polynomials.

inline std::pair<mpz_class, mpz_class> graph_degree_recurrence(int l, const mpz_class& Dprime) {
    if (l < 1) throw validation_error("BadIndex", "l must be >= 1");
    if (Dprime < 0) throw validation_error("BadInput", "D' must be nonnegative");
    mpz_class D = 4, Dp = Dprime;
    for (int i = 1; i < l; ++i) {
        D *= 4;
        Dp = Dprime + 4 * Dp;
    }
    // closed forms D_l = 4^l and 3 D'_l = (4^l - 1) D'
    mpz_class pow4;
    mpz_ui_pow_ui(pow4.get_mpz_t(), 4, static_cast<unsigned long>(l));
    if (D != pow4 || 3 * Dp != (pow4 - 1) * Dprime)
        throw numeric_error("RecurrenceMismatch", "recurrence disagrees with closed form");
    return {D, Dp};
}

// ---------------------------------------------------------------------------
// Constrained multinomial bound.

namespace detail {

inline mpz_class binom(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline mpz_class multinom3(unsigned long n, unsigned long a, unsigned long b, unsigned long c) {
    // n! / (a! b! c!) with a + b + c = n
    return binom(n, a) * binom(n - a, b);
}

inline mpz_class pow_mpz(const mpz_class& b, int e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

} // namespace detail

struct MFBound {
    mpz_class exact_sum;
    mpz_class simplified;
};

// Exact value of the constrained sum
//
//   sum  a_{ip} C(d-1; j', p') C(n; i'', j'', p'') D_l^{i''} D'_l^{p''}
//
// over  i + p = n + m - d,  i + i'' = n,  j' + p' = d - 1,  j' + j'' = n,
//       i'' + j'' + p'' = n,  p + p' + p'' = m - 1,
//
// together with its closure  (4^l D')^{d-1} 2^{d-1} 3^n  sum a_{ip};
// exact_sum <= simplified whenever D' >= 1.
inline MFBound mf_upper_bound(int d, int n, int m, int l, const mpz_class& Dprime,
                              const std::map<std::pair<int, int>, mpz_class>& a_coeffs) {
    if (d < 1 || n < 0 || m < 0) throw validation_error("BadIndex", "need d >= 1, n, m >= 0");
    if (l < 1) throw validation_error("BadIndex", "l must be >= 1");
    for (const auto& [ip, v] : a_coeffs) {
        if (ip.first + ip.second != n + m - d)
            throw validation_error("BadIndexing",
                                   "a_coeffs indices must satisfy i + p = n + m - d");
        if (v < 0) throw validation_error("BadInput", "a_coeffs entries must be >= 0");
    }

    const auto [Dl, Dpl] = graph_degree_recurrence(l, Dprime);

    MFBound out;
    out.exact_sum = 0;
    mpz_class asum = 0;
    for (const auto& [ip, aip] : a_coeffs) {
        asum += aip;
        if (aip == 0) continue;
        const int i = ip.first;
        const int ipp = n - i;                 // i'' from i + i'' = n
        if (ipp < 0 || ipp > n) continue;
        for (int jp = 0; jp <= d - 1; ++jp) {  // j', with p' = d - 1 - j'
            const int jpp = n - jp;            // j'' from j' + j'' = n
            if (jpp < 0) continue;
            const int ppp = n - ipp - jpp;     // p'' from i'' + j'' + p'' = n
            if (ppp < 0) continue;
            const int pprime = d - 1 - jp;
            if (ip.second + pprime + ppp != m - 1) continue;
            out.exact_sum += aip * detail::binom(static_cast<unsigned long>(d - 1),
                                                 static_cast<unsigned long>(jp)) *
                             detail::multinom3(static_cast<unsigned long>(n),
                                               static_cast<unsigned long>(ipp),
                                               static_cast<unsigned long>(jpp),
                                               static_cast<unsigned long>(ppp)) *
                             detail::pow_mpz(Dl, ipp) * detail::pow_mpz(Dpl, ppp);
        }
    }

    mpz_class pow4l;
    mpz_ui_pow_ui(pow4l.get_mpz_t(), 4, static_cast<unsigned long>(l));
    out.simplified = detail::pow_mpz(pow4l * Dprime, d - 1) * detail::pow_mpz(2, d - 1) *
                     detail::pow_mpz(3, n) * asum;
    return out;
}

// ---------------------------------------------------------------------------
// Siu bigness inequality, exact.

inline bool siu_bigness_check(const mpz_class& Fd, const mpz_class& MFd1, int d,
                              const mpq_class& c1, long N) {
    if (d < 1) throw validation_error("BadIndex", "d must be >= 1");
    if (N < 1) throw validation_error("BadIndex", "N must be >= 1");
    const mpq_class rhs = mpq_class(d) * c1 * (mpq_class(N) * N) * mpq_class(MFd1);
    return mpq_class(Fd) > rhs;   // strict; the boundary is excluded
}

// kappa/(2 c d): the midpoint choice strictly inside (0, kappa/(c d)).
inline mpq_class admissible_c1(const mpq_class& kappa, const mpq_class& c, int d) {
    if (kappa <= 0 || c <= 0)
        throw validation_error("NonPositive", "kappa and c must be positive");
    if (d < 1) throw validation_error("BadIndex", "d must be >= 1");
    return kappa / (2 * c * mpq_class(d));
}

} // namespace bettilab
