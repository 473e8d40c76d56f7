#include <catch2/catch_amalgamated.hpp>

#include <bettilab/intersection.hpp>

#include <random>

using namespace bettilab;

namespace {

// Brute-force oracle for the constrained multinomial sum: enumerate every
// index tuple in range and keep the ones satisfying all six constraints.
mpz_class exact_sum_by_enumeration(int d, int n, int m, int l, const mpz_class& Dprime,
                                   const std::map<std::pair<int, int>, mpz_class>& a) {
    mpz_class D = 1, Dp = 0;
    {   // independent recurrence evaluation
        for (int i = 0; i < l; ++i) {
            D *= 4;
            Dp = Dprime + 4 * Dp;
        }
    }
    auto binom = [](int N, int K) {
        mpz_class r;
        if (K < 0 || K > N) return mpz_class(0);
        mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(N), static_cast<unsigned long>(K));
        return r;
    };
    auto powz = [](const mpz_class& b, int e) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
        return r;
    };
    mpz_class total = 0;
    for (const auto& [ip, aip] : a) {
        const int i = ip.first, p = ip.second;
        for (int ipp = 0; ipp <= n; ++ipp)
            for (int jp = 0; jp <= d - 1; ++jp)
                for (int pp = 0; pp <= d - 1; ++pp)
                    for (int jpp = 0; jpp <= n; ++jpp)
                        for (int ppp = 0; ppp <= n; ++ppp) {
                            if (i + p != n + m - d) continue;
                            if (i + ipp != n) continue;
                            if (jp + pp != d - 1) continue;
                            if (jp + jpp != n) continue;
                            if (ipp + jpp + ppp != n) continue;
                            if (p + pp + ppp != m - 1) continue;
                            total += aip * binom(d - 1, jp) * binom(n, ipp) *
                                     binom(n - ipp, jpp) * powz(D, ipp) * powz(Dp, ppp);
                        }
    }
    return total;
}

} // namespace

TEST_CASE("multiclass ring basics") {
    const MultiProjSpace p1p1({1, 1});
    const MultiClass H1 = MultiClass::hyperplane(p1p1, 0);
    const MultiClass H2 = MultiClass::hyperplane(p1p1, 1);

    SECTION("truncation kills H1^2 on P1 x P1") {
        CHECK((H1 * H1).coefficients().empty());
    }
    SECTION("(H1+H2)^2 = 2 H1 H2") {
        const MultiClass s = H1 + H2;
        const MultiClass sq = s * s;
        CHECK(sq.coefficient({1, 1}) == 2);
        CHECK(sq.coefficients().size() == 1);
    }
    SECTION("multiplicative identity") {
        const MultiClass v = mpz_class(3) * H1 + mpz_class(-2) * H2;
        const MultiClass w = MultiClass::one(p1p1) * v;
        CHECK(w.coefficients() == v.coefficients());
    }
    SECTION("space mismatch is rejected") {
        const MultiProjSpace other({2, 1});
        CHECK_THROWS_AS(H1 * MultiClass::hyperplane(other, 0), error);
    }
}

TEST_CASE("intersection numbers") {
    SECTION("top class is normalized to 1") {
        const MultiProjSpace s({2, 3});
        MultiClass top(s);
        top.set({2, 3}, 1);
        CHECK(top.intersection_number() == 1);
    }
    SECTION("O(1,1)^2 on P1 x P1 is 2") {
        const MultiProjSpace s({1, 1});
        CHECK(MultiClass::line_bundle(s, {1, 1}).pow(2).intersection_number() == 2);
    }
    SECTION("O(1,1,1)^3 on P1 x P1 x P1 is 3! = 6") {
        // oracle: multinomial expansion picks the H1 H2 H3 term with
        // coefficient 3!/(1!1!1!)
        const MultiProjSpace s({1, 1, 1});
        CHECK(MultiClass::line_bundle(s, {1, 1, 1}).pow(3).intersection_number() == 6);
    }
}

TEST_CASE("ring laws on random small classes") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> coeff(-4, 4);
    const MultiProjSpace s({2, 1});
    auto randclass = [&] {
        MultiClass c(s);
        for (int e0 = 0; e0 <= 2; ++e0)
            for (int e1 = 0; e1 <= 1; ++e1) c.set({e0, e1}, coeff(rng));
        return c;
    };
    for (int t = 0; t < 100; ++t) {
        const MultiClass a = randclass(), b = randclass(), c = randclass();
        CHECK((a * b).coefficients() == (b * a).coefficients());
        CHECK(((a * b) * c).coefficients() == (a * (b * c)).coefficients());
        CHECK((a * (b + c)).coefficients() == ((a * b) + (a * c)).coefficients());
    }
}

TEST_CASE("multilinearity of intersection numbers in one factor") {
    const MultiProjSpace s({1, 1});
    for (long N = 1; N <= 5; ++N) {
        const MultiClass vN = MultiClass::line_bundle(s, {N, 1});
        const MultiClass v1 = MultiClass::line_bundle(s, {1, 1});
        const MultiClass H2 = MultiClass::hyperplane(s, 1);
        // (O(N,1) . H2) = N (O(1,0) . H2)
        CHECK((vN * H2).intersection_number() ==
              N * (MultiClass::line_bundle(s, {1, 0}) * H2).intersection_number());
    }
    const MultiProjSpace s2({2, 1});
    for (long N = 1; N <= 4; ++N) {
        const MultiClass a = MultiClass::line_bundle(s2, {N, 0});
        const MultiClass b = MultiClass::line_bundle(s2, {1, 1});
        CHECK((a * a * b).intersection_number() ==
              N * N *
                  (MultiClass::line_bundle(s2, {1, 0}) * MultiClass::line_bundle(s2, {1, 0}) * b)
                      .intersection_number());
    }
}

TEST_CASE("graph degree recurrences") {
    SECTION("worked examples") {
        auto [d1, dp1] = graph_degree_recurrence(1, 7);
        CHECK(d1 == 4);
        CHECK(dp1 == 7);
        auto [d2, dp2] = graph_degree_recurrence(2, 3);
        CHECK(d2 == 16);
        CHECK(dp2 == 15);
        auto [d3, dp3] = graph_degree_recurrence(3, 1);
        CHECK(d3 == 64);
        CHECK(dp3 == 21);
    }
    SECTION("closed forms up to l = 12") {
        for (int l = 1; l <= 12; ++l) {
            for (const long dp : {0L, 1L, 5L}) {
                const auto [D, Dp] = graph_degree_recurrence(l, dp);
                mpz_class pow4;
                mpz_ui_pow_ui(pow4.get_mpz_t(), 4, static_cast<unsigned long>(l));
                CHECK(D == pow4);
                CHECK(3 * Dp == (pow4 - 1) * dp);
            }
        }
    }
    CHECK_THROWS_AS(graph_degree_recurrence(0, 1), error);
}

TEST_CASE("mf upper bound") {
    SECTION("d = 1 collapses the (d-1)-fold factors") {
        // only the a_{n, m-1} term survives the constraints
        std::map<std::pair<int, int>, mpz_class> a;
        const int n = 2, m = 3, d = 1;
        for (int i = 0; i <= n + m - d; ++i) {
            const int p = n + m - d - i;
            a[{i, p}] = 1 + i;
        }
        const MFBound b = mf_upper_bound(d, n, m, 2, 5, a);
        CHECK(b.exact_sum == a[{n, m - 1}]);
        mpz_class asum = 0;
        for (const auto& [k, v] : a) asum += v;
        CHECK(b.simplified == mpz_class(9) * asum);   // 3^n = 9
    }
    SECTION("all-zero coefficients") {
        std::map<std::pair<int, int>, mpz_class> a;
        a[{1, 0}] = 0;
        const MFBound b = mf_upper_bound(2, 1, 2, 1, 1, {{{0, 1}, 0}, {{1, 0}, 0}});
        CHECK(b.exact_sum == 0);
        CHECK(b.simplified == 0);
    }
    SECTION("worked d=2 example against the enumeration oracle") {
        std::map<std::pair<int, int>, mpz_class> a{{{0, 1}, 1}, {{1, 0}, 1}};
        const MFBound b = mf_upper_bound(2, 1, 2, 1, 1, a);
        CHECK(b.exact_sum == exact_sum_by_enumeration(2, 1, 2, 1, 1, a));
        CHECK(b.exact_sum == 6);
        CHECK(b.simplified == 48);
        CHECK(b.exact_sum <= b.simplified);
    }
    SECTION("bad indexing is rejected") {
        CHECK_THROWS_AS(mf_upper_bound(2, 1, 2, 1, 1, {{{0, 0}, 1}}), error);
    }
    SECTION("exact <= simplified and matches the oracle on random draws") {
        std::mt19937 rng(97);
        std::uniform_int_distribution<int> dd(1, 3), nn(1, 3), mm(1, 3), ll(1, 4), DD(1, 4),
            av(0, 9);
        for (int t = 0; t < 100; ++t) {
            const int d = dd(rng), n = nn(rng), m = mm(rng), l = ll(rng);
            const mpz_class Dp = DD(rng);
            if (n + m - d < 0) continue;
            std::map<std::pair<int, int>, mpz_class> a;
            for (int i = 0; i <= n + m - d; ++i) a[{i, n + m - d - i}] = av(rng);
            const MFBound b = mf_upper_bound(d, n, m, l, Dp, a);
            REQUIRE(b.exact_sum == exact_sum_by_enumeration(d, n, m, l, Dp, a));
            REQUIRE(b.exact_sum <= b.simplified);
        }
    }
}

TEST_CASE("siu bigness check") {
    SECTION("worked examples") {
        CHECK(siu_bigness_check(100, 10, 2, 4, 1));
        CHECK_FALSE(siu_bigness_check(100, 10, 2, 5, 1));   // boundary excluded
    }
    SECTION("monotone in c1") {
        for (int num = 1; num < 12; ++num) {
            mpq_class c1a(num, 2), c1b(num, 4);
            c1a.canonicalize();
            c1b.canonicalize();
            const bool pass = siu_bigness_check(100, 10, 2, c1a, 1);
            const bool pass_smaller = siu_bigness_check(100, 10, 2, c1b, 1);
            if (pass) CHECK(pass_smaller);
        }
    }
}

TEST_CASE("admissible c1") {
    SECTION("worked examples") {
        CHECK(admissible_c1(10, 1, 2) == mpq_class(5, 2));
        CHECK(admissible_c1(1, 1, 1) == mpq_class(1, 2));
    }
    SECTION("lands strictly inside the interval") {
        std::mt19937 rng(111);
        std::uniform_int_distribution<int> u(1, 30);
        for (int t = 0; t < 50; ++t) {
            mpq_class kappa(u(rng), u(rng)), c(u(rng), u(rng));
            kappa.canonicalize();
            c.canonicalize();
            const int d = 1 + static_cast<int>(rng() % 3);
            const mpq_class v = admissible_c1(kappa, c, d);
            CHECK(v * c * d == kappa / 2);
            CHECK(v > 0);
            CHECK(v * c * d < kappa);
        }
    }
    CHECK_THROWS_AS(admissible_c1(0, 1, 1), error);
    CHECK_THROWS_AS(admissible_c1(1, -2, 1), error);
}
