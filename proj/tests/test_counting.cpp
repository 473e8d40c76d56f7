#include <catch2/catch_amalgamated.hpp>

#include <bettilab/counting.hpp>
#include <bettilab/intersection.hpp>

#include <random>

using namespace bettilab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec2(double a, double b) {
    VectorXd v(2);
    v << a, b;
    return v;
}

// points of the conic [1 : t : t^2] in P^2
RationalProjectivePoint conic_point(long t) {
    return RationalProjectivePoint({1, t, t * t});
}

// multihomogeneous polynomial on (P^2)^M from block degrees and a seed
MultiHomPoly product_of_linear_forms(int M, const std::vector<std::array<long, 3>>& forms_per_block) {
    // one linear form per block (degree (1,...,1) truncated to the blocks given)
    MultiHomPoly p;
    p.M = M;
    p.n = 2;
    // expand the product of the chosen forms symbolically
    struct Mono {
        mpq_class c;
        std::vector<std::vector<int>> e;
    };
    std::vector<Mono> acc{{1, std::vector<std::vector<int>>(static_cast<std::size_t>(M),
                                                            std::vector<int>(3, 0))}};
    for (int k = 0; k < M; ++k) {
        const auto& f = forms_per_block[static_cast<std::size_t>(k)];
        std::vector<Mono> next;
        for (const auto& m : acc) {
            for (int j = 0; j < 3; ++j) {
                if (f[static_cast<std::size_t>(j)] == 0) continue;
                Mono nm = m;
                nm.c *= f[static_cast<std::size_t>(j)];
                nm.e[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] += 1;
                next.push_back(std::move(nm));
            }
        }
        acc = std::move(next);
    }
    for (const auto& m : acc) p.terms.push_back({m.c, m.e});
    return p;
}

} // namespace

TEST_CASE("nt norm") {
    SECTION("worked examples") {
        const MWLattice id2(MatrixXd::Identity(2, 2));
        CHECK(nt_norm(id2, vec2(0, 0)) == 0.0);
        CHECK(nt_norm(id2, vec2(3, 4)) == Catch::Approx(5.0));
        CHECK(nt_norm(id2, 2.5 * vec2(3, 4)) == Catch::Approx(12.5));
    }
    SECTION("non-PSD grams are rejected") {
        MatrixXd g(2, 2);
        g << 1, 0, 0, -1;
        CHECK_THROWS_AS(MWLattice(g), error);
    }
    SECTION("rank mismatch") {
        const MWLattice id2(MatrixXd::Identity(2, 2));
        VectorXd v(3);
        v.setZero();
        CHECK_THROWS_AS(nt_norm(id2, v), error);
    }
    SECTION("triangle inequality on random PSD grams") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> U(-1, 1);
        for (int t = 0; t < 100; ++t) {
            const int rho = 1 + static_cast<int>(rng() % 3);
            MatrixXd A(rho, rho);
            for (int i = 0; i < rho; ++i)
                for (int j = 0; j < rho; ++j) A(i, j) = U(rng);
            const MWLattice lat(A.transpose() * A);
            VectorXd a(rho), b(rho);
            for (int i = 0; i < rho; ++i) {
                a[i] = U(rng);
                b[i] = U(rng);
            }
            REQUIRE(nt_norm(lat, a + b) <= nt_norm(lat, a) + nt_norm(lat, b) + 1e-10);
        }
    }
}

TEST_CASE("covering bound") {
    CHECK(covering_bound(1, 1, 1) == Catch::Approx(3.0));
    CHECK(covering_bound(2, 1, 0) == Catch::Approx(1.0));
    CHECK(covering_bound(1, 1, 2) == Catch::Approx(9.0));
}

TEST_CASE("greedy cover") {
    const MWLattice id2(MatrixXd::Identity(2, 2));

    SECTION("single point") {
        CHECK(greedy_cover({vec2(0.3, 0.4)}, id2, 0.5).size() == 1);
    }
    SECTION("two far points need two centers") {
        const auto centers = greedy_cover({vec2(0, 0), vec2(3, 0)}, id2, 1.0);
        CHECK(centers.size() == 2);
    }
    SECTION("500 random configurations stay within the packing bound") {
        std::mt19937 rng(19);
        std::uniform_real_distribution<double> U(-1, 1), Ur(0.1, 1.0);
        for (int t = 0; t < 500; ++t) {
            const int rho = 1 + static_cast<int>(rng() % 3);
            MatrixXd A(rho, rho);
            for (int i = 0; i < rho; ++i)
                for (int j = 0; j < rho; ++j) A(i, j) = U(rng);
            const MWLattice lat(A.transpose() * A + 0.05 * MatrixXd::Identity(rho, rho));
            const int npts = 1 + static_cast<int>(rng() % 40);
            std::vector<VectorXd> pts;
            double R = 0;
            for (int i = 0; i < npts; ++i) {
                VectorXd v(rho);
                for (int j = 0; j < rho; ++j) v[j] = U(rng);
                R = std::max(R, nt_norm(lat, v));
                pts.push_back(std::move(v));
            }
            if (R <= 0) continue;
            const double r = Ur(rng) * R;
            const auto centers = greedy_cover(pts, lat, r);
            // soundness: every point within r of some center
            for (const auto& p : pts) {
                double best = 1e300;
                for (int ci : centers)
                    best = std::min(best,
                                    nt_distance(lat, p, pts[static_cast<std::size_t>(ci)]));
                REQUIRE(best <= r + 1e-12);
            }
            REQUIRE(static_cast<double>(centers.size()) <= covering_bound(R, r, rho) + 1e-9);
        }
    }
}

TEST_CASE("small/large split") {
    using Row = std::pair<std::string, double>;
    SECTION("all small under a high threshold") {
        const std::vector<Row> rows{{"a", 0.0}, {"b", 0.0}};
        const auto part = split_small_large(rows, 1.0);
        CHECK(part.small.size() == 2);
        CHECK(part.large.empty());
    }
    SECTION("boundary goes to small") {
        const std::vector<Row> rows{{"a", 2.0}};
        const auto part = split_small_large(rows, 2.0);
        CHECK(part.small.size() == 1);
    }
    SECTION("empty input") {
        const auto part = split_small_large(std::vector<Row>{}, 0.5);
        CHECK(part.small.empty());
        CHECK(part.large.empty());
    }
    SECTION("totality, disjointness, order stability") {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> U(0, 2);
        std::vector<Row> rows;
        for (int i = 0; i < 50; ++i) rows.emplace_back("p" + std::to_string(i), U(rng));
        const auto part = split_small_large(rows, 1.0);
        CHECK(part.small.size() + part.large.size() == rows.size());
        // order stability: ids appear in input order within each side
        auto in_order = [&](const std::vector<std::string>& side) {
            std::size_t last = 0;
            for (const auto& id : side) {
                std::size_t pos = 0;
                while (rows[pos].first != id) ++pos;
                if (pos + 1 < last) return false;
                last = pos + 1;
            }
            return true;
        };
        CHECK(in_order(part.small));
        CHECK(in_order(part.large));
    }
}

TEST_CASE("point budget") {
    const auto b = PointBudget::from_base_height(2.0, 3.5, 7.0);
    CHECK(b.small_threshold == Catch::Approx(7.0));
    CHECK(b.large_bound_base == 7.0);
    // max{1, h} floor
    CHECK(PointBudget::from_base_height(2.0, 0.25, 7.0).small_threshold == Catch::Approx(2.0));
    CHECK_THROWS_AS(PointBudget(-1.0, 7.0), error);
    CHECK_THROWS_AS(PointBudget(0.0, 0.5), error);
}

TEST_CASE("vojta large bound") {
    const auto [l0, t0] = vojta_large_bound(7, 0);
    CHECK(l0 == Catch::Approx(1.0));
    CHECK(t0 == Catch::Approx(7.0));
    const auto [l2, t2] = vojta_large_bound(7, 2);
    CHECK(l2 == Catch::Approx(49.0));
    CHECK(t2 == Catch::Approx(343.0));
    double prev = 0;
    for (int rho = 0; rho < 6; ++rho) {
        const auto [lg, tt] = vojta_large_bound(3, rho);
        CHECK(tt >= prev);
        prev = tt;
    }
    CHECK_THROWS_AS(vojta_large_bound(0.5, 1), error);
}

TEST_CASE("hurwitz packet bound") {
    CHECK(hurwitz_packet_bound(2) == 84);
    CHECK(hurwitz_packet_bound(3) == 168);
    CHECK_THROWS_AS(hurwitz_packet_bound(1), error);
}

TEST_CASE("alon test") {
    SECTION("empty system means containment, hence false") {
        const std::vector<RationalProjectivePoint> sigma{conic_point(0), conic_point(1)};
        CHECK_FALSE(alon_test(sigma, {}, 2));
    }
    SECTION("witness tuple on Y0 = 0 in the first factor") {
        // Z = {first block's x0 = 0}; sigma contains a point with x0 != 0
        MultiHomPoly p;
        p.M = 2;
        p.n = 2;
        p.terms.push_back({1, {{1, 0, 0}, {0, 0, 0}}});
        const std::vector<RationalProjectivePoint> sigma{conic_point(0), conic_point(2)};
        CHECK(alon_test(sigma, {p}, 2));
        // and false when every point has x0 = 0
        const std::vector<RationalProjectivePoint> sigma0{
            RationalProjectivePoint({0, 1, 0}), RationalProjectivePoint({0, 0, 1})};
        CHECK_FALSE(alon_test(sigma0, {p}, 2));
    }
    SECTION("M = 1 reduces to pointwise evaluation") {
        MultiHomPoly p;
        p.M = 1;
        p.n = 2;
        // x2 x0 - x1^2 vanishes exactly on the conic
        p.terms.push_back({1, {{1, 0, 1}}});
        p.terms.push_back({-1, {{0, 2, 0}}});
        std::vector<RationalProjectivePoint> on_conic;
        for (long t = 0; t < 5; ++t) on_conic.push_back(conic_point(t));
        CHECK_FALSE(alon_test(on_conic, {p}, 1));
        on_conic.push_back(RationalProjectivePoint({1, 1, 2}));   // off the conic
        CHECK(alon_test(on_conic, {p}, 1));
    }
    SECTION("tuple budget") {
        std::vector<RationalProjectivePoint> sigma;
        for (long t = 0; t < 101; ++t) sigma.push_back(conic_point(t));
        MultiHomPoly p;
        p.M = 3;
        p.n = 2;
        p.terms.push_back({1, {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}});
        CHECK_THROWS_AS(alon_test(sigma, {p}, 3, 1000000), error);
    }
}

TEST_CASE("alon bound") {
    SECTION("Bezout base case") {
        CHECK(alon_bound(1, 2, 3) == 7);
    }
    SECTION("monotone in each argument") {
        for (int M = 1; M <= 3; ++M)
            for (long c = 1; c <= 3; ++c)
                for (long z = 1; z <= 3; ++z) {
                    CHECK(alon_bound(M, c, z) <= alon_bound(M, c, z + 1));
                    CHECK(alon_bound(M, c, z) <= alon_bound(M, c + 1, z));
                    if (M > 1) CHECK(alon_bound(M - 1, c, z) <= alon_bound(M, c, z));
                }
    }
    SECTION("cross-validation with alon_test on lines in P2") {
        // C = a line with parametrization [1 : t : 0]; degC = 1.
        // Z = product of one linear form per block, a hypersurface of
        // multidegree (1,...,1); its degree under O(1,...,1) is the
        // intersection number (sum H_i)^(2M-1) . (sum H_i) on (P^2)^M.
        for (int M = 1; M <= 2; ++M) {
            const MultiHomPoly p = product_of_linear_forms(
                M, std::vector<std::array<long, 3>>(static_cast<std::size_t>(M), {1, -3, 0}));
            const MultiProjSpace amb(std::vector<int>(static_cast<std::size_t>(M), 2));
            const mpz_class degZ = MultiClass::line_bundle(amb, std::vector<long>(
                                                                    static_cast<std::size_t>(M), 1))
                                       .pow(2 * M)
                                       .intersection_number();
            const mpz_class B = alon_bound(M, 1, degZ);
            std::vector<RationalProjectivePoint> sigma;
            for (long t = 0; t < B.get_si() + 2; ++t)
                sigma.push_back(RationalProjectivePoint({1, t, 0}));
            CHECK(alon_test(sigma, {p}, M));
        }
    }
}

TEST_CASE("dichotomy scan") {
    const RationalCurve c = RationalCurve::short_form(0, -2);
    const RationalPoint P = RationalPoint::affine(3, 5);
    TateOptions opt;
    opt.digit_budget = 1000000;

    SECTION("empty enumeration") {
        const auto r = dichotomy_scan(c, {}, P, 2.0, 5L, 10.0, 1e-5, opt);
        CHECK(r.label == DichotomyLabel::AlternativeII);
        CHECK(r.count == 0);
    }
    SECTION("Q = P always counts: the difference is the identity") {
        const auto r = dichotomy_scan(c, {{"P", P}}, P, 2.0, std::nullopt, 0.0, 1e-5, opt);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].counted);
        CHECK(r.rows[0].torsion);
        CHECK(r.count == 1);
    }
    SECTION("threshold zero counts exactly the torsion differences") {
        const RationalPoint Q = dbl(c, P);
        const auto r =
            dichotomy_scan(c, {{"P", P}, {"2P", Q}}, P, 2.0, std::nullopt, 0.0, 1e-5, opt);
        CHECK(r.count == 1);   // only Q = P gives a torsion (zero) difference
    }
    SECTION("c4 = infinity is vacuous") {
        const auto r = dichotomy_scan(c, {{"P", P}}, P, 1.0, std::nullopt, 100.0, 1e-5, opt);
        CHECK(r.label == DichotomyLabel::AlternativeII);
    }
    SECTION("finite c4 can be exceeded") {
        const auto r = dichotomy_scan(c, {{"P", P}}, P, 1.0, 1L, 100.0, 1e-5, opt);
        CHECK(r.label == DichotomyLabel::ExceedsC4);
        CHECK(r.count == 1);
    }
}
