// Command-line laboratory for Betti coordinates/forms on the Siegel upper
// half space, exact Neron-Tate heights via the Tate limit, multiprojective
// intersection bounds with the Siu bigness check, and the ball-packing /
// small-large counting pipeline.
//
// Every subcommand emits a single report object {command, config, results,
// errors, meta} on stdout; logs go to stderr.  Exit codes: 0 success,
// 2 input/validation, 3 numeric/convergence, 4 budget exceeded.

#include <CLI11.hpp>

#include <bettilab/counting.hpp>
#include <bettilab/elliptic.hpp>
#include <bettilab/heights.hpp>
#include <bettilab/intersection.hpp>
#include <bettilab/parallel.hpp>
#include <bettilab/parse.hpp>
#include <bettilab/report.hpp>
#include <bettilab/siegel.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace bl = bettilab;
using nlohmann::json;

namespace {

int exit_code_for(const bl::error& e) {
    switch (e.category()) {
        case bl::errc::validation: return 2;
        case bl::errc::numeric: return 3;
        case bl::errc::budget: return 4;
    }
    return 3;
}

const char* category_name(const bl::error& e) {
    switch (e.category()) {
        case bl::errc::validation: return "validation";
        case bl::errc::numeric: return "numeric";
        case bl::errc::budget: return "budget";
    }
    return "numeric";
}

json complex_json(bl::cx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bl::validation_error("FileNotFound", "cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(bl::split(line, ','));
    }
    return rows;
}

bl::RationalCurve curve_from_flags(const std::string& curve_str, const std::string& legendre_str) {
    if (!legendre_str.empty()) return bl::RationalCurve::legendre(bl::parse_rational(legendre_str));
    if (curve_str.empty())
        throw bl::validation_error("BadInput", "provide --curve \"A=..,B=..\" or --legendre p/q");
    // "A=0,B=-2"
    mpq_class A = 0, B = 0;
    bool got_a = false, got_b = false;
    for (const auto& part : bl::split(curve_str, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw bl::validation_error("ParseError", "bad curve spec: " + curve_str);
        const std::string key = part.substr(0, eq), val = part.substr(eq + 1);
        if (key == "A" || key == "a") {
            A = bl::parse_rational(val);
            got_a = true;
        } else if (key == "B" || key == "b") {
            B = bl::parse_rational(val);
            got_b = true;
        } else {
            throw bl::validation_error("ParseError", "unknown curve key: " + key);
        }
    }
    if (!got_a || !got_b)
        throw bl::validation_error("ParseError", "curve spec needs both A and B");
    return bl::RationalCurve::short_form(A, B);
}

bl::RationalPoint point_from_string(const bl::RationalCurve& curve, const std::string& p_str,
                                    const std::string& x_str) {
    if (!p_str.empty()) {
        const auto cells = bl::split(p_str, ',');
        if (cells.size() != 2)
            throw bl::validation_error("ParseError", "point must be \"x,y\"");
        const auto P = bl::RationalPoint::affine(bl::parse_rational(cells[0]),
                                                 bl::parse_rational(cells[1]));
        if (!curve.contains(P))
            throw bl::validation_error("BadInput", "point is not on the curve");
        return P;
    }
    if (x_str.empty()) throw bl::validation_error("BadInput", "provide --P \"x,y\" or --x x");
    const mpq_class x = bl::parse_rational(x_str);
    const mpq_class y2 = curve.rhs(x);
    if (y2 < 0 || !mpz_perfect_square_p(y2.get_num().get_mpz_t()) ||
        !mpz_perfect_square_p(y2.get_den().get_mpz_t()))
        throw bl::validation_error("BadInput", "no rational point with this x-coordinate");
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), y2.get_num().get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), y2.get_den().get_mpz_t());
    return bl::RationalPoint::affine(x, mpq_class(sn, sd));
}

// --------------------------------------------------------------------------
// betti

struct BettiArgs {
    int g = 1;
    std::string Z = "i", w = "0", D;
    std::string xi_w, xi_Z, eta_w, eta_Z;
    bool scaling = false;
    long N = 2;
    int psd_samples = 20;
    unsigned seed = 0;
};

void run_betti(const BettiArgs& a, bl::Report& rep) {
    const Eigen::MatrixXcd Zm = bl::parse_complex_matrix(a.Z);
    if (Zm.rows() != a.g)
        throw bl::validation_error("BadDimension", "--Z does not match --g");
    const bl::SiegelPoint Z(Zm);

    Eigen::VectorXcd w = bl::parse_complex_vector(a.w);
    if (w.size() == 1 && a.g > 1) w = Eigen::VectorXcd::Constant(a.g, w[0]);
    if (w.size() != a.g) throw bl::validation_error("BadDimension", "--w does not match --g");

    bl::PolarizationType D = a.D.empty()
                                 ? bl::PolarizationType::principal(a.g)
                                 : bl::PolarizationType([&] {
                                       std::vector<long> d;
                                       for (const auto& s : bl::split(a.D, ',')) {
                                           try {
                                               d.push_back(std::stol(s));
                                           } catch (const std::exception&) {
                                               throw bl::validation_error(
                                                   "ParseError", "bad polarization entry: " + s);
                                           }
                                       }
                                       return d;
                                   }());

    const bl::BettiCoords c = bl::betti_coordinates(Z, w, D);
    const Eigen::VectorXcd w_back = bl::betti_to_fiber(Z, c, D);

    rep.results()["a"] = vector_json(c.a);
    rep.results()["b"] = vector_json(c.b);
    rep.results()["a_raw"] = vector_json(c.a_raw);
    rep.results()["b_raw"] = vector_json(c.b_raw);
    rep.results()["roundtrip_residual"] = (w_back - w).norm();

    // default tangent directions if none given
    Eigen::VectorXcd xw = Eigen::VectorXcd::Zero(a.g);
    xw[0] = 1.0;
    Eigen::MatrixXcd xZ = Eigen::MatrixXcd::Zero(a.g, a.g);
    if (!a.xi_w.empty()) xw = bl::parse_complex_vector(a.xi_w);
    if (!a.xi_Z.empty()) xZ = bl::parse_complex_matrix(a.xi_Z);
    const bl::TangentVector xi(xw, xZ);

    Eigen::VectorXcd ew = xw;
    Eigen::MatrixXcd eZ = xZ;
    if (!a.eta_w.empty()) ew = bl::parse_complex_vector(a.eta_w);
    if (!a.eta_Z.empty()) eZ = bl::parse_complex_matrix(a.eta_Z);
    const bl::TangentVector eta(ew, eZ);

    const bl::cx H = bl::betti_form_hermitian(Z, w, xi, eta);
    rep.results()["form"] = {{"H_xi_eta", complex_json(H)},
                             {"H_xi_xi", bl::betti_form_hermitian(Z, w, xi, xi).real()},
                             {"omega_xi_eta", bl::betti_form_omega(Z, w, xi, eta)}};

    // PSD verdict on sampled Gram matrices of H over random frames
    std::mt19937 rng(a.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto rand_tangent = [&] {
        Eigen::VectorXcd tw(a.g);
        Eigen::MatrixXcd tZ(a.g, a.g);
        for (int i = 0; i < a.g; ++i) tw[i] = bl::cx(U(rng), U(rng));
        for (int i = 0; i < a.g; ++i)
            for (int j = i; j < a.g; ++j) tZ(i, j) = tZ(j, i) = bl::cx(U(rng), U(rng));
        return bl::TangentVector(tw, tZ);
    };
    double worst = 0.0;
    for (int s = 0; s < a.psd_samples; ++s) {
        const int k = 3;
        std::vector<bl::TangentVector> frame;
        for (int i = 0; i < k; ++i) frame.push_back(rand_tangent());
        Eigen::MatrixXcd G(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                G(i, j) = bl::betti_form_hermitian(Z, w, frame[i], frame[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = std::max(es.eigenvalues().maxCoeff(), 0.0);
        if (hi > 0) worst = std::min(worst, lo / hi);
    }
    rep.results()["psd"] = {{"samples", a.psd_samples},
                            {"worst_min_over_max_eigenvalue", worst},
                            {"semi_positive", worst >= -1e-10}};

    if (a.scaling) {
        rep.results()["scaling"] = {{"N", a.N},
                                    {"ratio", bl::pullback_scaling(Z, w, xi, a.N)}};
    }
}

// --------------------------------------------------------------------------
// nondegeneracy

struct NondegArgs {
    std::string family = "legendre";
    std::string section = "const_x2";
    std::string lambda = "0.3";
    double step = 1e-4;
    double rank_tol = 1e-6;
};

void run_nondegeneracy(const NondegArgs& a, bl::Report& rep) {
    if (a.family != "legendre")
        throw bl::validation_error("BadInput", "unknown family: " + a.family);
    const bl::cx lam = bl::parse_complex(a.lambda);
    if (!bl::legendre_domain_ok(lam))
        throw bl::validation_error("BadInput", "lambda outside the configured scan domain");
    const bl::Chart chart = bl::make_legendre_chart(a.section, lam);
    const auto r = bl::numerical_betti_rank(chart, 2, Eigen::VectorXd::Zero(2),
                                            bl::PolarizationType::principal(1), a.step,
                                            a.rank_tol);
    rep.results()["rank"] = r.rank;
    rep.results()["rank_half_step"] = r.rank_half_step;
    rep.results()["step_stable"] = r.step_stable;
    rep.results()["singular_values"] = vector_json(r.singular_values);
    const auto& sv = r.singular_values;
    rep.results()["sigma_ratio"] = (sv.size() >= 2 && sv[0] > 0) ? sv[1] / sv[0] : 0.0;
}

// --------------------------------------------------------------------------
// height

struct HeightArgs {
    std::string curve, legendre, P, x;
    double tol = 1e-8;
    std::size_t digit_budget = 200000;
    bool paranoia = false;
    bool defect = false;
    double rescale = 1.0;
};

void run_height(const HeightArgs& a, bl::Report& rep) {
    const bl::RationalCurve curve = curve_from_flags(a.curve, a.legendre);
    const bl::RationalPoint P = point_from_string(curve, a.P, a.x);
    bl::TateOptions opt;
    opt.digit_budget = a.digit_budget;
    opt.paranoia = a.paranoia;
    const bl::HeightReport h = bl::tate_limit_height(curve, P, a.tol, opt);
    rep.results()["naive"] = h.naive;
    rep.results()["canonical"] = h.canonical;
    rep.results()["canonical_rescaled"] = h.canonical * a.rescale;
    rep.results()["error_estimate"] = h.error_estimate;
    rep.results()["iterations"] = h.iterations;
    rep.results()["base_height"] = h.base_height;
    rep.results()["torsion"] = h.torsion;
    rep.results()["divisor"] = h.divisor;
    rep.results()["rescale"] = a.rescale;
    rep.results()["iterates"] = h.iterates;
    rep.results()["differences"] = h.differences;
    if (a.paranoia) rep.results()["paranoia_ok"] = h.paranoia_ok;
    if (a.defect) {
        const auto [d, ratio] = bl::duplication_defect(curve, P, h.base_height);
        rep.results()["defect"] = {{"value", d}, {"ratio", ratio}};
    }
}

// --------------------------------------------------------------------------
// silverman-tate

struct StArgs {
    int grid = 50;
    std::string sections = "two_torsion_0,two_torsion_1,const_x2";
    double tol = 1e-5;
    std::size_t digit_budget = 200000;
};

void run_silverman_tate(const StArgs& a, bl::Report& rep) {
    if (a.grid < 1) throw bl::validation_error("BadInput", "grid must be positive");
    const auto grid = bl::default_scan_grid(a.grid);
    const auto sections = bl::split(a.sections, ',');
    bl::TateOptions opt;
    opt.digit_budget = a.digit_budget;
    const bl::ScanReport scan = bl::silverman_tate_scan(grid, sections, a.tol, opt);

    json rows = json::array();
    for (const auto& s : scan.samples) {
        rows.push_back({{"lambda", s.lambda.get_str()},
                        {"section", s.section},
                        {"canonical", s.canonical},
                        {"naive", s.naive},
                        {"ratio", s.ratio},
                        {"torsion", s.torsion}});
    }
    json skipped = json::array();
    for (const auto& [lam, why] : scan.skipped) skipped.push_back({{"lambda", lam}, {"reason", why}});
    json errs = json::array();
    for (const auto& [where, what] : scan.errors) errs.push_back({{"at", where}, {"message", what}});
    rep.results()["samples"] = rows;
    rep.results()["skipped"] = skipped;
    rep.results()["sample_errors"] = errs;
    rep.results()["sup_ratio"] = scan.sup_ratio;
    rep.results()["sup_ratio_first_half"] = scan.sup_ratio_first_half;
    rep.results()["stability"] = scan.stability();
    rep.results()["grid_size"] = grid.size();
}

// --------------------------------------------------------------------------
// siu

struct SiuArgs {
    std::string Fd = "0", MF = "0", c1, kappa, c;
    int d = 1;
    long N = 1;
};

void run_siu(const SiuArgs& a, bl::Report& rep) {
    if (!a.kappa.empty() || !a.c.empty()) {
        if (a.kappa.empty() || a.c.empty())
            throw bl::validation_error("BadInput", "--kappa and --c go together");
        const mpq_class c1 =
            bl::admissible_c1(bl::parse_rational(a.kappa), bl::parse_rational(a.c), a.d);
        rep.results()["admissible_c1"] = c1.get_str();
    }
    if (!a.c1.empty()) {
        const bool big = bl::siu_bigness_check(bl::parse_rational(a.Fd).get_num(),
                                               bl::parse_rational(a.MF).get_num(), a.d,
                                               bl::parse_rational(a.c1), a.N);
        rep.results()["big"] = big;
        rep.results()["inequality"] = "Fd > d*c1*N^2*MFd1";
    }
}

// --------------------------------------------------------------------------
// count subcommands

struct CoverArgs {
    std::string points, gram;
    double r = 1.0;
    double R = 0.0;   // 0: compute from the data
    int rho = 0;
};

void run_cover(const CoverArgs& a, bl::Report& rep) {
    const auto rows = read_csv(a.points);
    if (rows.empty()) throw bl::validation_error("BadInput", "no points in file");
    const int rho = a.rho > 0 ? a.rho : static_cast<int>(rows.front().size());
    std::vector<Eigen::VectorXd> pts;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != rho)
            throw bl::validation_error("BadInput", "point row has wrong arity");
        Eigen::VectorXd v(rho);
        for (int i = 0; i < rho; ++i) v[i] = bl::detail::parse_double(row[static_cast<std::size_t>(i)]);
        pts.push_back(std::move(v));
    }
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(rho, rho);
    if (!a.gram.empty()) {
        const auto grows = read_csv(a.gram);
        if (static_cast<int>(grows.size()) != rho)
            throw bl::validation_error("BadInput", "Gram matrix has wrong size");
        for (int i = 0; i < rho; ++i)
            for (int j = 0; j < rho; ++j)
                G(i, j) = bl::detail::parse_double(grows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    const bl::MWLattice lat(G);
    double R = a.R;
    if (R <= 0)
        for (const auto& p : pts) R = std::max(R, bl::nt_norm(lat, p));
    if (R <= 0) R = 1.0;
    const auto centers = bl::greedy_cover(pts, lat, a.r);
    rep.results()["count"] = centers.size();
    rep.results()["centers"] = centers;
    rep.results()["R"] = R;
    rep.results()["r"] = a.r;
    rep.results()["rho"] = rho;
    rep.results()["bound"] = bl::covering_bound(R, a.r, rho);
    rep.results()["within_bound"] = static_cast<double>(centers.size()) <=
                                    bl::covering_bound(R, a.r, rho) + 1e-9;
}

struct SplitArgs {
    std::string heights;
    double B = 0.0;
};

void run_split(const SplitArgs& a, bl::Report& rep) {
    const auto rows = read_csv(a.heights);
    std::vector<std::pair<std::string, double>> hs;
    for (const auto& row : rows) {
        if (row.size() != 2) throw bl::validation_error("BadInput", "rows must be id,hhat");
        hs.emplace_back(row[0], bl::detail::parse_double(row[1]));
    }
    const auto part = bl::split_small_large(hs, a.B);
    rep.results()["B"] = a.B;
    rep.results()["small"] = part.small;
    rep.results()["large"] = part.large;
}

struct DichotomyArgs {
    std::string curve, legendre, candidates, P;
    double c3 = 1.0;
    std::string c4 = "inf";
    double h_base = 0.0;
    double tol = 1e-6;
    std::size_t digit_budget = 200000;
};

void run_dichotomy(const DichotomyArgs& a, bl::Report& rep) {
    const bl::RationalCurve curve = curve_from_flags(a.curve, a.legendre);
    const bl::RationalPoint P = point_from_string(curve, a.P, "");
    std::vector<std::pair<std::string, bl::RationalPoint>> cands;
    for (const auto& row : read_csv(a.candidates)) {
        if (row.size() != 3)
            throw bl::validation_error("BadInput", "candidate rows must be id,x,y");
        cands.emplace_back(row[0], bl::RationalPoint::affine(bl::parse_rational(row[1]),
                                                             bl::parse_rational(row[2])));
        if (!curve.contains(cands.back().second))
            throw bl::validation_error("BadInput", "candidate " + row[0] + " not on curve");
    }
    std::optional<long> c4;
    if (a.c4 != "inf") {
        try {
            c4 = std::stol(a.c4);
        } catch (const std::exception&) {
            throw bl::validation_error("ParseError", "--c4 must be an integer or 'inf'");
        }
    }
    bl::TateOptions opt;
    opt.digit_budget = a.digit_budget;
    const auto r = bl::dichotomy_scan(curve, cands, P, a.c3, c4, a.h_base, a.tol, opt);
    rep.results()["label"] =
        r.label == bl::DichotomyLabel::AlternativeII ? "AlternativeII" : "ExceedsC4";
    rep.results()["count"] = r.count;
    rep.results()["threshold"] = r.threshold;
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"id", row.id},
                        {"hhat_diff", row.hhat_diff},
                        {"counted", row.counted},
                        {"torsion", row.torsion}});
    rep.results()["rows"] = rows;
    json errs = json::array();
    for (const auto& [id, what] : r.errors) errs.push_back({{"id", id}, {"message", what}});
    rep.results()["sample_errors"] = errs;
}

// --------------------------------------------------------------------------
// alon

struct AlonArgs {
    std::string system, sigma;
    int M = 1;
    std::string degC, degZ;
    std::uint64_t budget = 1000000;
};

std::vector<bl::MultiHomPoly> load_system(const std::string& path, int M) {
    std::ifstream in(path);
    if (!in) throw bl::validation_error("FileNotFound", "cannot open " + path);
    json j;
    in >> j;
    const int n = j.at("n").get<int>();
    const int fileM = j.at("M").get<int>();
    if (fileM != M && M != 1)
        throw bl::validation_error("BadInput", "system M does not match --M");
    std::vector<bl::MultiHomPoly> polys;
    for (const auto& jp : j.at("polys")) {
        bl::MultiHomPoly p;
        p.M = fileM;
        p.n = n;
        for (const auto& jt : jp) {
            bl::MultiHomTerm t;
            t.c = bl::parse_rational(jt.at("c").get<std::string>());
            for (const auto& blk : jt.at("e")) {
                std::vector<int> b;
                for (const auto& e : blk) b.push_back(e.get<int>());
                t.exps.push_back(std::move(b));
            }
            p.terms.push_back(std::move(t));
        }
        p.validate();
        polys.push_back(std::move(p));
    }
    return polys;
}

void run_alon(const AlonArgs& a, bl::Report& rep) {
    if (!a.degC.empty() && !a.degZ.empty()) {
        rep.results()["bound"] =
            bl::alon_bound(a.M, mpz_class(a.degC), mpz_class(a.degZ)).get_str();
    }
    if (!a.system.empty()) {
        if (a.sigma.empty())
            throw bl::validation_error("BadInput", "--system requires --sigma");
        const auto polys = load_system(a.system, a.M);
        const int M = polys.empty() ? a.M : polys.front().M;
        std::vector<bl::RationalProjectivePoint> sigma;
        for (const auto& row : read_csv(a.sigma)) {
            std::vector<mpz_class> coords;
            for (const auto& cell : row) coords.emplace_back(cell);
            sigma.emplace_back(std::move(coords));
        }
        rep.results()["not_contained"] = bl::alon_test(sigma, polys, M, a.budget);
        rep.results()["sigma_size"] = sigma.size();
        rep.results()["M"] = M;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bettilab: Betti maps and forms, canonical heights, intersection "
                 "bounds, and point-counting experiments"};
    app.set_config("--config");
    std::string format = "json";
    app.add_option("--format", format, "output format: json | csv | text")
        ->check(CLI::IsMember({"json", "csv", "text"}));

    BettiArgs ba;
    auto* betti = app.add_subcommand("betti", "Betti coordinates and Betti form");
    betti->add_option("--g", ba.g);
    betti->add_option("--Z", ba.Z);
    betti->add_option("--w", ba.w);
    betti->add_option("--D", ba.D);
    betti->add_option("--xi-w", ba.xi_w);
    betti->add_option("--xi-Z", ba.xi_Z);
    betti->add_option("--eta-w", ba.eta_w);
    betti->add_option("--eta-Z", ba.eta_Z);
    betti->add_flag("--scaling", ba.scaling);
    betti->add_option("--N", ba.N);
    betti->add_option("--psd-samples", ba.psd_samples);
    betti->add_option("--seed", ba.seed);

    NondegArgs na;
    auto* nondeg = app.add_subcommand("nondegeneracy", "numerical Betti rank of a section");
    nondeg->add_option("--family", na.family);
    nondeg->add_option("--section", na.section);
    nondeg->add_option("--lambda", na.lambda);
    nondeg->add_option("--step", na.step);
    nondeg->add_option("--rank-tol", na.rank_tol);

    HeightArgs ha;
    auto* height = app.add_subcommand("height", "Tate-limit canonical height");
    height->add_option("--curve", ha.curve);
    height->add_option("--legendre", ha.legendre);
    height->add_option("--P", ha.P);
    height->add_option("--x", ha.x);
    height->add_option("--tol", ha.tol);
    height->add_option("--digit-budget", ha.digit_budget);
    height->add_flag("--paranoia", ha.paranoia);
    height->add_flag("--defect", ha.defect);
    height->add_option("--rescale", ha.rescale);

    StArgs sa;
    auto* st = app.add_subcommand("silverman-tate", "ratio scan over the Legendre family");
    st->add_option("--grid", sa.grid);
    st->add_option("--sections", sa.sections);
    st->add_option("--tol", sa.tol);
    st->add_option("--digit-budget", sa.digit_budget);

    SiuArgs za;
    auto* siu = app.add_subcommand("siu", "Siu bigness inequality");
    siu->add_option("--Fd", za.Fd);
    siu->add_option("--MF", za.MF);
    siu->add_option("--d", za.d);
    siu->add_option("--N", za.N);
    siu->add_option("--c1", za.c1);
    siu->add_option("--kappa", za.kappa);
    siu->add_option("--c", za.c);

    auto* count = app.add_subcommand("count", "counting pipeline");
    CoverArgs ca;
    auto* cover = count->add_subcommand("cover", "greedy ball cover");
    cover->add_option("--points", ca.points)->required();
    cover->add_option("--gram", ca.gram);
    cover->add_option("--r", ca.r);
    cover->add_option("--R", ca.R);
    cover->add_option("--rho", ca.rho);
    SplitArgs spa;
    auto* splitc = count->add_subcommand("split", "small/large split");
    splitc->add_option("--heights", spa.heights)->required();
    splitc->add_option("--B", spa.B);
    struct {
        double c = 7.0;
        int rho = 0;
    } bnd;
    auto* boundc = count->add_subcommand("bound", "c^rho and c^(1+rho)");
    boundc->add_option("--c", bnd.c);
    boundc->add_option("--rho", bnd.rho);
    struct {
        int g = 2;
    } hur;
    auto* hurc = count->add_subcommand("hurwitz", "84(g-1) packet bound");
    hurc->add_option("--g", hur.g);
    DichotomyArgs da;
    auto* dich = count->add_subcommand("dichotomy", "alternative (ii) scan");
    dich->add_option("--curve", da.curve);
    dich->add_option("--legendre", da.legendre);
    dich->add_option("--candidates", da.candidates)->required();
    dich->add_option("--P", da.P)->required();
    dich->add_option("--c3", da.c3);
    dich->add_option("--c4", da.c4);
    dich->add_option("--h-base", da.h_base);
    dich->add_option("--tol", da.tol);
    dich->add_option("--digit-budget", da.digit_budget);

    AlonArgs aa;
    auto* alon = app.add_subcommand("alon", "product lemma test and bound");
    alon->add_option("--system", aa.system);
    alon->add_option("--sigma", aa.sigma);
    alon->add_option("--M", aa.M);
    alon->add_option("--degC", aa.degC);
    alon->add_option("--degZ", aa.degZ);
    alon->add_option("--budget", aa.budget);

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    std::string cmd_name;
    for (const auto* sc : app.get_subcommands()) cmd_name = sc->get_name();
    if (count->parsed())
        for (const auto* sc : count->get_subcommands()) cmd_name = "count " + sc->get_name();

    bl::Report rep(cmd_name);
    json& cfg = rep.config();
    cfg["format"] = format;

    try {
        if (betti->parsed()) {
            cfg["g"] = ba.g;
            cfg["Z"] = ba.Z;
            cfg["w"] = ba.w;
            cfg["D"] = ba.D.empty() ? "principal" : ba.D;
            cfg["N"] = ba.N;
            cfg["seed"] = ba.seed;
            cfg["psd_samples"] = ba.psd_samples;
            run_betti(ba, rep);
        } else if (nondeg->parsed()) {
            cfg["family"] = na.family;
            cfg["section"] = na.section;
            cfg["lambda"] = na.lambda;
            cfg["step"] = na.step;
            cfg["rank_tol"] = na.rank_tol;
            run_nondegeneracy(na, rep);
        } else if (height->parsed()) {
            cfg["curve"] = ha.curve;
            cfg["legendre"] = ha.legendre;
            cfg["P"] = ha.P;
            cfg["x"] = ha.x;
            cfg["tol"] = ha.tol;
            cfg["digit_budget"] = ha.digit_budget;
            cfg["rescale"] = ha.rescale;
            run_height(ha, rep);
        } else if (st->parsed()) {
            cfg["grid"] = sa.grid;
            cfg["sections"] = sa.sections;
            cfg["tol"] = sa.tol;
            cfg["digit_budget"] = sa.digit_budget;
            run_silverman_tate(sa, rep);
        } else if (siu->parsed()) {
            cfg["Fd"] = za.Fd;
            cfg["MF"] = za.MF;
            cfg["d"] = za.d;
            cfg["N"] = za.N;
            cfg["c1"] = za.c1;
            cfg["kappa"] = za.kappa;
            cfg["c"] = za.c;
            run_siu(za, rep);
        } else if (cover->parsed()) {
            cfg["points"] = ca.points;
            cfg["gram"] = ca.gram;
            cfg["r"] = ca.r;
            cfg["R"] = ca.R;
            run_cover(ca, rep);
        } else if (splitc->parsed()) {
            cfg["heights"] = spa.heights;
            cfg["B"] = spa.B;
            run_split(spa, rep);
        } else if (boundc->parsed()) {
            cfg["c"] = bnd.c;
            cfg["rho"] = bnd.rho;
            const auto [lg, total] = bl::vojta_large_bound(bnd.c, bnd.rho);
            rep.results()["large_bound"] = lg;
            rep.results()["assembled_bound"] = total;
        } else if (hurc->parsed()) {
            cfg["g"] = hur.g;
            rep.results()["bound"] = bl::hurwitz_packet_bound(hur.g);
        } else if (dich->parsed()) {
            cfg["curve"] = da.curve;
            cfg["legendre"] = da.legendre;
            cfg["candidates"] = da.candidates;
            cfg["P"] = da.P;
            cfg["c3"] = da.c3;
            cfg["c4"] = da.c4;
            cfg["h_base"] = da.h_base;
            cfg["tol"] = da.tol;
            run_dichotomy(da, rep);
        } else if (alon->parsed()) {
            cfg["system"] = aa.system;
            cfg["sigma"] = aa.sigma;
            cfg["M"] = aa.M;
            cfg["degC"] = aa.degC;
            cfg["degZ"] = aa.degZ;
            cfg["budget"] = aa.budget;
            run_alon(aa, rep);
        }
    } catch (const bl::error& e) {
        rep.add_error(e.code(), category_name(e), e.what());
        rep.emit(format, std::cout);
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        rep.add_error("Internal", "numeric", e.what());
        rep.emit(format, std::cout);
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    rep.emit(format, std::cout);
    return 0;
}
