#pragma once

// Small parsers for the CLI surface: complex literals of the form `a+bi`
// (optional signs, no spaces), exact rationals as `p/q` or decimal strings,
// and row-major matrices `z11,z12;z21,z22`.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cctype>
#include <complex>
#include <string>
#include <vector>

#include "error.hpp"

namespace bettilab {

namespace detail {

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw validation_error("ParseError", "not a number: '" + s + "'");
    }
    if (pos != s.size()) throw validation_error("ParseError", "trailing junk in number: '" + s + "'");
    return v;
}

} // namespace detail

// `a+bi`: e.g. "1.5", "i", "-i", "2i", "1+2i", "-1.5e-2+0.5i"
inline std::complex<double> parse_complex(const std::string& s) {
    if (s.empty()) throw validation_error("ParseError", "empty complex literal");
    // split at the last top-level +/- that is not an exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
            split = i;
    }
    auto parse_part = [](std::string t, bool imag_required) -> std::pair<double, bool> {
        bool imag = false;
        if (!t.empty() && (t.back() == 'i' || t.back() == 'I')) {
            imag = true;
            t.pop_back();
            if (t.empty() || t == "+") t = "1";
            else if (t == "-") t = "-1";
        }
        if (imag_required && !imag)
            throw validation_error("ParseError", "expected imaginary part");
        return {detail::parse_double(t), imag};
    };
    if (split == std::string::npos) {
        const auto [v, imag] = parse_part(s, false);
        return imag ? std::complex<double>(0, v) : std::complex<double>(v, 0);
    }
    const auto [re, re_imag] = parse_part(s.substr(0, split), false);
    if (re_imag) throw validation_error("ParseError", "two imaginary parts in '" + s + "'");
    const auto [im, im_imag] = parse_part(s.substr(split), false);
    if (!im_imag) throw validation_error("ParseError", "missing 'i' suffix in '" + s + "'");
    return {re, im};
}

// exact rational: "p/q", integer, or terminating decimal ("0.35" -> 7/20)
inline mpq_class parse_rational(const std::string& s) {
    if (s.empty()) throw validation_error("ParseError", "empty rational literal");
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const mpz_class den(s.substr(slash + 1));
            if (den == 0) throw validation_error("ParseError", "zero denominator in '" + s + "'");
            mpq_class q(mpz_class(s.substr(0, slash)), den);
            q.canonicalize();
            return q;
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) return mpq_class(mpz_class(s));
        const std::string ipart = s.substr(0, dot), fpart = s.substr(dot + 1);
        for (char ch : fpart)
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                throw validation_error("ParseError", "bad decimal: '" + s + "'");
        mpz_class den = 1;
        for (std::size_t i = 0; i < fpart.size(); ++i) den *= 10;
        const bool negative = !ipart.empty() && ipart[0] == '-';
        mpz_class ip = ipart.empty() || ipart == "-" || ipart == "+" ? mpz_class(0)
                                                                     : mpz_class(ipart);
        mpz_class num = abs(ip) * den + (fpart.empty() ? mpz_class(0) : mpz_class(fpart));
        if (negative) num = -num;
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw validation_error("ParseError", "bad rational: '" + s + "'");
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// "z11,z12;z21,z22" -> square complex matrix
inline Eigen::MatrixXcd parse_complex_matrix(const std::string& s) {
    const auto rows = split(s, ';');
    const auto n = rows.size();
    Eigen::MatrixXcd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cells = split(rows[i], ',');
        if (cells.size() != n)
            throw validation_error("ParseError", "matrix rows must all have length " +
                                                     std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)) =
            parse_complex(cells[j]);
    }
    return m;
}

inline Eigen::VectorXcd parse_complex_vector(const std::string& s) {
    const auto cells = split(s, ',');
    Eigen::VectorXcd v(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = parse_complex(cells[i]);
    return v;
}

} // namespace bettilab
