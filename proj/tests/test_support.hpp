#pragma once

#include <string>
#include <vector>

#include "monocensus/polysys.hpp"
#include "monocensus/rng.hpp"

namespace monocensus::testing {

inline PointVec vec(std::initializer_list<Complex> xs) {
    PointVec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (Complex x : xs) v[i++] = x;
    return v;
}

inline const char* kSquareRootJson = R"({
  "vars": ["x"], "params": ["p"],
  "polys": [[{"c": [1, 0], "v": {"x": 2}}, {"c": [-1, 0], "p": {"p": 1}}]]
})";

// (p + 1) x^2 - p, expanded.
inline const char* kTraceExampleJson = R"({
  "vars": ["x"], "params": ["p"],
  "polys": [[{"c": [1, 0], "v": {"x": 2}, "p": {"p": 1}},
             {"c": [1, 0], "v": {"x": 2}, "p": {}},
             {"c": [-1, 0], "v": {}, "p": {"p": 1}}]]
})";

inline ParameterizedSystem square_root_system() { return parse_system(kSquareRootJson); }
inline ParameterizedSystem trace_example_system() { return parse_system(kTraceExampleJson); }

/// All exponent vectors in n variables of total degree <= d.
inline std::vector<Exponents> monomials_up_to(int n, int d) {
    std::vector<Exponents> out;
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == n) {
            Exponents ex;
            for (int k = 0; k < n; ++k)
                if (e[static_cast<std::size_t>(k)] > 0) ex.emplace_back(k, e[static_cast<std::size_t>(k)]);
            out.push_back(ex);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            e[static_cast<std::size_t>(i)] = a;
            self(self, i + 1, left - a);
        }
        e[static_cast<std::size_t>(i)] = 0;
    };
    rec(rec, 0, d);
    return out;
}

/// Dense system whose every coefficient is its own parameter:
/// F_i = sum_a p_{i,a} x^a over |a| <= degrees[i].
inline ParameterizedSystem dense_coefficient_system(const std::vector<int>& degrees) {
    const int n = static_cast<int>(degrees.size());
    std::vector<std::string> vars, params;
    for (int i = 0; i < n; ++i) vars.push_back("x" + std::to_string(i + 1));
    std::vector<std::vector<Monomial>> polys;
    for (int i = 0; i < n; ++i) {
        std::vector<Monomial> terms;
        for (const auto& ex : monomials_up_to(n, degrees[static_cast<std::size_t>(i)])) {
            const int k = static_cast<int>(params.size());
            params.push_back("c" + std::to_string(i + 1) + "_" + std::to_string(k));
            terms.push_back({Complex{1.0, 0.0}, ex, {{k, 1}}});
        }
        polys.push_back(std::move(terms));
    }
    return ParameterizedSystem(vars, params, polys);
}

/// Random system with coefficients of modulus <= 1, mixed variable and
/// parameter exponents up to max_degree.
inline ParameterizedSystem random_system(Rng& rng, int n_vars, int n_params, int max_degree, int terms_per_poly) {
    std::vector<std::string> vars, params;
    for (int i = 0; i < n_vars; ++i) vars.push_back("x" + std::to_string(i));
    for (int i = 0; i < n_params; ++i) params.push_back("p" + std::to_string(i));
    std::vector<std::vector<Monomial>> polys;
    for (int i = 0; i < n_vars; ++i) {
        std::vector<Monomial> terms;
        for (int t = 0; t < terms_per_poly; ++t) {
            Monomial m;
            m.coefficient = std::polar(rng.uniform(), 6.283185307179586 * rng.uniform());
            for (int k = 0; k < n_vars; ++k) {
                int e = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_degree) + 1));
                if (e > 0) m.var_exponents.emplace_back(k, e);
            }
            for (int k = 0; k < n_params; ++k) {
                int e = static_cast<int>(rng.uniform_int(3));
                if (e > 0) m.param_exponents.emplace_back(k, e);
            }
            terms.push_back(std::move(m));
        }
        polys.push_back(std::move(terms));
    }
    return ParameterizedSystem(vars, params, polys);
}

}  // namespace monocensus::testing
