#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "monocensus/types.hpp"

namespace monocensus {

/// Raised for malformed or inconsistent systems. `where()` names the offending
/// location in the input document (empty when not tied to one).
class SystemError : public std::runtime_error {
public:
    SystemError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// Sorted (index, exponent) pairs; exponents are strictly positive.
using Exponents = std::vector<std::pair<int, int>>;

struct Monomial {
    Complex coefficient;
    Exponents var_exponents;
    Exponents param_exponents;

    int var_degree() const;
    int param_degree() const;
};

struct Jacobians {
    ComplexMatrix wrt_vars;    // N x N
    ComplexMatrix wrt_params;  // N x P
};

/// F(x; p): N polynomials in N variables with coefficients polynomial in P
/// parameters. Immutable once built; all queries are safe to call concurrently.
class ParameterizedSystem {
public:
    /// Validates shape and indices, merges like terms and drops zero terms.
    ParameterizedSystem(std::vector<std::string> var_names, std::vector<std::string> param_names,
                        std::vector<std::vector<Monomial>> polynomials);

    int n_vars() const { return static_cast<int>(var_names_.size()); }
    int n_params() const { return static_cast<int>(param_names_.size()); }
    const std::vector<std::string>& var_names() const { return var_names_; }
    const std::vector<std::string>& param_names() const { return param_names_; }
    const std::vector<std::vector<Monomial>>& polynomials() const { return polys_; }
    std::size_t n_monomials() const;

    /// Total degree of polynomial i in the variables.
    int degree(int i) const;

    PointVec evaluate(const PointVec& x, const PointVec& p) const;
    Jacobians jacobian(const PointVec& x, const PointVec& p) const;

    /// Same system with every coefficient multiplied by c.
    ParameterizedSystem scaled(Complex c) const;

private:
    void check_lengths(const PointVec& x, const PointVec& p) const;

    std::vector<std::string> var_names_;
    std::vector<std::string> param_names_;
    std::vector<std::vector<Monomial>> polys_;
};

ParameterizedSystem parse_system(std::string_view json_text);
std::string serialize_system(const ParameterizedSystem& sys);

/// True if both systems hold the same monomials, ignoring term order.
bool same_terms(const ParameterizedSystem& a, const ParameterizedSystem& b);

}  // namespace monocensus
