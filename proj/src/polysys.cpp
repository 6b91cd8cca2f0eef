#include "monocensus/polysys.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

namespace monocensus {

namespace {

Complex ipow(Complex base, int e) {
    Complex r{1.0, 0.0};
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

int total(const Exponents& ex) {
    int d = 0;
    for (auto [i, e] : ex) d += e;
    return d;
}

Exponents normalized(Exponents ex, int bound, const std::string& where, const char* what) {
    std::map<int, int> acc;
    for (auto [i, e] : ex) {
        if (i < 0 || i >= bound) throw SystemError(where, std::string(what) + " index out of range");
        if (e < 0) throw SystemError(where, "negative exponent");
        acc[i] += e;
    }
    Exponents out;
    for (auto [i, e] : acc)
        if (e > 0) out.emplace_back(i, e);
    return out;
}

std::string poly_where(std::size_t i, std::size_t j) {
    return "polys[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

}  // namespace

int Monomial::var_degree() const { return total(var_exponents); }
int Monomial::param_degree() const { return total(param_exponents); }

ParameterizedSystem::ParameterizedSystem(std::vector<std::string> var_names,
                                         std::vector<std::string> param_names,
                                         std::vector<std::vector<Monomial>> polynomials)
    : var_names_(std::move(var_names)), param_names_(std::move(param_names)) {
    if (var_names_.empty()) throw SystemError("vars", "system needs at least one variable");
    if (polynomials.size() != var_names_.size())
        throw SystemError("polys", "non-square system: " + std::to_string(polynomials.size()) +
                                       " polynomials in " + std::to_string(var_names_.size()) +
                                       " variables");
    std::set<std::string> seen;
    for (const auto& n : var_names_)
        if (n.empty() || !seen.insert(n).second) throw SystemError("vars", "duplicate or empty name '" + n + "'");
    for (const auto& n : param_names_)
        if (n.empty() || !seen.insert(n).second) throw SystemError("params", "duplicate or empty name '" + n + "'");

    const int nv = n_vars();
    const int np = n_params();
    polys_.reserve(polynomials.size());
    for (std::size_t i = 0; i < polynomials.size(); ++i) {
        // Like terms are merged so the stored form is canonical.
        std::map<std::pair<Exponents, Exponents>, Complex> terms;
        for (std::size_t j = 0; j < polynomials[i].size(); ++j) {
            const Monomial& m = polynomials[i][j];
            const std::string where = poly_where(i, j);
            if (!std::isfinite(m.coefficient.real()) || !std::isfinite(m.coefficient.imag()))
                throw SystemError(where, "non-finite coefficient");
            auto v = normalized(m.var_exponents, nv, where, "variable");
            auto p = normalized(m.param_exponents, np, where, "parameter");
            terms[{std::move(v), std::move(p)}] += m.coefficient;
        }
        std::vector<Monomial> poly;
        for (auto& [key, c] : terms)
            if (c != Complex{0.0, 0.0}) poly.push_back({c, key.first, key.second});
        polys_.push_back(std::move(poly));
    }
}

std::size_t ParameterizedSystem::n_monomials() const {
    std::size_t n = 0;
    for (const auto& p : polys_) n += p.size();
    return n;
}

int ParameterizedSystem::degree(int i) const {
    int d = 0;
    for (const auto& m : polys_.at(static_cast<std::size_t>(i))) d = std::max(d, m.var_degree());
    return d;
}

void ParameterizedSystem::check_lengths(const PointVec& x, const PointVec& p) const {
    if (x.size() != n_vars())
        throw SystemError("", "point has " + std::to_string(x.size()) + " coordinates, expected " +
                                  std::to_string(n_vars()));
    if (p.size() != n_params())
        throw SystemError("", "parameter has " + std::to_string(p.size()) + " coordinates, expected " +
                                  std::to_string(n_params()));
}

PointVec ParameterizedSystem::evaluate(const PointVec& x, const PointVec& p) const {
    check_lengths(x, p);
    PointVec f = PointVec::Zero(n_vars());
    for (std::size_t i = 0; i < polys_.size(); ++i) {
        Complex acc{0.0, 0.0};
        for (const auto& m : polys_[i]) {
            Complex t = m.coefficient;
            for (auto [k, e] : m.var_exponents) t *= ipow(x[k], e);
            for (auto [k, e] : m.param_exponents) t *= ipow(p[k], e);
            acc += t;
        }
        f[static_cast<Eigen::Index>(i)] = acc;
    }
    return f;
}

Jacobians ParameterizedSystem::jacobian(const PointVec& x, const PointVec& p) const {
    check_lengths(x, p);
    Jacobians jac{ComplexMatrix::Zero(n_vars(), n_vars()), ComplexMatrix::Zero(n_vars(), n_params())};

    std::vector<Complex> factors;
    for (std::size_t i = 0; i < polys_.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        for (const auto& m : polys_[i]) {
            const std::size_t nv = m.var_exponents.size();
            factors.clear();
            for (auto [k, e] : m.var_exponents) factors.push_back(ipow(x[k], e));
            for (auto [k, e] : m.param_exponents) factors.push_back(ipow(p[k], e));

            // d/dz_j of c * prod_k z_k^e_k, without dividing by z_j.
            auto partial = [&](std::size_t j, Complex z, int e) {
                Complex t = m.coefficient * static_cast<double>(e) * ipow(z, e - 1);
                for (std::size_t k = 0; k < factors.size(); ++k)
                    if (k != j) t *= factors[k];
                return t;
            };
            for (std::size_t j = 0; j < nv; ++j) {
                auto [k, e] = m.var_exponents[j];
                jac.wrt_vars(row, k) += partial(j, x[k], e);
            }
            for (std::size_t j = 0; j < m.param_exponents.size(); ++j) {
                auto [k, e] = m.param_exponents[j];
                jac.wrt_params(row, k) += partial(nv + j, p[k], e);
            }
        }
    }
    return jac;
}

ParameterizedSystem ParameterizedSystem::scaled(Complex c) const {
    auto polys = polys_;
    for (auto& poly : polys)
        for (auto& m : poly) m.coefficient *= c;
    return ParameterizedSystem(var_names_, param_names_, std::move(polys));
}

bool same_terms(const ParameterizedSystem& a, const ParameterizedSystem& b) {
    if (a.var_names() != b.var_names() || a.param_names() != b.param_names()) return false;
    // Stored terms are canonical (sorted, merged), so positional comparison suffices.
    const auto& pa = a.polynomials();
    const auto& pb = b.polynomials();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (pa[i].size() != pb[i].size()) return false;
        for (std::size_t j = 0; j < pa[i].size(); ++j) {
            const auto& ma = pa[i][j];
            const auto& mb = pb[i][j];
            if (ma.coefficient != mb.coefficient || ma.var_exponents != mb.var_exponents ||
                ma.param_exponents != mb.param_exponents)
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// JSON schema:
//   {"vars": [...], "params": [...],
//    "polys": [[{"c": [re, im], "v": {"x": 2}, "p": {"a": 1}}, ...], ...]}

namespace {

using nlohmann::json;

std::vector<std::string> read_names(const json& doc, const char* key, bool required) {
    std::vector<std::string> names;
    if (!doc.contains(key)) {
        if (required) throw SystemError(key, "missing key");
        return names;
    }
    const json& arr = doc.at(key);
    if (!arr.is_array()) throw SystemError(key, "expected an array of names");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string())
            throw SystemError(std::string(key) + "[" + std::to_string(i) + "]", "expected a string");
        names.push_back(arr[i].get<std::string>());
    }
    return names;
}

Exponents read_exponents(const json& obj, const std::map<std::string, int>& index, const std::string& where,
                         const char* what) {
    if (!obj.is_object()) throw SystemError(where, "expected an object of exponents");
    Exponents ex;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string loc = where + "." + it.key();
        auto found = index.find(it.key());
        if (found == index.end()) throw SystemError(loc, std::string("unknown ") + what + " '" + it.key() + "'");
        if (!it.value().is_number_integer()) throw SystemError(loc, "exponent must be an integer");
        auto e = it.value().get<long long>();
        if (e < 0) throw SystemError(loc, "negative exponent");
        if (e > 1'000'000) throw SystemError(loc, "exponent too large");
        ex.emplace_back(found->second, static_cast<int>(e));
    }
    return ex;
}

Complex read_coefficient(const json& c, const std::string& where) {
    if (c.is_number()) return {c.get<double>(), 0.0};
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
        throw SystemError(where, "coefficient must be [re, im]");
    return {c[0].get<double>(), c[1].get<double>()};
}

}  // namespace

ParameterizedSystem parse_system(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SystemError("byte " + std::to_string(e.byte), "invalid JSON");
    }
    if (!doc.is_object()) throw SystemError("", "top level must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "vars" && it.key() != "params" && it.key() != "polys")
            throw SystemError(it.key(), "unexpected key");

    auto vars = read_names(doc, "vars", true);
    auto params = read_names(doc, "params", false);
    std::map<std::string, int> var_index, param_index;
    for (std::size_t i = 0; i < vars.size(); ++i) var_index[vars[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < params.size(); ++i) param_index[params[i]] = static_cast<int>(i);

    if (!doc.contains("polys")) throw SystemError("polys", "missing key");
    const json& polys_json = doc.at("polys");
    if (!polys_json.is_array()) throw SystemError("polys", "expected an array of polynomials");

    std::vector<std::vector<Monomial>> polys;
    for (std::size_t i = 0; i < polys_json.size(); ++i) {
        const json& poly = polys_json[i];
        if (!poly.is_array()) throw SystemError("polys[" + std::to_string(i) + "]", "expected an array of terms");
        std::vector<Monomial> terms;
        for (std::size_t j = 0; j < poly.size(); ++j) {
            const json& term = poly[j];
            const std::string where = poly_where(i, j);
            if (!term.is_object()) throw SystemError(where, "expected a term object");
            for (auto it = term.begin(); it != term.end(); ++it)
                if (it.key() != "c" && it.key() != "v" && it.key() != "p")
                    throw SystemError(where + "." + it.key(), "unexpected key");
            if (!term.contains("c")) throw SystemError(where + ".c", "missing coefficient");
            Monomial m;
            m.coefficient = read_coefficient(term.at("c"), where + ".c");
            if (term.contains("v")) m.var_exponents = read_exponents(term.at("v"), var_index, where + ".v", "variable");
            if (term.contains("p"))
                m.param_exponents = read_exponents(term.at("p"), param_index, where + ".p", "parameter");
            terms.push_back(std::move(m));
        }
        polys.push_back(std::move(terms));
    }
    return ParameterizedSystem(std::move(vars), std::move(params), std::move(polys));
}

std::string serialize_system(const ParameterizedSystem& sys) {
    json doc;
    doc["vars"] = sys.var_names();
    doc["params"] = sys.param_names();
    json polys = json::array();
    for (const auto& poly : sys.polynomials()) {
        json terms = json::array();
        for (const auto& m : poly) {
            json v = json::object();
            json p = json::object();
            for (auto [k, e] : m.var_exponents) v[sys.var_names()[static_cast<std::size_t>(k)]] = e;
            for (auto [k, e] : m.param_exponents) p[sys.param_names()[static_cast<std::size_t>(k)]] = e;
            terms.push_back({{"c", {m.coefficient.real(), m.coefficient.imag()}}, {"v", v}, {"p", p}});
        }
        polys.push_back(std::move(terms));
    }
    doc["polys"] = std::move(polys);
    return doc.dump(2);
}

}  // namespace monocensus
