#include "monocensus/serialize.hpp"

namespace monocensus {

using nlohmann::json;

json point_to_json(const PointVec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
    return arr;
}

PointVec point_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw FormatError(where + ": expected an array of [re, im] pairs");
    PointVec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& c = j[i];
        const std::string loc = where + "[" + std::to_string(i) + "]";
        if (c.is_number()) {
            v[static_cast<Eigen::Index>(i)] = {c.get<double>(), 0.0};
            continue;
        }
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
            throw FormatError(loc + ": expected [re, im]");
        v[static_cast<Eigen::Index>(i)] = {c[0].get<double>(), c[1].get<double>()};
    }
    if (!all_finite(v)) throw FormatError(where + ": non-finite coordinate");
    return v;
}

namespace {

json parse_document(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError("invalid JSON at byte " + std::to_string(e.byte));
    }
}

}  // namespace

json registry_to_json(const SolutionRegistry& reg) {
    json sols = json::array();
    for (const auto& x : reg.entries()) sols.push_back(point_to_json(x));
    return {{"base", point_to_json(reg.base())}, {"dedup_tol", reg.dedup_tol()}, {"solutions", std::move(sols)}};
}

SolutionRegistry registry_from_json(const ParameterizedSystem& sys, std::string_view text) {
    json doc = parse_document(text);
    if (!doc.is_object() || !doc.contains("base") || !doc.contains("solutions"))
        throw FormatError("registry needs \"base\" and \"solutions\"");
    PointVec base = point_from_json(doc.at("base"), "base");
    if (base.size() != sys.n_params()) throw FormatError("base: wrong number of parameters");
    double tol = 1e-6;
    if (doc.contains("dedup_tol")) {
        if (!doc.at("dedup_tol").is_number()) throw FormatError("dedup_tol: expected a number");
        tol = doc.at("dedup_tol").get<double>();
    }
    SolutionRegistry reg(std::move(base), tol);
    const json& sols = doc.at("solutions");
    if (!sols.is_array()) throw FormatError("solutions: expected an array");
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const std::string where = "solutions[" + std::to_string(i) + "]";
        PointVec x = point_from_json(sols[i], where);
        if (x.size() != sys.n_vars()) throw FormatError(where + ": wrong number of coordinates");
        try {
            reg.insert(sys, x);
        } catch (const ResidualError& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return reg;
}

UserSupplied seed_from_json(std::string_view text) {
    json doc = parse_document(text);
    if (!doc.is_object() || !doc.contains("x") || !doc.contains("p"))
        throw FormatError("seed solution needs \"x\" and \"p\"");
    return UserSupplied{point_from_json(doc.at("x"), "x"), point_from_json(doc.at("p"), "p")};
}

json certificate_to_json(const SlicedSystem& ss, const TraceCertificate& cert, const WitnessExtension* ext) {
    json centroids = json::array();
    json centroid_params = json::array();
    for (const auto& c : cert.centroids) {
        centroids.push_back(point_to_json(c));
        centroid_params.push_back(point_to_json(ss.parameter_of(c)));
    }
    json out = {
        {"slice",
         {{"p_star", point_to_json(ss.p_star)},
          {"direction", point_to_json(ss.direction)},
          {"lambda_coeffs", point_to_json(ss.lambda_coeffs)},
          {"lambda_const", {ss.lambda_const.real(), ss.lambda_const.imag()}}}},
        {"tau", cert.tau},
        {"t_values", {-cert.tau, 0.0, cert.tau}},
        {"centroids", std::move(centroids)},
        {"centroid_params", std::move(centroid_params)},
        {"residual", cert.residual},
        {"trace_tol", cert.trace_tol},
        {"verdict", std::string(to_string(cert.verdict))},
        {"fiber_count", cert.fiber_count},
        {"other_count", cert.other_count},
    };
    if (ext) {
        out["witness_size"] = ext->witness.points.size();
        out["witness_loops"] = ext->loops_run;
        out["lambda_rerolls"] = ext->lambda_rerolls;
        out["unregistered_fiber_points"] = ext->unregistered_fiber_points;
    }
    return out;
}

}  // namespace monocensus
