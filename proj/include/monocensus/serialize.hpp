#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "monocensus/monodromy.hpp"
#include "monocensus/tracetest.hpp"

namespace monocensus {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// [[re, im], ...]
nlohmann::json point_to_json(const PointVec& v);
PointVec point_from_json(const nlohmann::json& j, const std::string& where);

/// {"base": [[re, im], ...], "dedup_tol": d, "solutions": [[[re, im], ...], ...]}
nlohmann::json registry_to_json(const SolutionRegistry& reg);
/// Rebuilds the registry by inserting every listed solution in order, so the
/// residual and deduplication checks are applied to imported data.
SolutionRegistry registry_from_json(const ParameterizedSystem& sys, std::string_view text);

/// {"x": [[re, im], ...], "p": [[re, im], ...]}
UserSupplied seed_from_json(std::string_view text);

nlohmann::json certificate_to_json(const SlicedSystem& ss, const TraceCertificate& cert,
                                   const WitnessExtension* ext = nullptr);

}  // namespace monocensus
