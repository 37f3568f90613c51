#pragma once

#include "extrap/scalar_field.hpp"

#include <string>
#include <vector>

namespace extrap {

/// Built-in analytic test fields, sampled on their documented default grids
/// with the exact evaluator attached. Names:
///
///   1-dim: zsq, rez3, zquart, log1pzsq, negzsq, logdist22, logmax
///   2-dim: z1sq, z12sq, logz12, negz1sq, logdiag
ScalarField catalog_field(const std::string& name);

std::vector<std::string> catalog_field_names();

}  // namespace extrap
