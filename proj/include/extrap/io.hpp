#pragma once

#include "extrap/certify.hpp"
#include "extrap/metric_family.hpp"
#include "extrap/scalar_field.hpp"

#include <string>

namespace extrap {

// Scalar fields as CSV grid files:
//   # extrap field v1
//   dims,<1|2>
//   axis,<origin>,<spacing>,<count>     (one line per real axis)
//   values
//   <one value per line, row-major, first axis slowest; "-inf" allowed>
ScalarField load_field_csv(const std::string& path);
void save_field_csv(const ScalarField& field, const std::string& path);

// Grid-sampled metric families as CSV:
//   # extrap metric family v1
//   rank,<k>
//   re_invariant,<0|1>
//   axis,<origin>,<spacing>,<count>     (Re s, then Im s)
//   values
//   <k*k complex entries per node as re,im pairs on one line, row-major>
// Entries interpolate bilinearly; min_step is pinned to twice the spacing.
HermitianMetricFamily load_metric_family_csv(const std::string& path);

// Scenario configuration (JSON). Parse errors carry line/column.
ExtensionScenario scenario_from_json_text(const std::string& text,
                                          const std::string& origin);
ExtensionScenario load_scenario_json(const std::string& path);

// Outputs: report.json, tables/*.csv, and two-column plot data. All numeric
// formatting is fixed ("%.17g") so identical runs produce identical bytes.
void write_extension_outputs(const ExtensionReport& report,
                             const std::string& out_dir);
void write_prop41_outputs(const Prop41Table& table, const std::string& out_dir);
std::string report_to_json(const ExtensionReport& report);

}  // namespace extrap
