#pragma once

#include <string>
#include <utility>
#include <vector>

#include "coexsim/interference.hpp"
#include "coexsim/psd.hpp"

namespace coexsim {

// Ordered key/value pairs embedded in every output file (tool version,
// resolved configuration, seed) so a run can be reproduced byte-identically.
using MetaList = std::vector<std::pair<std::string, std::string>>;

std::string format_double(double v);
double db10(double linear); // 10 log10, -inf for 0

// Generic CSV: "# key = value" comment lines, a mandatory header row, then
// newline-terminated data rows with '.' decimal separators.
void write_rows_csv(const std::string& path, const MetaList& meta,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

void write_rows_json(const std::string& path, const MetaList& meta,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

// InterferenceTable: CSV columns l, I_linear, I_db, stderr_db.
void write_interference_table_csv(const std::string& path, const InterferenceTable& table,
                                  const MetaList& extra = {});
void write_interference_table_json(const std::string& path, const InterferenceTable& table,
                                   const MetaList& extra = {});
MetaList interference_table_meta(const InterferenceTable& table);

// PsdEstimate: CSV columns freq_over_dF, psd_linear, psd_db.
void write_psd_csv(const std::string& path, const PsdEstimate& psd, const MetaList& extra = {});
void write_psd_json(const std::string& path, const PsdEstimate& psd, const MetaList& extra = {});

} // namespace coexsim
