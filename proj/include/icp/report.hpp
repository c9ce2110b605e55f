#pragma once

#include <string>
#include <vector>

#include "icp/evaluation.hpp"

namespace icp {

// Raw per-(dataset, ncf, epsilon) mean errors; columns dataset,epsilon,IP,IP_M,M.
void write_validity_csv(const std::string& path, const std::vector<ValidityRow>& rows);

// Markdown report: validity tables rounded to 2 decimals plus the pairwise
// comparison matrices (+/- above the 2% threshold, * for t-test significance).
void write_matrices_report(const std::string& path, const std::vector<FoldResult>& results,
                           const std::vector<DatasetInfo>& datasets);

} // namespace icp
