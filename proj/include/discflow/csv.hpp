#pragma once

#include <string>
#include <vector>

namespace discflow {

/// Comma-separated table with a header row; floats at 17 significant digits so
/// values round-trip losslessly. The file is written to a temporary sibling
/// and atomically renamed into place.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);

} // namespace discflow
