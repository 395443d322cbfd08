#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "epida/seas.h"

namespace epida {

// One JSON object per line, keys in this order:
//   {"text", "label", "source_index", "s_div_raw", "s_qua_raw", "s_div", "s_qua", "s_tot"}
// Reals use 9 significant digits. Rows are ordered by source_index, keeping
// the incoming (selection rank) order within a source.
void export_augmented(std::span<const Candidate> candidates,
                      const std::vector<std::string>& labels, std::ostream& out);
void export_augmented(std::span<const Candidate> candidates,
                      const std::vector<std::string>& labels, const std::filesystem::path& path);

// Reads an export back; labels are resolved against `labels`.
std::vector<Candidate> load_augmented(const std::filesystem::path& path,
                                      const std::vector<std::string>& labels);

// printf("%.9g") with "-0" normalized to "0".
std::string format_real(double value);

}  // namespace epida
