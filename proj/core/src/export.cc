#include "epida/export.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "epida/errors.h"
#include "json.hpp"

namespace epida {

using nlohmann::json;

std::string format_real(double value) {
  if (!std::isfinite(value)) throw DomainError("cannot export a non-finite score");
  if (value == 0.0) value = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void export_augmented(std::span<const Candidate> candidates,
                      const std::vector<std::string>& labels, std::ostream& out) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].source_index < candidates[b].source_index;
  });
  for (std::size_t i : order) {
    const Candidate& c = candidates[i];
    if (c.label >= labels.size()) throw DomainError("candidate label outside vocabulary");
    const auto quote = [](const std::string& s) {
      return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
    };
    out << "{\"text\":" << quote(c.text.canonical()) << ",\"label\":" << quote(labels[c.label])
        << ",\"source_index\":" << c.source_index << ",\"s_div_raw\":" << format_real(c.s_div_raw)
        << ",\"s_qua_raw\":" << format_real(c.s_qua_raw) << ",\"s_div\":" << format_real(c.s_div)
        << ",\"s_qua\":" << format_real(c.s_qua) << ",\"s_tot\":" << format_real(c.s_tot)
        << "}\n";
  }
}

void export_augmented(std::span<const Candidate> candidates,
                      const std::vector<std::string>& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  export_augmented(candidates, labels, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Candidate> load_augmented(const std::filesystem::path& path,
                                      const std::vector<std::string>& labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string source = path.string();
  std::vector<Candidate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json obj = json::parse(line);
      Candidate c;
      c.text = TokenizedText::from_string(obj.at("text").get<std::string>());
      const auto label = obj.at("label").get<std::string>();
      auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) throw ParseError(source, line_no, "unknown label '" + label + "'");
      c.label = static_cast<std::size_t>(it - labels.begin());
      c.source_index = obj.at("source_index").get<std::size_t>();
      c.s_div_raw = obj.at("s_div_raw").get<double>();
      c.s_qua_raw = obj.at("s_qua_raw").get<double>();
      c.s_div = obj.at("s_div").get<double>();
      c.s_qua = obj.at("s_qua").get<double>();
      c.s_tot = obj.at("s_tot").get<double>();
      out.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return out;
}

}  // namespace epida
