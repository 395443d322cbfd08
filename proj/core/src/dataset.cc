#include "epida/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "epida/errors.h"
#include "json.hpp"

namespace epida {
namespace {

using nlohmann::json;

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char ch) { return std::isspace(ch) != 0; });
}

bool is_url(std::string_view tok) {
  return tok.find("://") != std::string_view::npos || tok.starts_with("www.");
}

bool all_digits(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(),
                                     [](unsigned char ch) { return std::isdigit(ch) != 0; });
}

}  // namespace

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "tsv") return DatasetFormat::kTsv;
  if (name == "jsonl") return DatasetFormat::kJsonl;
  throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected tsv or jsonl)");
}

DatasetFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = to_lower_ascii(path.extension().string());
  return (ext == ".jsonl" || ext == ".json") ? DatasetFormat::kJsonl : DatasetFormat::kTsv;
}

std::size_t Dataset::intern_label(const std::string& label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it != labels.end()) return static_cast<std::size_t>(it - labels.begin());
  labels.push_back(label);
  return labels.size() - 1;
}

std::size_t Dataset::label_index(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DomainError("unknown label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     const std::vector<std::string>* vocabulary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  const std::string source = path.string();

  Dataset ds;
  if (vocabulary) ds.labels = *vocabulary;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    std::string label, text;
    if (format == DatasetFormat::kTsv) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(source, line_no, "expected label<TAB>text");
      label = line.substr(0, tab);
      text = line.substr(tab + 1);
      if (label.empty()) throw ParseError(source, line_no, "empty label");
    } else {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
      }
      if (!obj.is_object()) throw ParseError(source, line_no, "expected a JSON object");
      auto t = obj.find("text");
      if (t == obj.end() || !t->is_string()) {
        throw ParseError(source, line_no, "missing string field \"text\"");
      }
      auto l = obj.find("label");
      if (l == obj.end()) throw ParseError(source, line_no, "missing field \"label\"");
      if (l->is_string()) {
        label = l->get<std::string>();
      } else if (l->is_number_integer()) {
        label = std::to_string(l->get<long long>());
      } else {
        throw ParseError(source, line_no, "field \"label\" must be a string or integer");
      }
      text = t->get<std::string>();
    }
    ds.samples.push_back(LabeledText{std::move(text), ds.intern_label(label), line_no});
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path,
                   DatasetFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset " + path.string());
  for (const auto& s : dataset.samples) {
    const std::string& label = dataset.labels.at(s.label);
    if (format == DatasetFormat::kTsv) {
      if (s.text.find_first_of("\t\n") != std::string::npos) {
        throw DomainError("text contains a tab or newline and cannot be written as TSV");
      }
      out << label << '\t' << s.text << '\n';
    } else {
      json obj = {{"text", s.text}, {"label", label}};
      out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("data fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  const std::size_t n = dataset.size();
  const auto keep = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  Dataset out;
  out.labels = dataset.labels;
  for (std::size_t i : order) out.samples.push_back(dataset.samples[i]);
  return out;
}

TokenizedText preprocess(std::string_view raw, const StopwordList& stopwords) {
  std::vector<std::string> tokens;
  for (auto& word : split_whitespace(to_lower_ascii(raw))) {
    if (word == kEmptyToken) {
      tokens.push_back(word);
      continue;
    }
    if (is_url(word) || word.starts_with('#')) continue;
    std::string cleaned;
    cleaned.reserve(word.size());
    for (char ch : word) {
      const auto uch = static_cast<unsigned char>(ch);
      if (ch == '\'') continue;
      cleaned.push_back(uch < 0x80 && std::ispunct(uch) ? ' ' : ch);
    }
    for (auto& piece : split_whitespace(cleaned)) {
      if (all_digits(piece) || stopwords.contains(piece)) continue;
      tokens.push_back(std::move(piece));
    }
  }
  if (tokens.empty()) tokens.emplace_back(kEmptyToken);
  TokenizedText out;
  out.tokens = std::move(tokens);
  out.original = std::string(raw);
  return out;
}

}  // namespace epida
