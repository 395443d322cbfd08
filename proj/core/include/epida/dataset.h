#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "epida/lexicon.h"
#include "epida/text.h"

namespace epida {

enum class DatasetFormat { kTsv, kJsonl };

// "tsv" or "jsonl"; anything else is a ConfigError.
DatasetFormat parse_dataset_format(std::string_view name);
// Guesses from the file extension (.jsonl/.json -> jsonl, otherwise tsv).
DatasetFormat format_from_extension(const std::filesystem::path& path);

struct LabeledText {
  std::string text;
  std::size_t label = 0;
  std::size_t line = 0;  // 1-based source line, 0 when synthesized
};

struct Dataset {
  std::vector<LabeledText> samples;
  // Label strings in first-occurrence order; index = class id.
  std::vector<std::string> labels;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t classes() const noexcept { return labels.size(); }
  // Index of `label`, appending it to the vocabulary when new.
  std::size_t intern_label(const std::string& label);
  // Throws DomainError when the label is unknown.
  std::size_t label_index(std::string_view label) const;
};

// TSV: `label<TAB>text` per line. JSONL: objects with string "text" and a
// string or integer "label". Blank lines are skipped. Malformed lines raise
// ParseError carrying the line number. When `vocabulary` is given the label
// ids follow it and new labels are appended after it.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     const std::vector<std::string>* vocabulary = nullptr);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path, DatasetFormat format);

// Deterministic shuffle by seed, keep the first ceil(fraction * n) samples,
// restored to their original order. fraction must lie in (0, 1].
Dataset subsample(const Dataset& dataset, double fraction, std::uint64_t seed);

// Lowercases; drops URLs (scheme:// or www. prefixed), hashtags, numeric
// tokens and stopwords; removes apostrophes and turns other ASCII
// punctuation into spaces. An empty result becomes the single token
// "<empty>".
TokenizedText preprocess(std::string_view raw,
                         const StopwordList& stopwords = StopwordList::builtin());

inline constexpr std::string_view kEmptyToken = "<empty>";

}  // namespace epida
