#include "epida/lexicon.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "epida/errors.h"
#include "epida/text.h"

namespace epida {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Symmetric groups; every member is a synonym of every other member.
constexpr const char* kBuiltinLexicon = R"(# builtin synonym groups
happy glad joyful cheerful
sad unhappy gloomy sorrowful
wonderful grand marvelous terrific
good fine nice decent
bad poor awful terrible
great excellent superb
excited thrilled eager
mad angry furious
hot live
day daytime
work job labor
start begin commence
starting beginning
big large huge
small little tiny
fast quick rapid
slow sluggish
buy purchase
movie film picture
love adore
hate detest loathe
funny amusing humorous
boring dull tedious
smart clever bright
stupid dumb foolish
beautiful pretty lovely
ugly hideous
rich wealthy
easy simple
hard difficult tough
begin start
end finish conclude
show display exhibit
watch view observe
eat consume
four quadruplet
gold golden
happy felicitous
sunday sun
security protection
guard guardian
comes arrives
really truly genuinely
)";

// English function words (apostrophes already stripped by preprocessing).
constexpr const char* kBuiltinStopwords[] = {
    "a", "about", "above", "after", "again", "against", "ain", "all", "am", "an",
    "and", "any", "are", "aren", "arent", "as", "at", "be", "because", "been",
    "before", "being", "below", "between", "both", "but", "by", "can", "couldn",
    "couldnt", "d", "did", "didn", "didnt", "do", "does", "doesn", "doesnt", "doing",
    "don", "dont", "down", "during", "each", "few", "for", "from", "further", "had",
    "hadn", "hadnt", "has", "hasn", "hasnt", "have", "haven", "havent", "having", "he",
    "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "im",
    "in", "into", "is", "isn", "isnt", "it", "its", "itself", "just", "ll", "m", "ma",
    "me", "mightn", "more", "most", "mustn", "my", "myself", "needn", "no", "nor",
    "not", "now", "o", "of", "off", "on", "once", "only", "or", "other", "our", "ours",
    "ourselves", "out", "over", "own", "re", "s", "same", "shan", "she", "shes",
    "should", "shouldn", "so", "some", "such", "t", "than", "that", "thats", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
    "those", "through", "to", "too", "under", "until", "up", "ve", "very", "was",
    "wasn", "we", "were", "weren", "what", "when", "where", "which", "while", "who",
    "whom", "why", "will", "with", "won", "wouldn", "y", "you", "youd", "youll",
    "youre", "youve", "your", "yours", "yourself", "yourselves"};

const std::vector<std::string> kNoSynonyms;

}  // namespace

SynonymLexicon SynonymLexicon::parse(std::string_view contents, std::string_view source) {
  SynonymLexicon lex;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto words = split_whitespace(line);
    if (words.empty() || words.front().starts_with('#')) continue;
    if (words.size() < 2) {
      throw ParseError(std::string(source), line_no, "synonym group needs a headword and at least one synonym");
    }
    std::vector<std::string> synonyms(words.begin() + 1, words.end());
    lex.add(words.front(), synonyms);
  }
  return lex;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

const SynonymLexicon& SynonymLexicon::builtin() {
  static const SynonymLexicon lex = [] {
    SynonymLexicon out;
    std::istringstream in{std::string(kBuiltinLexicon)};
    std::string line;
    while (std::getline(in, line)) {
      auto words = split_whitespace(line);
      if (words.size() < 2 || words.front().starts_with('#')) continue;
      out.add_group(words);
    }
    return out;
  }();
  return lex;
}

void SynonymLexicon::add(std::string_view headword, const std::vector<std::string>& synonyms) {
  const std::string head = to_lower_ascii(headword);
  auto& list = entries_[head];
  for (const auto& s : synonyms) {
    std::string word = to_lower_ascii(s);
    if (word == head) continue;
    auto pos = std::lower_bound(list.begin(), list.end(), word);
    if (pos == list.end() || *pos != word) list.insert(pos, std::move(word));
  }
  if (list.empty()) entries_.erase(head);
}

void SynonymLexicon::add_group(const std::vector<std::string>& words) {
  for (const auto& w : words) add(w, words);
}

const std::vector<std::string>& SynonymLexicon::lookup(std::string_view word) const {
  auto it = entries_.find(to_lower_ascii(word));
  return it == entries_.end() ? kNoSynonyms : it->second;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::istringstream in{read_file(path)};
  std::set<std::string, std::less<>> words;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = split_whitespace(line);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    words.insert(to_lower_ascii(tokens.front()));
  }
  return StopwordList(std::move(words));
}

const StopwordList& StopwordList::builtin() {
  static const StopwordList list(
      std::set<std::string, std::less<>>(std::begin(kBuiltinStopwords), std::end(kBuiltinStopwords)));
  return list;
}

bool StopwordList::contains(std::string_view word) const {
  return words_.find(to_lower_ascii(word)) != words_.end();
}

}  // namespace epida
