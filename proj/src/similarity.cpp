#include "analog/similarity.hpp"

#include <cctype>
#include <set>

#include "analog/value.hpp"

namespace analog::oracle {

namespace {

std::set<std::string> token_set(const std::string& text) {
  std::set<std::string> tokens;
  std::string current;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.insert(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.insert(current);
  return tokens;
}

}  // namespace

std::optional<double> LexicalSimilarity::score(const std::string& a, const std::string& b) {
  auto ta = token_set(a);
  auto tb = token_set(b);
  if (ta.empty() && tb.empty()) return 1.0;
  if (ta.empty() || tb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : ta) inter += tb.count(t);
  std::size_t uni = ta.size() + tb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::shared_ptr<SimilarityBackend> default_similarity() {
  return std::make_shared<LexicalSimilarity>();
}

}  // namespace analog::oracle
