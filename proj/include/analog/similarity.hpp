#pragma once

#include <memory>
#include <optional>
#include <string>

namespace analog::oracle {

/// Text-pair similarity in [0,1]. A backend failure yields absent, which
/// callers must treat as "do not drop".
class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual std::optional<double> score(const std::string& a, const std::string& b) = 0;
  virtual std::string id() const = 0;
};

/// Deterministic lexical fallback: Jaccard overlap on lowercased tokens.
/// Symmetric, 1.0 on identical texts, dependency-free.
class LexicalSimilarity : public SimilarityBackend {
 public:
  std::optional<double> score(const std::string& a, const std::string& b) override;
  std::string id() const override { return "lexical-jaccard"; }
};

std::shared_ptr<SimilarityBackend> default_similarity();

}  // namespace analog::oracle
