#include "analog/question.hpp"

#include <atomic>
#include <stdexcept>

namespace analog::data {

const char* dataset_name(Dataset d) {
  switch (d) {
    case Dataset::StrategyQa: return "strategyqa";
    case Dataset::Gsm8k: return "gsm8k";
    case Dataset::Arc: return "arc";
    case Dataset::CsQa: return "csqa";
    case Dataset::HotpotQa: return "hotpotqa";
    case Dataset::Other: return "other";
  }
  return "other";
}

Dataset dataset_from_name(const std::string& name) {
  if (name == "strategyqa") return Dataset::StrategyQa;
  if (name == "gsm8k") return Dataset::Gsm8k;
  if (name == "arc") return Dataset::Arc;
  if (name == "csqa") return Dataset::CsQa;
  if (name == "hotpotqa") return Dataset::HotpotQa;
  return Dataset::Other;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Seen: return "seen";
    case Split::Unseen: return "unseen";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

Split split_from_name(const std::string& name) {
  if (name == "seen") return Split::Seen;
  if (name == "unseen") return Split::Unseen;
  if (name == "dev") return Split::Dev;
  if (name == "test") return Split::Test;
  return Split::Train;
}

namespace {
std::atomic<int> g_extraction_depth{0};
std::atomic<long long> g_gold_reads{0};
std::atomic<long long> g_violations{0};
}  // namespace

ExtractionScope::ExtractionScope() { ++g_extraction_depth; }
ExtractionScope::~ExtractionScope() { --g_extraction_depth; }
bool ExtractionScope::active() { return g_extraction_depth.load() > 0; }
long long ExtractionScope::gold_reads() { return g_gold_reads.load(); }
long long ExtractionScope::violations() { return g_violations.load(); }
void ExtractionScope::reset_counters() {
  g_gold_reads = 0;
  g_violations = 0;
}

const oracle::Answer& QuestionRecord::gold_for_eval() const {
  ++g_gold_reads;
  if (ExtractionScope::active()) {
    ++g_violations;
    throw std::logic_error("gold label read inside an extraction code path (question " + id + ")");
  }
  if (!gold_) throw std::logic_error("question " + id + " has no gold label");
  return *gold_;
}

}  // namespace analog::data
