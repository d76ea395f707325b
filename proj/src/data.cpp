#include "analog/data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "analog/parser.hpp"

namespace analog::data {

using nlohmann::json;

const char* SupervisionInstance::origin_name(Origin o) {
  switch (o) {
    case Origin::Seed: return "seed";
    case Origin::ConceptQ2P: return "conceptualization_q2p";
    case Origin::ConceptAq2P: return "conceptualization_aq2p";
    case Origin::Simplification: return "simplification";
  }
  return "seed";
}

json SupervisionInstance::to_json() const {
  return {{"task", oracle::task_name(task)},
          {"input", input_text},
          {"target", target_text},
          {"origin", origin_name(origin)},
          {"origin_question_id", origin_question_id},
          {"provenance", provenance}};
}

SupervisionInstance SupervisionInstance::from_json(const json& j) {
  SupervisionInstance inst;
  auto task = oracle::task_from_name(j.at("task").get<std::string>());
  if (!task) throw std::runtime_error("unknown task id: " + j.at("task").get<std::string>());
  inst.task = *task;
  inst.input_text = j.at("input").get<std::string>();
  inst.target_text = j.at("target").get<std::string>();
  std::string origin = j.value("origin", "seed");
  if (origin == "conceptualization_q2p")
    inst.origin = Origin::ConceptQ2P;
  else if (origin == "conceptualization_aq2p")
    inst.origin = Origin::ConceptAq2P;
  else if (origin == "simplification")
    inst.origin = Origin::Simplification;
  else
    inst.origin = Origin::Seed;
  inst.origin_question_id = j.value("origin_question_id", "");
  inst.provenance = j.value("provenance", "");
  return inst;
}

namespace {

std::optional<oracle::Answer> gold_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>() ? oracle::Answer::yes() : oracle::Answer::no();
  if (j.is_number()) return oracle::Answer::number(j.get<double>());
  if (j.is_string()) {
    std::string s = lower_copy(trim_copy(j.get<std::string>()));
    if (s == "yes" || s == "true") return oracle::Answer::yes();
    if (s == "no" || s == "false") return oracle::Answer::no();
    if (auto v = oracle::parse_number(s)) return oracle::Answer::number(*v);
  }
  return std::nullopt;
}

dsl::ParameterBinding binding_from_json(const json& j) {
  dsl::ParameterBinding binding;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& v = it.value();
    if (v.is_boolean())
      binding.emplace(it.key(), Value::boolean(v.get<bool>()));
    else if (v.is_number_integer())
      binding.emplace(it.key(), Value::integer(v.get<long long>()));
    else if (v.is_number_float())
      binding.emplace(it.key(), Value::decimal(v.get<double>()));
    else if (v.is_string())
      binding.emplace(it.key(), Value::text(v.get<std::string>()));
    else
      throw std::runtime_error("unsupported binding value for " + it.key());
  }
  return binding;
}

QuestionRecord record_from_generic(const json& j) {
  QuestionRecord q;
  q.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  q.dataset = dataset_from_name(j.value("dataset", "other"));
  q.split = split_from_name(j.value("split", "train"));
  q.text = j.at("text").get<std::string>();
  if (j.contains("gold") && !j.at("gold").is_null()) {
    auto gold = gold_from_json(j.at("gold"));
    if (!gold) throw std::runtime_error("unparseable gold field");
    q.set_gold(*gold);
  }
  if (j.contains("binding") && j.at("binding").is_object())
    q.binding = binding_from_json(j.at("binding"));
  if (j.contains("choices"))
    for (const auto& c : j.at("choices")) q.choices.push_back(c.get<std::string>());
  if (j.contains("correct_choice")) q.correct_choice = j.at("correct_choice").get<std::string>();
  return q;
}

QuestionRecord record_from_gsm8k(const json& j, std::size_t line_no) {
  QuestionRecord q;
  q.id = j.value("id", "gsm8k-" + std::to_string(line_no));
  q.dataset = Dataset::Gsm8k;
  q.split = split_from_name(j.value("split", "train"));
  q.text = j.at("question").get<std::string>();
  std::string answer = j.at("answer").get<std::string>();
  auto final = oracle::extract_final_answer(answer, oracle::ExpectedAnswer::Numeric);
  if (final.kind != oracle::AnswerKind::Number)
    throw std::runtime_error("gsm8k answer has no final number");
  q.set_gold(final);
  return q;
}

QuestionRecord record_from_strategyqa(const json& j, std::size_t line_no) {
  QuestionRecord q;
  q.id = j.value("qid", "strategyqa-" + std::to_string(line_no));
  q.dataset = Dataset::StrategyQa;
  q.split = split_from_name(j.value("split", "train"));
  q.text = j.at("question").get<std::string>();
  if (j.contains("answer"))
    q.set_gold(j.at("answer").get<bool>() ? oracle::Answer::yes() : oracle::Answer::no());
  return q;
}

}  // namespace

std::vector<QuestionRecord> ingest(const std::string& path, const std::string& format,
                                   IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  IngestReport local;
  std::vector<QuestionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_copy(line).empty()) continue;
    ++local.total_lines;
    try {
      json j = json::parse(line);
      if (format == "gsm8k")
        records.push_back(record_from_gsm8k(j, line_no));
      else if (format == "strategyqa")
        records.push_back(record_from_strategyqa(j, line_no));
      else if (format == "jsonl")
        records.push_back(record_from_generic(j));
      else
        throw std::runtime_error("unknown ingest format: " + format);
    } catch (const std::exception& e) {
      ++local.malformed;
      local.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (local.total_lines == 0)
    local.warnings.push_back("input file is empty: " + path);
  else if (local.malformed * 10 > local.total_lines)
    throw std::runtime_error("more than 10% of lines malformed in " + path);
  if (report) *report = std::move(local);
  return records;
}

QuestionRecord to_binary(const QuestionRecord& q, oracle::Client& client) {
  if (q.choices.empty() || !q.correct_choice) {
    if (!q.choices.empty() || q.correct_choice)
      throw std::invalid_argument("record " + q.id + " lacks choices or the correct choice");
    return q;  // already binary: pass-through
  }
  std::ostringstream question;
  question << q.text << " Choices:";
  for (const auto& c : q.choices) question << " (" << c << ")";
  auto transcript = oracle::render_template(
      oracle::TaskId::BinaryTransform, {{"q", question.str()}, {"a", *q.correct_choice}});
  std::string rewritten = trim_copy(client.complete_one(std::move(transcript)));
  if (rewritten.empty()) throw std::runtime_error("binary transform returned empty text");
  QuestionRecord out;
  out.id = q.id;
  out.dataset = q.dataset;
  out.split = q.split;
  out.text = rewritten;
  out.set_gold(oracle::Answer::yes());
  return out;
}

json EmitManifest::to_json() const {
  json counts = json::object();
  for (const auto& [origin, n] : counts_per_origin) counts[origin] = n;
  return {{"counts_per_origin", counts},
          {"emitted", emitted},
          {"rejected_unparseable", rejected_unparseable},
          {"deduplicated", deduplicated},
          {"seed_source", seed_source}};
}

namespace {

bool targets_program(oracle::TaskId task) {
  return task == oracle::TaskId::Q2P || task == oracle::TaskId::Aq2P ||
         task == oracle::TaskId::Qc2P;
}

bool target_parses(const SupervisionInstance& inst) {
  if (!targets_program(inst.task)) return true;
  try {
    dsl::parse_program(inst.target_text);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

EmitManifest emit_training(const std::vector<SupervisionInstance>& instances,
                           const std::string& seed_fixture_path, const std::string& out_path) {
  EmitManifest manifest;

  std::vector<SupervisionInstance> seed;
  std::string seed_source = "none";
  if (!seed_fixture_path.empty()) {
    std::ifstream in(seed_fixture_path);
    if (!in) throw std::runtime_error("cannot open seed fixture: " + seed_fixture_path);
    std::string line;
    while (std::getline(in, line)) {
      if (trim_copy(line).empty()) continue;
      json j = json::parse(line);
      if (j.contains("meta")) {
        seed_source = j.at("meta").value("seed_source", "unknown");
        continue;
      }
      auto inst = SupervisionInstance::from_json(j);
      inst.origin = SupervisionInstance::Origin::Seed;
      seed.push_back(std::move(inst));
    }
    if (seed_source == "none") seed_source = "unknown";
  }
  manifest.seed_source = seed_source;

  std::vector<const SupervisionInstance*> extracted;
  extracted.reserve(instances.size());
  for (const auto& inst : instances) extracted.push_back(&inst);
  std::stable_sort(extracted.begin(), extracted.end(),
                   [](const SupervisionInstance* a, const SupervisionInstance* b) {
                     auto key = [](const SupervisionInstance* i) {
                       return std::tuple<int, const std::string&, std::string, const std::string&>(
                           static_cast<int>(i->origin), i->origin_question_id,
                           oracle::task_name(i->task), i->input_text);
                     };
                     return key(a) < key(b);
                   });

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  std::set<std::pair<std::string, std::string>> seen_pairs;
  auto write_instance = [&](const SupervisionInstance& inst) {
    if (!target_parses(inst)) {
      ++manifest.rejected_unparseable;
      return;
    }
    if (!seen_pairs.emplace(inst.input_text, inst.target_text).second) {
      ++manifest.deduplicated;
      return;
    }
    out << inst.to_json().dump() << "\n";
    ++manifest.emitted;
    ++manifest.counts_per_origin[SupervisionInstance::origin_name(inst.origin)];
  };
  for (const auto& inst : seed) write_instance(inst);
  for (const auto* inst : extracted) write_instance(*inst);
  return manifest;
}

json Metrics::to_json() const {
  return {{"overall_accuracy", overall_accuracy},
          {"per_split", per_split},
          {"per_dataset", per_dataset},
          {"evaluated", evaluated},
          {"excluded_missing_gold", excluded_missing_gold}};
}

Metrics evaluate(const std::vector<Prediction>& predictions,
                 const std::vector<QuestionRecord>& records) {
  std::map<std::string, const QuestionRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;

  struct Tally {
    std::size_t correct = 0;
    std::size_t total = 0;
  };
  Tally overall;
  std::map<std::string, Tally> split_tally, dataset_tally;
  Metrics metrics;

  for (const auto& p : predictions) {
    auto it = by_id.find(p.question_id);
    if (it == by_id.end() || !it->second->has_gold()) {
      ++metrics.excluded_missing_gold;
      continue;
    }
    const QuestionRecord& record = *it->second;
    bool correct = p.value.agrees_with(record.gold_for_eval());
    ++overall.total;
    overall.correct += correct;
    auto& st = split_tally[split_name(record.split)];
    ++st.total;
    st.correct += correct;
    auto& dt = dataset_tally[dataset_name(record.dataset)];
    ++dt.total;
    dt.correct += correct;
  }
  auto pct = [](const Tally& t) {
    return t.total == 0 ? 0.0 : 100.0 * static_cast<double>(t.correct) / static_cast<double>(t.total);
  };
  metrics.evaluated = overall.total;
  metrics.overall_accuracy = pct(overall);
  for (const auto& [k, t] : split_tally) metrics.per_split[k] = pct(t);
  for (const auto& [k, t] : dataset_tally) metrics.per_dataset[k] = pct(t);
  return metrics;
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictions file: " + path);
  std::vector<Prediction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim_copy(line).empty()) continue;
    json j = json::parse(line);
    Prediction p;
    p.question_id = j.at("question_id").get<std::string>();
    std::string value = j.at("value").get<std::string>();
    if (value == "yes")
      p.value = oracle::Answer::yes();
    else if (value == "no")
      p.value = oracle::Answer::no();
    else if (value == "unknown")
      p.value = oracle::Answer::unknown();
    else if (auto v = oracle::parse_number(value))
      p.value = oracle::Answer::number(*v);
    else
      p.value = oracle::Answer::unknown();
    p.pass = j.value("pass", "first");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace analog::data
