#include "analog/templates.hpp"

namespace analog::oracle {

const char* task_name(TaskId id) {
  switch (id) {
    case TaskId::Cot: return "cot";
    case TaskId::Abs: return "abs";
    case TaskId::Sim: return "sim";
    case TaskId::Q2P: return "q2p";
    case TaskId::Aq2P: return "aq2p";
    case TaskId::Qc2P: return "qc2p";
    case TaskId::MathQ2Kc: return "math_q2kc";
    case TaskId::MathQ2Nq: return "math_q2nq";
    case TaskId::Qa2S: return "qa2s";
    case TaskId::BinaryTransform: return "binary_transform";
    case TaskId::RagAnswer: return "rag_answer";
  }
  return "?";
}

std::optional<TaskId> task_from_name(const std::string& name) {
  static const std::map<std::string, TaskId> lookup = {
      {"cot", TaskId::Cot},
      {"abs", TaskId::Abs},
      {"sim", TaskId::Sim},
      {"q2p", TaskId::Q2P},
      {"aq2p", TaskId::Aq2P},
      {"qc2p", TaskId::Qc2P},
      {"math_q2kc", TaskId::MathQ2Kc},
      {"math_q2nq", TaskId::MathQ2Nq},
      {"qa2s", TaskId::Qa2S},
      {"binary_transform", TaskId::BinaryTransform},
      {"rag_answer", TaskId::RagAnswer},
  };
  auto it = lookup.find(name);
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

std::string task_pattern(TaskId id) {
  switch (id) {
    case TaskId::Cot:
      return "Answer this question by thinking step by step. Question: {q} Output:";
    case TaskId::Abs:
      return "Convert this question to the abstract form. Question: {q} Output:";
    case TaskId::Sim:
      return "Generate a list of concrete questions that fit the abstract question. "
             "Abstract Question: {aq} Output:";
    case TaskId::Q2P:
      return "Solve this question with a Python program with necessary abstractions. "
             "Also generate the corresponding values for the parameters. Question: {q} Output:";
    case TaskId::Aq2P:
      return "Solve this abstract question with a Python program. Abstract Question: {aq} Output:";
    case TaskId::Qc2P:
      return "Solve this question with a Python program based on the provided reference answer. "
             "Question: {q} Reference Answer: {cot} Output:";
    case TaskId::MathQ2Kc:
      return "Extract the given conditions in the math question. Question: {q} Output:";
    case TaskId::MathQ2Nq:
      return "Decompose the math question to steps, based on currently known conditions. "
             "Question: {q} Known Conditions: {c} Output:";
    case TaskId::Qa2S:
      return "Convert the given math question and its answer to a statement. "
             "Question: {q} Answer: {a} Output:";
    case TaskId::BinaryTransform:
      return "Rewrite the multiple-choice question into a yes/no question whose correct answer "
             "is yes. Question: {q} Correct Answer: {a} Output:";
    case TaskId::RagAnswer:
      return "Answer the following question with a short paragraph. Question: {q} Output:";
  }
  return "";
}

std::vector<std::string> task_slots(TaskId id) {
  switch (id) {
    case TaskId::Cot:
    case TaskId::Abs:
    case TaskId::Q2P:
    case TaskId::MathQ2Kc:
    case TaskId::RagAnswer:
      return {"q"};
    case TaskId::Sim:
    case TaskId::Aq2P:
      return {"aq"};
    case TaskId::Qc2P:
      return {"q", "cot"};
    case TaskId::MathQ2Nq:
      return {"q", "c"};
    case TaskId::Qa2S:
    case TaskId::BinaryTransform:
      return {"q", "a"};
  }
  return {};
}

Transcript render_template(TaskId id, const std::map<std::string, std::string>& slots,
                           Sampling sampling) {
  std::string text = task_pattern(id);
  for (const auto& slot : task_slots(id)) {
    auto it = slots.find(slot);
    if (it == slots.end() || it->second.empty())
      throw RenderError(std::string("missing or empty slot '") + slot + "' for task " +
                        task_name(id));
    std::string needle = "{" + slot + "}";
    auto pos = text.find(needle);
    if (pos == std::string::npos)
      throw RenderError(std::string("template for ") + task_name(id) + " lacks slot " + slot);
    text.replace(pos, needle.size(), it->second);
  }
  Transcript t;
  t.messages.push_back({"user", text});
  t.sampling = sampling;
  return t;
}

}  // namespace analog::oracle
