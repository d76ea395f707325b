#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "analog/transcript.hpp"

namespace analog::oracle {

/// Sub-task identifiers for the multi-function model. One model handles all
/// of them; the rendered template alone signals which task is requested.
enum class TaskId {
  Cot,
  Abs,
  Sim,
  Q2P,
  Aq2P,
  Qc2P,
  MathQ2Kc,
  MathQ2Nq,
  Qa2S,
  BinaryTransform,
  RagAnswer,
};

const char* task_name(TaskId id);
std::optional<TaskId> task_from_name(const std::string& name);

struct RenderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The slot names a task requires, in render order.
std::vector<std::string> task_slots(TaskId id);

/// Renders a sub-task prompt into a single-user-message transcript.
/// Missing or empty slots raise RenderError.
Transcript render_template(TaskId id, const std::map<std::string, std::string>& slots,
                           Sampling sampling = {});

/// The raw template pattern with {slot} placeholders, for documentation
/// and golden tests.
std::string task_pattern(TaskId id);

}  // namespace analog::oracle
