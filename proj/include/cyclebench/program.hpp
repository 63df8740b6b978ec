#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cyclebench/model.hpp"
#include "cyclebench/value.hpp"

namespace cyclebench {

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProgramNode {
  std::string op;
  std::vector<std::string> params;
  std::vector<int> inputs;  // indices of earlier nodes
  friend bool operator==(const ProgramNode&, const ProgramNode&) = default;
};

// Vocabulary a literal parameter is drawn from.
enum class ParamDomain { color, size, shape, material, relation, cycle };

struct OperatorSignature {
  std::string_view name;
  std::vector<ValueKind> inputs;
  std::vector<ParamDomain> params;
  ValueKind output;
};

// Every registered DSL operator.
const std::vector<OperatorSignature>& operator_table();
const OperatorSignature* find_operator(std::string_view name);

// A DAG of operator nodes evaluated in index order; the last node is the
// sink. Construction validates operator names, arities, parameter
// vocabularies, input ordering and input types.
class FunctionalProgram {
 public:
  FunctionalProgram() = default;
  explicit FunctionalProgram(std::vector<ProgramNode> nodes);

  const std::vector<ProgramNode>& nodes() const { return nodes_; }
  ValueKind output_kind() const;
  // All literal parameters, in node order.
  std::vector<std::string> parameters() const;

  nlohmann::json to_json() const;
  static FunctionalProgram from_json(const nlohmann::json& j);

  friend bool operator==(const FunctionalProgram&, const FunctionalProgram&) = default;

 private:
  std::vector<ProgramNode> nodes_;
};

// Incremental construction helper; build() validates.
class ProgramBuilder {
 public:
  int add(std::string op, std::vector<int> inputs = {}, std::vector<std::string> params = {});
  FunctionalProgram build() const { return FunctionalProgram(nodes_); }

 private:
  std::vector<ProgramNode> nodes_;
};

// Evaluates `program` against a simulated scene (states and relation tracks).
Value execute(const FunctionalProgram& program, const TemporalScene& scene);

// Applies one operator to already evaluated arguments. Any Invalid argument
// yields Invalid.
Value apply_operator(std::string_view op, const std::vector<Value>& args,
                     const std::vector<std::string>& params, const TemporalScene& scene);

}  // namespace cyclebench
