#pragma once

#include "tensionweb/core.hpp"
#include "tensionweb/webbuild.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tensionweb {

inline constexpr int kSchemaVersion = 1;

/// Malformed or schema-violating document. `what()` carries the location.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct ToleranceOverrides {
  std::optional<double> feas;
  std::optional<double> eq;
  std::optional<double> geom;

  bool empty() const { return !feas && !eq && !geom; }
  Tolerances apply(Tolerances base) const;
  friend bool operator==(const ToleranceOverrides&, const ToleranceOverrides&) = default;
};

struct ProblemDocument {
  int dimension = 2;
  Mat positions;  // d x N
  Mat forces;     // d x N
  ToleranceOverrides tolerances;

  TerminalConfig config(const Tolerances& tol = {}) const;
  friend bool operator==(const ProblemDocument& a, const ProblemDocument& b);
};

struct WebDocument {
  int dimension = 2;
  Web web;
  std::vector<std::optional<double>> tensions;  // one per edge

  bool has_stress() const;
  /// Throws unless every edge carries a tension.
  StressState stress() const;
  static WebDocument from(const StressedWeb& sw);
  static WebDocument from(const Web& web);
  friend bool operator==(const WebDocument& a, const WebDocument& b);
};

ProblemDocument problem_from_config(const TerminalConfig& cfg);

ProblemDocument parse_problem(const std::string& text);
WebDocument parse_web(const std::string& text);
std::string serialize(const ProblemDocument& doc);
std::string serialize(const WebDocument& doc);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tensionweb
