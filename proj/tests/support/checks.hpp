#pragma once

#include <tensionweb/core.hpp>

#include <string>

namespace checks {

struct Audit {
  double residual = 0.0;     // max node imbalance
  double michell_gap = 0.0;  // |sum sigma l - sum f.x|
  double michell_bound = 0.0;
  double hull_excess = 0.0;  // worst L1 distance of a node outside the terminal hull
  bool negative_tension = false;
  bool michell_ok() const { return michell_gap <= michell_bound; }
  bool hull_ok() const { return hull_excess <= 1e-9; }
  bool ok() const { return michell_ok() && hull_ok() && !negative_tension; }
  std::string describe() const;
};

/// Michell identity and hull containment for one web; also recorded globally.
Audit audit_web(const tensionweb::Web& web, const tensionweb::StressState& stress,
                const tensionweb::TerminalConfig& cfg);

struct Totals {
  int webs = 0;
  int nodes = 0;
  int michell_failures = 0;
  int hull_failures = 0;
  double worst_michell_ratio = 0.0;  // gap / bound
  double worst_hull = 0.0;
};
const Totals& totals();

}  // namespace checks

#define CHECK_WEB(web, stress, cfg)                            \
  do {                                                         \
    const auto audit_ = ::checks::audit_web(web, stress, cfg); \
    INFO(audit_.describe());                                   \
    CHECK(audit_.ok());                                        \
  } while (0)
