// Per-outer-iteration run records plus the index-sequence reconstructions
// used to check the solver's descent bookkeeping:
//   l  — outer indices at which the iterate actually changed,
//   L(k) — index of the distinct iterate current at outer step k,
//   O(k) — index of the distinct iterate whose objective equals the
//          nonmonotone threshold at step k,
//   o_s / g_u — window-spaced subsequences on which strict descent and
//          spacing guarantees hold.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trigger_descent/linalg.hpp"

namespace trigger_descent {

// Why the inner loop stopped at a given outer iteration. The conditions are
// tested in this fixed order so recorded traces are deterministic.
enum class TriggerReason { None, Distance, GradientLow, GradientHigh, MaxInner };

const char* to_string(TriggerReason r);

struct OuterRecord {
  long long k = 0;
  bool accepted = false;
  TriggerReason trigger_reason = TriggerReason::None;
  long long j_trigger = 0;      // inner iterations run before the trigger
  Vector theta_after;           // iterate after the accept/reject decision
  double F_trigger = 0.0;       // objective at the triggering inner point
  double grad_norm_after = 0.0; // gradient norm at theta_after
  double delta_after = 0.0;     // step scaling after the decision
  double tau_obj_before = 0.0;  // nonmonotone threshold used by the decision
};

struct RunTrace {
  std::vector<OuterRecord> records;
  double F_theta0 = 0.0;
};

// l_t: l_0 = 0; acceptance at outer step k makes iterate k+1 distinct.
std::vector<long long> distinct_indices(const RunTrace& trace);

// L(k) for k = 0..N (N = records.size()); L(k) = max{t : l_t <= k}.
std::vector<long long> l_of_k(const RunTrace& trace);

// Objective at each distinct iterate: F(theta_{l_t}).
std::vector<double> objective_at_distinct(const RunTrace& trace);

// Nonmonotone threshold recomputed from scratch for k = 0..N: the max
// objective among the (at most w) most recent distinct iterates at step k.
std::vector<double> tau_ladder(const RunTrace& trace, int w);

// O(k) for k = 0..N: largest s <= L(k) with F(theta_{l_s}) equal to the
// threshold at k.
std::vector<long long> o_of_k(const RunTrace& trace, int w);

// o_0 = 0, o_s = O(l_{o_{s-1} + w}); truncated when the index runs past the
// end of the trace.
std::vector<long long> o_sequence(const RunTrace& trace, int w);

// g_0 = 0, g_u = min{o_s : o_s >= g_{u-1} + w}; truncated at trace end.
std::vector<long long> g_sequence(const RunTrace& trace, int w);

// Executable descent checks over a finished trace:
//  (a) F(theta_{l_{o_s}}) strictly decreasing in s;
//  (b) within [l_{o_s}, l_{o_{s+1}}] no iterate objective exceeds
//      F(theta_{l_{o_s}});
//  (c) the threshold decreases only at acceptances with
//      O(k) = L(k) - w + 1;
//  (d) the threshold is constant across rejected steps;
//  (e) the recorded threshold equals the reconstruction from (l, L) at
//      every k (bookkeeping consistency).
struct DescentReport {
  bool pass_a = true;
  bool pass_b = true;
  bool pass_c = true;
  bool pass_d = true;
  bool pass_window = true;
  std::vector<std::string> violations;

  bool all_clauses() const { return pass_a && pass_b && pass_c && pass_d; }
  bool all() const { return all_clauses() && pass_window; }
};

DescentReport verify_descent(const RunTrace& trace, int w);

// One JSON object per line with the OuterRecord fields, for offline analysis.
void write_trace_jsonl(const RunTrace& trace, std::ostream& out);

}  // namespace trigger_descent
