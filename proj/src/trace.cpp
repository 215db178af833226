#include "trigger_descent/trace.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "trigger_descent/util.hpp"

namespace trigger_descent {

const char* to_string(TriggerReason r) {
  switch (r) {
    case TriggerReason::None: return "None";
    case TriggerReason::Distance: return "Distance";
    case TriggerReason::GradientLow: return "GradientLow";
    case TriggerReason::GradientHigh: return "GradientHigh";
    case TriggerReason::MaxInner: return "MaxInner";
  }
  return "?";
}

std::vector<long long> distinct_indices(const RunTrace& trace) {
  std::vector<long long> l{0};
  for (const auto& r : trace.records)
    if (r.accepted) l.push_back(r.k + 1);
  return l;
}

std::vector<long long> l_of_k(const RunTrace& trace) {
  const auto l = distinct_indices(trace);
  const long long n = static_cast<long long>(trace.records.size());
  std::vector<long long> L(n + 1, 0);
  std::size_t t = 0;
  for (long long k = 0; k <= n; ++k) {
    while (t + 1 < l.size() && l[t + 1] <= k) ++t;
    L[k] = static_cast<long long>(t);
  }
  return L;
}

std::vector<double> objective_at_distinct(const RunTrace& trace) {
  std::vector<double> F{trace.F_theta0};
  for (const auto& r : trace.records)
    if (r.accepted) F.push_back(r.F_trigger);
  return F;
}

std::vector<double> tau_ladder(const RunTrace& trace, int w) {
  if (w < 1) w = 1;
  const auto L = l_of_k(trace);
  const auto F = objective_at_distinct(trace);
  std::vector<double> tau(L.size());
  for (std::size_t k = 0; k < L.size(); ++k) {
    const long long hi = L[k];
    const long long lo = std::max<long long>(0, hi - w + 1);
    double m = F[lo];
    for (long long s = lo + 1; s <= hi; ++s) m = std::max(m, F[s]);
    tau[k] = m;
  }
  return tau;
}

std::vector<long long> o_of_k(const RunTrace& trace, int w) {
  const auto L = l_of_k(trace);
  const auto F = objective_at_distinct(trace);
  const auto tau = tau_ladder(trace, w);
  std::vector<long long> O(L.size(), 0);
  for (std::size_t k = 0; k < L.size(); ++k) {
    long long s = L[k];
    // tau[k] is the max over a window of F values, so an exact match exists.
    while (s > 0 && F[s] != tau[k]) --s;
    O[k] = s;
  }
  return O;
}

std::vector<long long> o_sequence(const RunTrace& trace, int w) {
  if (w < 1) w = 1;
  const auto l = distinct_indices(trace);
  const auto O = o_of_k(trace, w);
  const long long n = static_cast<long long>(trace.records.size());
  std::vector<long long> o{0};
  while (true) {
    const long long t = o.back() + w;  // index into l
    if (t >= static_cast<long long>(l.size())) break;
    const long long k = l[t];
    if (k > n) break;
    o.push_back(O[k]);
  }
  return o;
}

std::vector<long long> g_sequence(const RunTrace& trace, int w) {
  if (w < 1) w = 1;
  const auto o = o_sequence(trace, w);
  std::vector<long long> g{0};
  while (true) {
    const long long need = g.back() + w;
    const auto it = std::lower_bound(o.begin(), o.end(), need);
    if (it == o.end()) break;
    g.push_back(*it);
  }
  return g;
}

namespace {

std::string idx_msg(const char* clause, long long where, const std::string& d) {
  std::ostringstream os;
  os << clause << " violated at index " << where << ": " << d;
  return os.str();
}

}  // namespace

DescentReport verify_descent(const RunTrace& trace, int w) {
  DescentReport rep;
  const auto l = distinct_indices(trace);
  const auto L = l_of_k(trace);
  const auto F = objective_at_distinct(trace);
  const auto tau = tau_ladder(trace, w);
  const auto O = o_of_k(trace, w);
  const auto o = o_sequence(trace, w);
  const long long n = static_cast<long long>(trace.records.size());

  // (a) strict descent along the o-subsequence of distinct iterates.
  for (std::size_t s = 0; s + 1 < o.size(); ++s) {
    if (!(F[o[s + 1]] < F[o[s]])) {
      rep.pass_a = false;
      rep.violations.push_back(idx_msg(
          "(a)", static_cast<long long>(s),
          "F(l_{o_s}) " + format_double(F[o[s]]) + " -> " +
              format_double(F[o[s + 1]]) + " not strictly decreasing"));
    }
  }

  // (b) between consecutive o-milestones no iterate objective exceeds the
  // milestone value. F(theta_k) = F[L(k)].
  for (std::size_t s = 0; s + 1 < o.size(); ++s) {
    const long long k_lo = l[o[s]];
    const long long k_hi = l[o[s + 1]];
    for (long long k = k_lo; k <= std::min(k_hi, n); ++k) {
      if (F[L[k]] > F[o[s]]) {
        rep.pass_b = false;
        rep.violations.push_back(
            idx_msg("(b)", k, "F(theta_k) " + format_double(F[L[k]]) +
                                  " exceeds block head " +
                                  format_double(F[o[s]])));
      }
    }
  }

  // (c) threshold decreases only at acceptances with O(k) = L(k) - w + 1,
  // and (d) it never moves across a rejected step.
  for (long long k = 0; k < n; ++k) {
    const bool acc = trace.records[static_cast<std::size_t>(k)].accepted;
    if (tau[k + 1] < tau[k]) {
      if (!acc || O[k] != L[k] - w + 1) {
        rep.pass_c = false;
        rep.violations.push_back(idx_msg(
            "(c)", k, "threshold decreased but O(k)=" + std::to_string(O[k]) +
                          ", L(k)-w+1=" + std::to_string(L[k] - w + 1) +
                          (acc ? "" : ", step rejected")));
      }
    } else if (tau[k + 1] > tau[k]) {
      rep.pass_c = false;
      rep.violations.push_back(idx_msg("(c)", k, "threshold increased"));
    }
    if (!acc && tau[k + 1] != tau[k]) {
      rep.pass_d = false;
      rep.violations.push_back(
          idx_msg("(d)", k, "threshold moved across a rejected step"));
    }
  }

  // (e) recorded live threshold equals the reconstruction at every k.
  for (long long k = 0; k < n; ++k) {
    const double live = trace.records[static_cast<std::size_t>(k)].tau_obj_before;
    if (live != tau[k]) {
      rep.pass_window = false;
      rep.violations.push_back(idx_msg(
          "(window)", k, "recorded tau " + format_double(live) +
                             " != reconstructed " + format_double(tau[k])));
    }
  }
  return rep;
}

void write_trace_jsonl(const RunTrace& trace, std::ostream& out) {
  out << "{\"F_theta0\":" << format_double(trace.F_theta0) << "}\n";
  for (const auto& r : trace.records) {
    out << "{\"k\":" << r.k << ",\"accepted\":" << (r.accepted ? "true" : "false")
        << ",\"trigger_reason\":\"" << to_string(r.trigger_reason) << "\""
        << ",\"j_trigger\":" << r.j_trigger << ",\"theta_after\":[";
    for (std::size_t i = 0; i < r.theta_after.size(); ++i) {
      if (i) out << ',';
      out << format_double(r.theta_after[i]);
    }
    out << "],\"F_trigger\":" << format_double(r.F_trigger)
        << ",\"grad_norm_after\":" << format_double(r.grad_norm_after)
        << ",\"delta_after\":" << format_double(r.delta_after)
        << ",\"tau_obj_before\":" << format_double(r.tau_obj_before) << "}\n";
  }
}

}  // namespace trigger_descent
