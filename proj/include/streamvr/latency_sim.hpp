#pragma once

#include <vector>

#include "streamvr/pipeline.hpp"

namespace streamvr {

// Per-answer latency model parameters: fixed verifier cost per call, refiner
// cost per generated token, sentence count, and the refinement token budgets
// of the two modes.
struct LatencyParams {
  double t_ver = 0.0;              // seconds per verifier call
  double t_ref = 0.0;              // seconds per refined token
  int n = 1;                       // sentences per answer
  double tokens_ref_streaming = 0.0;
  double tokens_ref_full = 0.0;

  void validate() const;  // throws DomainError
};

struct LatencyReport {
  double t_full = 0.0;
  double t_streaming_serial = 0.0;
  double t_streaming_real = 0.0;
  // t_real <= t_serial and t_serial < t_full. Holds whenever the verifier is
  // cheaper per call than the refined-token gap; boundary cases (equality of
  // serial and full) report false.
  bool ordering_holds = false;
};

// One whole-answer verification plus full regeneration:
// t_ver + tokens_ref_full * t_ref.
double latency_full(const LatencyParams& params);

// Sequential per-sentence verification plus streaming refinement:
// n * t_ver + tokens_ref_streaming * t_ref.
double latency_streaming_serial(const LatencyParams& params);

// Fully overlapped deployment, where only the last sentence's work is
// user-visible: max(t_ver, tokens_ref_streaming / n * t_ref).
double latency_streaming_real(const LatencyParams& params);

LatencyReport closed_form_report(const LatencyParams& params);

// One pipeline step as the simulator sees it.
struct SimStep {
  bool refined = false;
  double ref_tokens = 0.0;
  double ver_tokens = 0.0;  // used only in length-proportional mode
};

struct SimOptions {
  // Interval between generated sentences. Negative: pick the smallest
  // interval that hides every stage behind generation (the overlapped regime
  // of the closed forms). Smaller values let the sim expose queueing.
  double gen_interval = -1.0;
  // Verifier cost becomes ver_tokens * verify_cost_per_token instead of the
  // fixed per-call cost (sensitivity analysis mode).
  bool length_proportional_verify = false;
  double verify_cost_per_token = 0.0;
};

// Discrete-event realization of the latency model over a concrete answer
// trace. Generation, verification, and refinement run as overlapping stages:
// verifier and refiner are independent servers; the serial figure chains
// verify -> refine strictly per sentence, the real figure dispatches both at
// sentence arrival and reports the drain beyond generation. With uniform
// per-step costs the report matches the closed forms.
//
// Throws InconsistentTrace when the trace contradicts the parameters
// (length != n, refined tokens off-budget, tokens on a true step).
LatencyReport simulate_pipeline(const LatencyParams& params,
                                const std::vector<SimStep>& trace,
                                const SimOptions& options = {});

// Trace adapters.
std::vector<SimStep> trace_from_steps(const std::vector<StepRecord>& steps);
std::vector<SimStep> uniform_trace(const LatencyParams& params);

}  // namespace streamvr
