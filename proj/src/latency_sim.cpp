#include "streamvr/latency_sim.hpp"

#include <algorithm>
#include <cmath>

#include "streamvr/errors.hpp"

namespace streamvr {

void LatencyParams::validate() const {
  if (!(t_ver > 0)) throw DomainError("t_ver must be positive");
  if (!(t_ref > 0)) throw DomainError("t_ref must be positive");
  if (n < 1) throw DomainError("n must be >= 1");
  if (tokens_ref_streaming < 0 || tokens_ref_full < 0) {
    throw DomainError("refinement token budgets must be >= 0");
  }
}

double latency_full(const LatencyParams& params) {
  params.validate();
  return params.t_ver + params.tokens_ref_full * params.t_ref;
}

double latency_streaming_serial(const LatencyParams& params) {
  params.validate();
  return static_cast<double>(params.n) * params.t_ver +
         params.tokens_ref_streaming * params.t_ref;
}

double latency_streaming_real(const LatencyParams& params) {
  params.validate();
  return std::max(params.t_ver,
                  params.tokens_ref_streaming / static_cast<double>(params.n) *
                      params.t_ref);
}

LatencyReport closed_form_report(const LatencyParams& params) {
  LatencyReport report;
  report.t_full = latency_full(params);
  report.t_streaming_serial = latency_streaming_serial(params);
  report.t_streaming_real = latency_streaming_real(params);
  report.ordering_holds = report.t_streaming_real <= report.t_streaming_serial &&
                          report.t_streaming_serial < report.t_full;
  return report;
}

namespace {

double verify_cost(const SimStep& step, const LatencyParams& params,
                   const SimOptions& options) {
  if (options.length_proportional_verify) {
    return step.ver_tokens * options.verify_cost_per_token;
  }
  return params.t_ver;
}

void check_trace(const LatencyParams& params, const std::vector<SimStep>& trace) {
  if (static_cast<int>(trace.size()) != params.n) {
    throw InconsistentTrace("trace has " + std::to_string(trace.size()) +
                            " steps but n = " + std::to_string(params.n));
  }
  double refined_total = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const SimStep& step = trace[i];
    if (step.ref_tokens < 0 || step.ver_tokens < 0) {
      throw InconsistentTrace("negative token count at step " + std::to_string(i + 1));
    }
    if (!step.refined && step.ref_tokens != 0) {
      throw InconsistentTrace("step " + std::to_string(i + 1) +
                              " is true but carries refined tokens");
    }
    refined_total += step.ref_tokens;
  }
  double slack = 1e-9 * std::max(1.0, params.tokens_ref_streaming);
  if (std::abs(refined_total - params.tokens_ref_streaming) > slack) {
    throw InconsistentTrace("trace refines " + std::to_string(refined_total) +
                            " tokens, parameters say " +
                            std::to_string(params.tokens_ref_streaming));
  }
}

}  // namespace

LatencyReport simulate_pipeline(const LatencyParams& params,
                                const std::vector<SimStep>& trace,
                                const SimOptions& options) {
  params.validate();
  check_trace(params, trace);

  const bool any_refined =
      std::any_of(trace.begin(), trace.end(), [](const SimStep& s) { return s.refined; });

  LatencyReport report;

  // Full mode: one whole-answer verification, then one full regeneration if
  // anything was wrong.
  {
    double verify = options.length_proportional_verify
                        ? [&] {
                            double total = 0.0;
                            for (const SimStep& s : trace) total += s.ver_tokens;
                            return total * options.verify_cost_per_token;
                          }()
                        : params.t_ver;
    report.t_full =
        verify + (any_refined ? params.tokens_ref_full * params.t_ref : 0.0);
  }

  // Serial streaming: verify -> (refine) chained per sentence, no overlap.
  {
    double clock = 0.0;
    for (const SimStep& step : trace) {
      clock += verify_cost(step, params, options);
      if (step.refined) clock += step.ref_tokens * params.t_ref;
    }
    report.t_streaming_serial = clock;
  }

  // Overlapped streaming: sentences arrive every gen_interval; verifier and
  // refiner are parallel servers fed at arrival. Reported latency is the
  // drain beyond the generation makespan.
  {
    double interval = options.gen_interval;
    if (interval < 0) {
      interval = 0.0;
      for (const SimStep& step : trace) {
        interval = std::max(interval, verify_cost(step, params, options));
        if (step.refined) {
          interval = std::max(interval, step.ref_tokens * params.t_ref);
        }
      }
    }
    double verifier_free = 0.0;
    double refiner_free = 0.0;
    double makespan = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const SimStep& step = trace[i];
      const double arrival = static_cast<double>(i + 1) * interval;
      const double verify_end =
          std::max(arrival, verifier_free) + verify_cost(step, params, options);
      verifier_free = verify_end;
      double finalize = verify_end;
      if (step.refined) {
        const double refine_end =
            std::max(arrival, refiner_free) + step.ref_tokens * params.t_ref;
        refiner_free = refine_end;
        finalize = std::max(finalize, refine_end);
      }
      makespan = std::max(makespan, finalize);
    }
    const double generation_end = static_cast<double>(trace.size()) * interval;
    report.t_streaming_real = makespan - generation_end;
  }

  report.ordering_holds = report.t_streaming_real <= report.t_streaming_serial &&
                          report.t_streaming_serial < report.t_full;
  return report;
}

std::vector<SimStep> trace_from_steps(const std::vector<StepRecord>& steps) {
  std::vector<SimStep> trace;
  trace.reserve(steps.size());
  for (const StepRecord& record : steps) {
    SimStep step;
    step.refined = !record.verdict.value;
    step.ref_tokens = static_cast<double>(record.tokens_refined);
    step.ver_tokens = static_cast<double>(record.tokens_verified);
    trace.push_back(step);
  }
  return trace;
}

std::vector<SimStep> uniform_trace(const LatencyParams& params) {
  params.validate();
  std::vector<SimStep> trace(static_cast<std::size_t>(params.n));
  if (params.tokens_ref_streaming > 0) {
    const double share = params.tokens_ref_streaming / static_cast<double>(params.n);
    for (SimStep& step : trace) {
      step.refined = true;
      step.ref_tokens = share;
    }
  }
  return trace;
}

}  // namespace streamvr
