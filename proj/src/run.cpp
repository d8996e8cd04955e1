#include "sntt/run.hpp"

#include <array>
#include <optional>
#include <stdexcept>

namespace sntt {
namespace {

struct FaultState {
  FaultSpec spec;
  std::array<bool, kNumSignals> pattern{};
  bool fired = false;     // single-cycle plans fire at most once per run
  bool scrubbed = false;  // removed by a slot reload (never for floor profiles)
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RunOutcome run_transform(const NttParams& params, const Polynomial& input,
                         const std::vector<FaultSpec>& faults,
                         const RunConfig& cfg, Corrector* corrector) {
  params.validate();
  validate_polynomial(input, params);
  if (cfg.max_attempts == 0) {
    throw std::invalid_argument("run: max_attempts must be >= 1");
  }

  std::vector<FaultState> fstate;
  fstate.reserve(faults.size());
  for (const FaultSpec& f : faults) {
    f.plan.validate();
    fstate.push_back(FaultState{f, encode_pattern(f.plan.r_s)});
  }

  const GoldenSegment full = golden_segment(params.n, 0);
  RunOutcome out;
  out.nominal_ns = full.raw_cycles * kClockNs;
  out.sim_time_ns = out.nominal_ns;
  const std::uint64_t watchdog = kWatchdogFactor * full.raw_cycles + 64;

  std::size_t cur_slot = cfg.slot;
  if (corrector != nullptr) corrector->table()->record_run(cfg.slot);

  const ControlGate gate_fn = [&](const ControlSignalVector& sig,
                                  std::uint64_t raw) {
    ControlSignalVector o = sig;
    for (FaultState& st : fstate) {
      if (st.scrubbed || st.spec.plan.slot_scope != cur_slot) continue;
      bool active = false;
      if (st.spec.plan.persistence == Persistence::single_cycle) {
        if (!st.fired && raw == st.spec.plan.r_t + 1) {
          active = true;
          st.fired = true;
        }
      } else {
        active = raw >= st.spec.plan.r_t + 1;
      }
      if (active) o = gate(o, st.pattern, st.spec.plan.mode, true);
    }
    return o;
  };

  // A reload scrubs injected configuration; floor-level profiles survive it.
  const auto apply_scrub = [&fstate]() {
    for (FaultState& st : fstate) {
      if (!st.spec.floor_profile) st.scrubbed = true;
    }
  };
  // Relocation rebinds the run to the lowest-risk spare slot; with no spare
  // available it degrades to a reload.
  const auto apply_relocate = [&](Measure& m) {
    const std::optional<std::size_t> alt =
        corrector->table()->select_slot(cur_slot);
    if (alt) {
      cur_slot = *alt;
    } else {
      m.kind = MeasureKind::reload;
      m.cost_ns = corrector->latencies().reload_ns;
      apply_scrub();
    }
  };
  const auto apply_measure = [&](Measure& m) {
    if (m.kind == MeasureKind::reload) apply_scrub();
    if (m.kind == MeasureKind::relocate) apply_relocate(m);
    out.sim_time_ns += m.cost_ns;
  };

  for (std::uint64_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    out.attempts = attempt;
    Pipeline pipe(params, cfg.mask_mode, splitmix64(cfg.seed ^ attempt));
    pipe.load_input(input);
    for (std::uint64_t c : cfg.barrett_stall_cycles) {
      pipe.debug_stall_barrett_at(c);
    }
    MonitorSet mon(params.n,
                   MonitorConfig{cfg.monitors_enabled, cfg.strict_stream});
    if (cfg.keep_trace) out.trace.clear();

    bool aborted = false;
    std::uint64_t steps = 0;
    while (!pipe.done()) {
      if (++steps > watchdog) {
        aborted = true;
        break;
      }
      const CycleRecord& rec = pipe.step(gate_fn);
      if (cfg.keep_trace) out.trace.push_back(rec);
      const bool cfi_now = mon.observe(rec.observed, rec.csr, rec.raw_cycle);
      pipe.commit_cycle(!cfi_now);
      if (cfi_now && corrector != nullptr) {
        Measure m = corrector->on_fault(FaultContext::cfi, cur_slot,
                                        rec.raw_cycle, out.nominal_ns);
        apply_measure(m);
        checked_rollback(pipe, mon, rec.raw_cycle);
        out.measures.push_back(m);
      }
    }

    const bool end_fault = mon.finish(pipe.raw_cycles());
    out.raw_cycles_total += pipe.raw_cycles();
    out.flags = mon.flags();
    out.detected = out.detected || mon.flags().any() || aborted;
    out.aborted = out.aborted || aborted;
    out.completed = !aborted;
    out.final_segment_clean = !aborted && !end_fault;
    out.raw_cycles = pipe.raw_cycles();
    out.active_cycles = pipe.active_cycles();
    out.stall_cycles = pipe.stall_cycles();
    out.total_reads = pipe.total_reads();
    out.unmasked_reads = pipe.unmasked_reads();
    out.unmasked_read_fraction =
        pipe.total_reads() == 0
            ? 0.0
            : static_cast<double>(pipe.unmasked_reads()) /
                  static_cast<double>(pipe.total_reads());
    out.output_raw = pipe.unmask_memory();
    out.output_natural = to_natural_order(out.output_raw);
    out.final_slot = cur_slot;

    if (out.final_segment_clean) break;
    if (corrector == nullptr || attempt == cfg.max_attempts) break;

    Measure m = corrector->on_fault(FaultContext::ccc, cur_slot,
                                    pipe.raw_cycles(), out.nominal_ns);
    apply_measure(m);
    out.measures.push_back(m);
  }

  if (corrector != nullptr && out.detected) {
    corrector->table()->record_flagged(cfg.slot);
  }
  return out;
}

}  // namespace sntt
