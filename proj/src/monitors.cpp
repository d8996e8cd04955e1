#include "sntt/monitors.hpp"

#include <optional>
#include <stdexcept>

namespace sntt {

Rsr rsr_step(Rsr rsr, bool rd_en_observed) {
  rsr.shift(rd_en_observed);
  return rsr;
}

bool barrett_cfi_check(const ControlSignalVector& sig, const Csr& csr,
                       const Rsr& rsr) {
  const bool strt = sig[kBarrettStrt];
  const bool ok = (strt == !sig[kBarrettRst]) &&
                  ((csr.bit(1) || csr.bit(2)) == strt) &&
                  ((rsr.bit(1) || rsr.bit(2)) == strt) &&
                  (sig[kBarrettDone] == sig[kWrEn]);
  return !ok;
}

bool polymem_cfi_check(const ControlSignalVector& sig, const Rsr& rsr) {
  const bool ok = (sig[kRdEn] == rsr.bit(3)) && (sig[kWrEn] == rsr.bit(0)) &&
                  (sig[kPolymemCe] == (rsr.bit(0) || rsr.bit(3)));
  return !ok;
}

bool uv_cfi_check(const ControlSignalVector& sig, const Csr& csr,
                  const Rsr& rsr) {
  const bool ok = (csr.bit(3) == rsr.bit(3)) && (csr.bit(0) == rsr.bit(0)) &&
                  (sig[kUvStrt] == !sig[kUvRst]);
  return !ok;
}

bool combine_cfi(bool barrett, bool polymem, bool uv) {
  return barrett || polymem || uv;
}

namespace {

struct ReplaySlot {
  bool valid = false;
  Residue a0 = 0;  // write addresses (same pair the butterfly read)
  Residue a1 = 0;
};

bool addr_conflict(const AddrTriple& next,
                   const std::array<ReplaySlot, 4>& conveyor) {
  for (std::size_t s = 1; s < conveyor.size(); ++s) {
    const ReplaySlot& slot = conveyor[s];
    if (!slot.valid) continue;
    if (next.k0 == slot.a0 || next.k0 == slot.a1 || next.k1 == slot.a0 ||
        next.k1 == slot.a1) {
      return true;
    }
  }
  return false;
}

bool conveyor_empty(const std::array<ReplaySlot, 4>& conveyor) {
  for (const ReplaySlot& slot : conveyor) {
    if (slot.valid) return false;
  }
  return true;
}

}  // namespace

GoldenSegment golden_segment(std::size_t n, std::size_t from_butterfly) {
  const std::vector<ButterflyOp> sched = butterfly_schedule(n);
  if (from_butterfly > sched.size()) {
    throw std::out_of_range("golden_segment: butterfly index out of range");
  }

  GoldenSegment seg;
  std::size_t cursor = from_butterfly;
  std::array<ReplaySlot, 4> conveyor{};
  Csr csr;
  std::array<bool, 2> done_pipe{};  // [0] = strt one cycle ago, [1] = two ago

  // Generous bound so a schedule bug fails loudly instead of spinning.
  const std::uint64_t max_steps = 4 * (sched.size() + 8) + 64;

  while (true) {
    if (cursor == sched.size() && conveyor_empty(conveyor) && csr.empty()) {
      break;
    }
    if (seg.raw_cycles >= max_steps) {
      throw std::logic_error("golden_segment: schedule failed to drain");
    }
    ++seg.raw_cycles;

    // Conveyor advance: slot [3] (this cycle's writer) takes last cycle's [2].
    for (std::size_t s = conveyor.size() - 1; s > 0; --s) {
      conveyor[s] = conveyor[s - 1];
    }
    conveyor[0] = ReplaySlot{};

    // A new read may not touch an address still owned by an in-flight write.
    const bool want_issue = cursor < sched.size();
    bool stall = false;
    if (want_issue && addr_conflict(sched[cursor].addr, conveyor)) {
      stall = true;
    }
    const bool fill = want_issue && !stall;
    csr.shift(fill);

    ControlSignalVector sig = derive_controls(csr, /*rst=*/false);
    sig[kBarrettDone] = done_pipe[1];

    seg.stream.push_back(sig);
    seg.csr_stream.push_back(csr);
    seg.steady.push_back(csr.steady());
    for (std::size_t b = 0; b < kNumSignals; ++b) {
      if (sig.bits[b]) ++seg.totals[b];
    }

    done_pipe[1] = done_pipe[0];
    done_pipe[0] = sig[kBarrettStrt];

    if (fill) {
      conveyor[0] = ReplaySlot{true, static_cast<Residue>(sched[cursor].addr.k0),
                               static_cast<Residue>(sched[cursor].addr.k1)};
      ++cursor;
    }
    if (stall) {
      ++seg.stall_cycles;
    } else {
      ++seg.active_cycles;
    }
  }
  return seg;
}

std::array<std::uint64_t, kNumSignals> expected_counts(std::size_t n) {
  return golden_segment(n, 0).totals;
}

bool ccc_check(const CccState& ccc) { return ccc.observed != ccc.expected; }

MonitorSet::MonitorSet(std::size_t n, MonitorConfig cfg) : n_(n), cfg_(cfg) {
  seg_ = golden_segment(n_, 0);
  ccc_.expected = seg_.totals;
}

bool MonitorSet::observe(const ControlSignalVector& observed,
                         const Csr& live_csr, std::uint64_t raw_cycle) {
  if (!cfg_.enabled) return false;

  rsr_.shift(observed[kRdEn]);
  for (std::size_t b = 0; b < kNumSignals; ++b) {
    if (observed.bits[b]) ++ccc_.observed[b];
  }
  ++ccc_.segment_cycles;
  if (cfg_.strict_stream) live_stream_.push_back(observed);

  bool cfi_now = false;
  const std::size_t idx = seg_cycle_++;
  // Predicates are judged only where the golden schedule is in its steady
  // window; during fill/drain/stall several of them do not hold by design.
  if (idx < seg_.steady.size() && seg_.steady[idx]) {
    const bool b = barrett_cfi_check(observed, live_csr, rsr_);
    const bool p = polymem_cfi_check(observed, rsr_);
    const bool u = uv_cfi_check(observed, live_csr, rsr_);
    if (b) flags_.barrett_cfi = true;
    if (p) flags_.polymem_cfi = true;
    if (u) flags_.uv_cfi = true;
    cfi_now = combine_cfi(b, p, u);
    if (cfi_now && flags_.first_cfi_cycle == 0) {
      flags_.first_cfi_cycle = raw_cycle;
    }
    if (cfi_now) flags_.cfi_fault = true;
  }
  return cfi_now;
}

void MonitorSet::on_rollback(std::size_t retire_cursor,
                             std::uint64_t raw_cycle) {
  if (!cfg_.enabled) return;
  // Butterflies before the retire cursor are already verified and retired;
  // the comparison restarts over the replayed remainder of the schedule.
  seg_ = golden_segment(n_, retire_cursor);
  seg_cycle_ = 0;
  rsr_.clear();
  ccc_.observed = {};
  ccc_.expected = seg_.totals;
  ccc_.segment_start_cycle = raw_cycle + 1;
  ccc_.segment_cycles = 0;
  live_stream_.clear();
}

bool MonitorSet::finish(std::uint64_t raw_cycle) {
  if (!cfg_.enabled) return false;
  bool fault = ccc_check(ccc_);
  if (cfg_.strict_stream && live_stream_ != seg_.stream) fault = true;
  if (fault) {
    flags_.ccc_fault = true;
    if (flags_.first_ccc_cycle == 0) flags_.first_ccc_cycle = raw_cycle;
  }
  return fault;
}

}  // namespace sntt
