#include "sntt/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace sntt {

Pipeline::Pipeline(const NttParams& params, MaskMode mode,
                   std::uint64_t mask_seed)
    : params_(params),
      reducer_(params.q),
      twiddles_(TwiddleTable::build(params)),
      schedule_(butterfly_schedule(params.n)),
      mode_(mode),
      rng_(mask_seed) {
  params_.validate();
  poly_mem_.assign(params_.n, 0);
  ctx_.assign(params_.n, MaskContext::unit());
  waddr_[0] = 0;
  waddr_[1] = params_.n / 2;
  raddr_[0] = 0;
  raddr_[1] = params_.n / 2;
}

void Pipeline::load_input(const Polynomial& input) {
  validate_polynomial(input, params_);
  poly_mem_ = input;
  ctx_.assign(params_.n, MaskContext::unit());
  if (mode_ == MaskMode::per_run) {
    run_ctx_ = draw_mask(rng_, twiddles_, params_);
  }

  csr_.clear();
  conveyor_ = {};
  issue_cursor_ = 0;
  retire_cursor_ = 0;
  pending_retire_.reset();
  rd_u_ = rd_v_ = 0;
  w_reg_ = 1;
  b_prod_ = 0;
  b_out_ = 0;
  ubuf_[0] = ubuf_[1] = 0;
  uv_sum_ = uv_diff_ = 0;
  done_pipe_ = {};
  waddr_[0] = 0;
  waddr_[1] = params_.n / 2;
  raddr_[0] = 0;
  raddr_[1] = params_.n / 2;
  widx_ = 0;
  undo_log_.clear();
  raw_cycle_ = 0;
  active_cycles_ = 0;
  stall_cycles_ = 0;
  total_reads_ = 0;
  unmasked_reads_ = 0;
  rec_ = CycleRecord{};
}

bool Pipeline::conveyor_empty() const {
  return std::none_of(conveyor_.begin(), conveyor_.end(),
                      [](const OpSlot& s) { return s.valid; });
}

bool Pipeline::done() const {
  return issue_cursor_ == schedule_.size() && conveyor_empty() && csr_.empty();
}

bool Pipeline::read_conflicts_inflight(const AddrTriple& next) const {
  // Slots [1..3] hold butterflies whose writes have not landed yet (after the
  // cycle's conveyor shift, slot [3] writes this very cycle).
  for (std::size_t s = 1; s < conveyor_.size(); ++s) {
    const OpSlot& slot = conveyor_[s];
    if (!slot.valid) continue;
    if (next.k0 == slot.addr.k0 || next.k0 == slot.addr.k1 ||
        next.k1 == slot.addr.k0 || next.k1 == slot.addr.k1) {
      return true;
    }
  }
  return false;
}

MaskContext Pipeline::next_write_ctx() {
  switch (mode_) {
    case MaskMode::off:
      return MaskContext::unit();
    case MaskMode::per_run:
      return run_ctx_;
    case MaskMode::per_write:
      return draw_mask(rng_, twiddles_, params_);
  }
  return MaskContext::unit();
}

const CycleRecord& Pipeline::step(const ControlGate& gate) {
  ++raw_cycle_;
  rec_ = CycleRecord{};
  rec_.raw_cycle = raw_cycle_;

  // -- conveyor advance; the write-address registers track the slot that
  //    reaches the write stage and hold their last value over bubbles.
  for (std::size_t s = conveyor_.size() - 1; s > 0; --s) {
    conveyor_[s] = conveyor_[s - 1];
  }
  conveyor_[0] = OpSlot{};
  if (conveyor_[3].valid) {
    waddr_[0] = conveyor_[3].addr.k0;
    waddr_[1] = conveyor_[3].addr.k1;
  }

  // -- issue decision: a read must not touch an address owned by an
  //    in-flight write. Stalls are controller-internal and cannot be gated.
  const bool want_issue = issue_cursor_ < schedule_.size();
  const bool stall =
      want_issue && read_conflicts_inflight(schedule_[issue_cursor_].addr);
  const bool fill = want_issue && !stall;
  csr_.shift(fill);

  // -- control derivation, then the fault gate.
  ControlSignalVector sig = derive_controls(csr_, /*rst=*/false);
  sig[kBarrettDone] = done_pipe_[1];
  const ControlSignalVector obs = gate ? gate(sig, raw_cycle_) : sig;

  // -- write stage. The add/sub latches load from last cycle's U-buffer tail
  //    and Barrett output; enable wins over reset, otherwise they hold.
  if (obs[kUvStrt]) {
    Residue s = ubuf_[1] + b_out_;
    if (s >= params_.q) s -= params_.q;
    Residue d = ubuf_[1] + params_.q - b_out_;
    if (d >= params_.q) d -= params_.q;
    uv_sum_ = s;
    uv_diff_ = d;
  } else if (obs[kUvRst]) {
    uv_sum_ = 0;
    uv_diff_ = 0;
  }
  if (obs[kWrEn] && obs[kPolymemCe]) {
    const MaskContext wctx = next_write_ctx();
    // Unscheduled (fault-forced) writes are tagged at the retire cursor so a
    // rollback always undoes them; they never retire.
    const std::size_t tag =
        conveyor_[3].valid ? conveyor_[3].sched_pos : retire_cursor_;
    undo_log_.push_back(UndoEntry{tag, waddr_[0], poly_mem_[waddr_[0]], ctx_[waddr_[0]]});
    undo_log_.push_back(UndoEntry{tag, waddr_[1], poly_mem_[waddr_[1]], ctx_[waddr_[1]]});
    poly_mem_[waddr_[0]] = mask_coeff(uv_sum_, wctx, reducer_);
    poly_mem_[waddr_[1]] = mask_coeff(uv_diff_, wctx, reducer_);
    ctx_[waddr_[0]] = wctx;
    ctx_[waddr_[1]] = wctx;
    if (conveyor_[3].valid) {
      pending_retire_ = conveyor_[3].sched_pos;
      rec_.wrote = true;
      rec_.wrote_pos = conveyor_[3].sched_pos;
    }
  }

  // -- unit register advance, consuming the read registers as they stood at
  //    the end of the previous cycle.
  if (!barrett_stall_cycles_.contains(raw_cycle_)) {
    done_pipe_[1] = done_pipe_[0];
    done_pipe_[0] = obs[kBarrettStrt];
    if (obs[kBarrettRst]) {
      b_prod_ = 0;
      b_out_ = 0;
    } else if (obs[kBarrettStrt]) {
      b_out_ = reducer_.reduce(b_prod_);
      b_prod_ = static_cast<Wide>(rd_v_) * w_reg_;
    }
  }
  if (obs[kUbuffRst]) {
    ubuf_[0] = 0;
    ubuf_[1] = 0;
  } else {
    ubuf_[1] = ubuf_[0];
    ubuf_[0] = rd_u_;
  }

  // -- read / issue. The issue cursor is controller state and advances with
  //    the schedule even when the read enable is gated off (the registers
  //    then simply keep stale data).
  if (fill) {
    const ButterflyOp& op = schedule_[issue_cursor_];
    raddr_[0] = op.addr.k0;
    raddr_[1] = op.addr.k1;
    widx_ = op.addr.widx;
    conveyor_[0] = OpSlot{true, issue_cursor_, op.addr};
    rec_.issued = true;
    rec_.issued_pos = issue_cursor_;
    ++issue_cursor_;
  }
  if (obs[kRdEn] && obs[kPolymemCe]) {
    rd_u_ = unmask_coeff(poly_mem_[raddr_[0]], ctx_[raddr_[0]], reducer_);
    rd_v_ = unmask_coeff(poly_mem_[raddr_[1]], ctx_[raddr_[1]], reducer_);
    total_reads_ += 2;
    if (ctx_[raddr_[0]].identity()) ++unmasked_reads_;
    if (ctx_[raddr_[1]].identity()) ++unmasked_reads_;
  }
  if (obs[kRdEn]) {
    w_reg_ = twiddles_.entries[widx_];
  }

  // -- controller reset lands at the end of the cycle: issue counters and the
  //    CSR restart, in-flight datapath registers keep flowing.
  if (obs[kCtrlRst]) {
    issue_cursor_ = 0;
    csr_.clear();
  }

  if (stall) {
    ++stall_cycles_;
  } else {
    ++active_cycles_;
  }
  rec_.stall = stall;
  rec_.csr = csr_;
  rec_.observed = obs;
  return rec_;
}

void Pipeline::commit_cycle(bool clean) {
  if (clean && pending_retire_) {
    retire_cursor_ = std::max(retire_cursor_, *pending_retire_ + 1);
  }
  pending_retire_.reset();
}

void Pipeline::rollback() {
  while (!undo_log_.empty() && undo_log_.back().sched_pos >= retire_cursor_) {
    const UndoEntry& e = undo_log_.back();
    poly_mem_[e.addr] = e.old_value;
    ctx_[e.addr] = e.old_ctx;
    undo_log_.pop_back();
  }
  issue_cursor_ = retire_cursor_;
  pending_retire_.reset();
  csr_.clear();
  conveyor_ = {};
  rd_u_ = rd_v_ = 0;
  w_reg_ = 1;
  b_prod_ = 0;
  b_out_ = 0;
  ubuf_[0] = ubuf_[1] = 0;
  uv_sum_ = uv_diff_ = 0;
  done_pipe_ = {};
  waddr_[0] = 0;
  waddr_[1] = params_.n / 2;
  raddr_[0] = 0;
  raddr_[1] = params_.n / 2;
  widx_ = 0;
}

Polynomial Pipeline::unmask_memory() const {
  Polynomial out(params_.n);
  for (std::size_t i = 0; i < params_.n; ++i) {
    out[i] = unmask_coeff(poly_mem_[i], ctx_[i], reducer_);
  }
  return out;
}

}  // namespace sntt
