#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <unordered_set>
#include <vector>

#include "sntt/masking.hpp"
#include "sntt/ntt_core.hpp"
#include "sntt/signals.hpp"

// Cycle-accurate model of the pipelined transform engine: a five-stage
// read / multiply / reduce / add-sub / write pipe driven by the 4-bit CSR,
// with control taps for the fault gate, an undo log for checkpointed
// rollback, and write-port masking.
namespace sntt {

// One nanosecond-per-cycle constant for the whole engine (100 MHz clock).
inline constexpr std::uint64_t kClockNs = 10;

// Applied to the derived control vector each cycle; returns what the blocks
// actually observe. Identity when empty.
using ControlGate =
    std::function<ControlSignalVector(const ControlSignalVector&, std::uint64_t)>;

struct OpSlot {
  bool valid = false;
  std::size_t sched_pos = 0;
  AddrTriple addr{};
};

// Memory image of one write, kept so an in-flight window can be replayed.
struct UndoEntry {
  std::size_t sched_pos;  // schedule position the write belonged to
  std::size_t addr;
  Residue old_value;
  MaskContext old_ctx;
};

struct CycleRecord {
  std::uint64_t raw_cycle = 0;
  Csr csr;                       // live CSR after this cycle's shift
  ControlSignalVector observed;  // post-gate control vector
  bool stall = false;
  bool issued = false;
  std::size_t issued_pos = 0;
  bool wrote = false;  // a scheduled butterfly committed its pair this cycle
  std::size_t wrote_pos = 0;
};

class Pipeline {
 public:
  Pipeline(const NttParams& params, MaskMode mode, std::uint64_t mask_seed);

  // Loads natural-order input coefficients and resets every pipeline
  // register, cursor and counter (the mask RNG keeps its stream).
  void load_input(const Polynomial& input);

  bool done() const;

  // Advances one clock. Phase order inside the cycle: conveyor shift, stall
  // decision + CSR shift, control derivation, gating, write stage (consuming
  // last cycle's unit outputs), unit register advance, read/issue, and the
  // controller-reset tail.
  const CycleRecord& step(const ControlGate& gate);

  // Retires the butterfly written this cycle once the monitors report the
  // cycle clean; a flagged cycle leaves it pending-undone for rollback.
  void commit_cycle(bool clean);

  // Restores memory to the last retired butterfly (undo log replay), rewinds
  // the issue cursor onto it and clears the pipe. Caller re-bases monitors.
  void rollback();

  std::uint64_t raw_cycles() const { return raw_cycle_; }
  std::uint64_t active_cycles() const { return active_cycles_; }
  std::uint64_t stall_cycles() const { return stall_cycles_; }
  std::size_t issue_cursor() const { return issue_cursor_; }
  std::size_t retire_cursor() const { return retire_cursor_; }
  const Csr& csr() const { return csr_; }
  const NttParams& params() const { return params_; }
  const std::vector<Residue>& memory() const { return poly_mem_; }
  const std::vector<MaskContext>& contexts() const { return ctx_; }

  // Unmasks the full coefficient memory (raw, bit-reversed transform order).
  Polynomial unmask_memory() const;

  std::uint64_t total_reads() const { return total_reads_; }
  std::uint64_t unmasked_reads() const { return unmasked_reads_; }

  // Debug hook modelling an internal reducer hang: at the given raw cycle the
  // Barrett unit (product/output registers and the done delay line) holds
  // instead of advancing. Control derivation is untouched.
  void debug_stall_barrett_at(std::uint64_t raw_cycle) {
    barrett_stall_cycles_.insert(raw_cycle);
  }

 private:
  bool read_conflicts_inflight(const AddrTriple& next) const;
  bool conveyor_empty() const;
  MaskContext next_write_ctx();

  NttParams params_;
  BarrettReducer reducer_;
  TwiddleTable twiddles_;
  std::vector<ButterflyOp> schedule_;
  MaskMode mode_;
  std::mt19937_64 rng_;
  MaskContext run_ctx_ = MaskContext::unit();

  std::vector<Residue> poly_mem_;
  std::vector<MaskContext> ctx_;

  Csr csr_;
  std::array<OpSlot, 4> conveyor_{};
  std::size_t issue_cursor_ = 0;
  std::size_t retire_cursor_ = 0;
  std::optional<std::size_t> pending_retire_;

  // Datapath registers between stages.
  Residue rd_u_ = 0, rd_v_ = 0;  // read-port outputs
  Residue w_reg_ = 1;            // twiddle-ROM output
  Wide b_prod_ = 0;              // Barrett stage 1 (raw product)
  Residue b_out_ = 0;            // Barrett stage 2 (reduced product)
  Residue ubuf_[2] = {0, 0};     // U delay line matching Barrett latency
  Residue uv_sum_ = 0, uv_diff_ = 0;  // add/sub output latches
  std::array<bool, 2> done_pipe_{};   // Barrett status delay line
  std::size_t waddr_[2] = {0, 0};     // write-port address registers
  std::size_t raddr_[2] = {0, 0};     // read-port address registers
  std::size_t widx_ = 0;              // twiddle-ROM address register

  std::vector<UndoEntry> undo_log_;

  std::uint64_t raw_cycle_ = 0;
  std::uint64_t active_cycles_ = 0;
  std::uint64_t stall_cycles_ = 0;
  std::uint64_t total_reads_ = 0;
  std::uint64_t unmasked_reads_ = 0;

  std::unordered_set<std::uint64_t> barrett_stall_cycles_;
  CycleRecord rec_;
};

}  // namespace sntt
