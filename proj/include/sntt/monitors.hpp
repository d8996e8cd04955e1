#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sntt/ntt_core.hpp"
#include "sntt/signals.hpp"

// Control-flow-integrity and cycle-count monitors. Everything here is a
// function of the observed control signals and n only — never of data-path
// values — mirroring hardware that sits beside the datapath and cannot be
// reached by the attacked nets.
namespace sntt {

// Redundant shift register shadowing the observed rd_en: msb takes the
// current cycle's rd_en, the rest shift right. In a fault-free run it equals
// the CSR on every cycle of the active window.
struct Rsr {
  std::uint8_t v = 0;

  bool bit(unsigned i) const { return ((v >> i) & 1u) != 0; }
  void shift(bool rd_en_observed) {
    v = static_cast<std::uint8_t>(((v >> 1) | (rd_en_observed ? 0x8u : 0u)) & 0xFu);
  }
  void clear() { v = 0; }
  bool operator==(const Rsr&) const = default;
};

Rsr rsr_step(Rsr rsr, bool rd_en_observed);

// Pure per-cycle predicates; 1 = violation. Meaningful inside the steady
// window (golden CSR = 1111) but total functions either way, so truth tables
// are testable directly.
//
// barrett: barrett_strt == !barrett_rst, (CSR1|CSR2) == barrett_strt,
//          (RSR1|RSR2) == barrett_strt, barrett_done == wr_en.
bool barrett_cfi_check(const ControlSignalVector& sig, const Csr& csr,
                       const Rsr& rsr);
// polymem: rd_en == RSR3, wr_en == RSR0, polymem_ce == (RSR0|RSR3).
bool polymem_cfi_check(const ControlSignalVector& sig, const Rsr& rsr);
// uv: CSR3 == RSR3, CSR0 == RSR0, uv_strt == !uv_rst.
bool uv_cfi_check(const ControlSignalVector& sig, const Csr& csr,
                  const Rsr& rsr);

// The three flags raise one combined cfi_fault (logical OR).
bool combine_cfi(bool barrett, bool polymem, bool uv);

// Fault-free control schedule for the butterflies [from, total) of an n-point
// transform, run from a cold pipe through drain: per-cycle signal stream,
// golden CSR values, steady-window mask and per-signal assertion totals.
// Deterministic pure function of (n, from); stage-boundary read stalls are
// part of the schedule (they occur only for n < 32).
struct GoldenSegment {
  std::vector<ControlSignalVector> stream;  // index i = segment cycle i+1
  std::vector<Csr> csr_stream;
  std::vector<bool> steady;  // golden CSR == 1111 at that cycle
  std::array<std::uint64_t, kNumSignals> totals{};
  std::uint64_t raw_cycles = 0;
  std::uint64_t active_cycles = 0;  // raw minus stall cycles
  std::uint64_t stall_cycles = 0;
};

GoldenSegment golden_segment(std::size_t n, std::size_t from_butterfly);

// Expected assertion count per signal over a complete fault-free run.
// For stall-free sizes this matches the closed forms:
// rd_en = wr_en = uv_strt = B, barrett_strt = barrett_done = B+1,
// polymem_ce = B+3, with B = (n/2)*log2(n).
std::array<std::uint64_t, kNumSignals> expected_counts(std::size_t n);

struct CccState {
  std::array<std::uint64_t, kNumSignals> observed{};
  std::array<std::uint64_t, kNumSignals> expected{};
  std::uint64_t segment_start_cycle = 1;  // raw cycle the live segment began
  std::uint64_t segment_cycles = 0;       // observations since segment start
};

// End-of-run verdict: any per-signal total mismatch raises ccc_fault.
bool ccc_check(const CccState& ccc);

struct FaultFlags {
  bool barrett_cfi = false;
  bool polymem_cfi = false;
  bool uv_cfi = false;
  bool cfi_fault = false;
  bool ccc_fault = false;
  std::uint64_t first_cfi_cycle = 0;  // raw cycle, 0 = never raised
  std::uint64_t first_ccc_cycle = 0;

  bool any() const { return cfi_fault || ccc_fault; }
};

struct MonitorConfig {
  bool enabled = true;
  bool strict_stream = false;  // also require per-cycle stream equality
};

// One monitored transform: owns the RSR, the tallies and the golden segment
// they are compared against. A rollback re-bases the monitor on the replayed
// schedule of the butterflies still outstanding; completed work contributes
// identically to both sides of the comparison and cancels.
class MonitorSet {
 public:
  MonitorSet(std::size_t n, MonitorConfig cfg);

  // Feed one completed step. Returns true when a CFI predicate fires this
  // cycle (always false while disabled or outside the steady window).
  bool observe(const ControlSignalVector& observed, const Csr& live_csr,
               std::uint64_t raw_cycle);

  void on_rollback(std::size_t retire_cursor, std::uint64_t raw_cycle);

  // End-of-run CCC verdict; latches ccc_fault into the flags.
  bool finish(std::uint64_t raw_cycle);

  const FaultFlags& flags() const { return flags_; }
  const CccState& ccc() const { return ccc_; }
  const Rsr& rsr() const { return rsr_; }
  bool enabled() const { return cfg_.enabled; }

 private:
  std::size_t n_;
  MonitorConfig cfg_;
  GoldenSegment seg_;
  std::size_t seg_cycle_ = 0;  // observations into the current segment
  Rsr rsr_;
  CccState ccc_;
  FaultFlags flags_;
  std::vector<ControlSignalVector> live_stream_;  // strict mode only
};

}  // namespace sntt
