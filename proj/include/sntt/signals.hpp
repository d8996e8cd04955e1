#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

// Control-signal plumbing shared by the pipeline, the monitors and the fault
// injector: the 4-bit control shift register (CSR) and the 10-signal control
// vector derived from it.
namespace sntt {

// 4-bit right-shift register. bit(3) is the fill input (read enable), bit(0)
// the oldest bit (write enable). Fill sequence from reset: 1000 -> 1100 ->
// 1110 -> 1111; drain mirrors it once the fill input drops.
struct Csr {
  std::uint8_t v = 0;  // bits 3..0

  bool bit(unsigned i) const { return ((v >> i) & 1u) != 0; }
  void shift(bool fill) {
    v = static_cast<std::uint8_t>(((v >> 1) | (fill ? 0x8u : 0u)) & 0xFu);
  }
  void clear() { v = 0; }
  bool steady() const { return v == 0xF; }
  bool empty() const { return v == 0; }
  bool operator==(const Csr&) const = default;
};

std::string to_string(const Csr& c);  // "1011" msb-first

// Signal roster. Order is load-bearing: it is the bit order of the injector's
// 10-bit gating word (msb-first binary of the pattern seed).
enum SignalId : unsigned {
  kRdEn = 0,
  kWrEn = 1,
  kPolymemCe = 2,
  kCtrlRst = 3,
  kUbuffRst = 4,
  kBarrettRst = 5,
  kBarrettStrt = 6,
  kBarrettDone = 7,
  kUvRst = 8,
  kUvStrt = 9,
};

inline constexpr std::size_t kNumSignals = 10;

inline constexpr const char* kSignalNames[kNumSignals] = {
    "rd_en",       "wr_en",        "polymem_ce",   "ctrl_rst", "ubuff_rst",
    "barrett_rst", "barrett_strt", "barrett_done", "uv_rst",   "uv_strt",
};

struct ControlSignalVector {
  std::array<bool, kNumSignals> bits{};

  bool& operator[](SignalId s) { return bits[s]; }
  bool operator[](SignalId s) const { return bits[s]; }
  bool operator==(const ControlSignalVector&) const = default;
};

std::string to_string(const ControlSignalVector& v);  // roster-order 0/1 string

// Combinational decode of the CSR plus the external reset:
//   rd_en = CSR[3], wr_en = uv_strt = CSR[0], uv_rst = !CSR[3],
//   barrett_strt = CSR[1] | CSR[2], barrett_rst = !(CSR[1] | CSR[2]),
//   polymem_ce = CSR[0] | CSR[3], ctrl_rst = ubuff_rst = rst.
// barrett_done is reported at its fault-free alignment (= CSR[0]); the live
// engine overrides it with the Barrett unit's delayed status output.
ControlSignalVector derive_controls(const Csr& csr, bool rst);

}  // namespace sntt
