#include "sntt/signals.hpp"

namespace sntt {

std::string to_string(const Csr& c) {
  std::string s(4, '0');
  for (unsigned i = 0; i < 4; ++i)
    if (c.bit(3 - i)) s[i] = '1';
  return s;
}

std::string to_string(const ControlSignalVector& v) {
  std::string s(kNumSignals, '0');
  for (std::size_t i = 0; i < kNumSignals; ++i)
    if (v.bits[i]) s[i] = '1';
  return s;
}

ControlSignalVector derive_controls(const Csr& csr, bool rst) {
  ControlSignalVector v;
  const bool barrett_active = csr.bit(1) || csr.bit(2);
  v[kRdEn] = csr.bit(3);
  v[kWrEn] = csr.bit(0);
  v[kPolymemCe] = csr.bit(0) || csr.bit(3);
  v[kCtrlRst] = rst;
  v[kUbuffRst] = rst;
  v[kBarrettRst] = !barrett_active;
  v[kBarrettStrt] = barrett_active;
  v[kBarrettDone] = csr.bit(0);
  v[kUvRst] = !csr.bit(3);
  v[kUvStrt] = csr.bit(0);
  return v;
}

}  // namespace sntt
