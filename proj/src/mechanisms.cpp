#include <stdexcept>

#include "schoolchoice/mechanisms.hpp"

namespace schoolchoice {

Allocation run_mechanism(MechanismKind kind, const Market& market, Seed seed) {
  switch (kind) {
    case MechanismKind::kDA:
      return deferred_acceptance(market);
    case MechanismKind::kTTC:
      return top_trading_cycles(market);
    case MechanismKind::kRSD:
      return random_serial_dictatorship(market, seed);
    case MechanismKind::kRM:
      return rank_minimizing(market, seed);
  }
  throw std::logic_error("unknown mechanism");
}

std::string_view to_string(MechanismKind kind) noexcept {
  switch (kind) {
    case MechanismKind::kDA:
      return "DA";
    case MechanismKind::kTTC:
      return "TTC";
    case MechanismKind::kRSD:
      return "RSD";
    case MechanismKind::kRM:
      return "RM";
  }
  return "?";
}

std::optional<MechanismKind> parse_mechanism(std::string_view name) {
  for (const auto kind : kAllMechanisms) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace schoolchoice
