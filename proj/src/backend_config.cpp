#include "verif/backend_config.hpp"

namespace verif {

void BackendConfig::validate() const {
  const int p = carrier_precision(carrier);
  if (t < 1 || t > p) {
    throw UsageError("virtual precision " + std::to_string(t) +
                     " out of range [1, " + std::to_string(p) + "] for " +
                     std::string(to_string(carrier)));
  }
  if (beta != 2 && beta != 10) {
    throw UsageError("digit base must be 2 or 10, got " + std::to_string(beta));
  }
}

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::ieee: return "ieee";
    case BackendKind::mca_rr: return "mca-rr";
    case BackendKind::mca_pb: return "mca-pb";
    case BackendKind::mca_full: return "mca-full";
    case BackendKind::cestac: return "cestac";
  }
  return "?";
}

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "ieee") return BackendKind::ieee;
  if (text == "mca-rr" || text == "mca_rr" || text == "rr") return BackendKind::mca_rr;
  if (text == "mca-pb" || text == "mca_pb" || text == "pb") return BackendKind::mca_pb;
  if (text == "mca-full" || text == "mca_full" || text == "mca") return BackendKind::mca_full;
  if (text == "cestac") return BackendKind::cestac;
  throw UsageError("unknown backend '" + std::string(text) + "'");
}

std::string_view to_string(Carrier carrier) noexcept {
  return carrier == Carrier::binary32 ? "binary32" : "binary64";
}

Carrier parse_carrier(std::string_view text) {
  if (text == "binary32" || text == "float") return Carrier::binary32;
  if (text == "binary64" || text == "double") return Carrier::binary64;
  throw UsageError("unknown carrier '" + std::string(text) + "'");
}

}  // namespace verif
