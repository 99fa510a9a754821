#include "ciliaflow/params.hpp"

#include <cmath>

#include "ciliaflow/error.hpp"

namespace ciliaflow {

double PhysicalParams::dipole_energy_prefactor() const noexcept {
  const double chi_b = chi * B_field;
  return 4.0 * std::numbers::pi * std::pow(a, 6) * chi_b * chi_b / (9.0 * mu0);
}

void PhysicalParams::validate() const {
  auto positive = [](const char* key, double v) {
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError(key, "must be positive");
  };
  auto non_negative = [](const char* key, double v) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError(key, "must be non-negative");
  };
  if (n < 1) throw ValidationError("n", "need at least one bead");
  positive("a", a);
  if (!std::isfinite(chi)) throw ValidationError("chi", "must be finite");
  positive("eta", eta);
  non_negative("k_stretch", k_stretch);
  non_negative("A_bend", A_bend);
  non_negative("B_field", B_field);
  positive("mu0", mu0);
  positive("l_rest", l_rest);
  if (l_rest <= 2.0 * a) throw ValidationError("l_rest", "beads overlap at rest (need l_rest > 2a)");
}

}  // namespace ciliaflow
