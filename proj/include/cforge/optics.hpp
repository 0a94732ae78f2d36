#pragma once

// Two-photon linear-optical filter in the coincidence basis, and Choi-matrix
// process metrics for diagonal filters.

#include <array>
#include <optional>
#include <vector>

#include "cforge/statecore.hpp"

namespace cforge {

/// Mode order used by the single-photon transfer matrix.
enum Mode : int { kA0 = 0, kA1 = 1, kB0 = 2, kB1 = 3 };

/// The |0> modes A0, B0 interfere on a beam splitter of transmittance
/// `bs_transmittance` (amplitudes t = sqrt(T), r = sqrt(1 - T), sign flip on
/// the B0 -> A0 port). The |1> modes pass with amplitude `h_transmission`.
/// Attenuators act afterwards on (A0, A1, B0, B1).
struct InterferometerSpec {
  double bs_transmittance = 1.0;
  double h_transmission = 1.0;
  std::array<double, 4> attenuations{1.0, 1.0, 1.0, 1.0};

  /// Partially polarizing splitter used as the coupler: V modes couple with
  /// amplitude transmission t_v, H modes are transmitted with t_h.
  static InterferometerSpec bare_ppbs(double t_h, double t_v);

  void validate() const;
};

/// Single-photon mode transfer matrix (rows: output modes, columns: input modes).
CMatrix mode_transfer(const InterferometerSpec& spec);

/// 4x4 map between coincidence basis states |jk> (photon A in A_j, photon B
/// in B_k); entries are 2x2 permanents of the mode transfer matrix.
CMatrix coincidence_map(const InterferometerSpec& spec);

struct EffectiveFilter {
  DiagonalFilter filter;  // normalized so that max |m_jk| = 1
  double p_l = 0.0;       // probability reduction factor
};

/// Implemented operator = sqrt(P_L) * filter. Throws DomainError if every
/// coincidence amplitude vanishes or the map is not diagonal.
EffectiveFilter effective_filter(const InterferometerSpec& spec);

/// |a| <= |b01| |b10| (+tol) with |b01| = |b10|: the two-qubit filter family realizable by the scheme.
bool in_two_qubit_family(const DiagonalFilter& filter, double tolerance = 1e-12);

struct PhaseProfile {
  std::vector<double> phases;  // radians, one per basis state
};

struct ChoiMatrix {
  CMatrix chi;  // d^2 x d^2, index (j, k) -> j * d + k
  std::size_t input_dim = 0;

  double trace() const { return chi.trace().real(); }
};

/// chi = (M_phi (x) I)|Phi><Phi|(M_phi (x) I)^dagger with |Phi> = sum_j |jj>
/// (unnormalized) and M_phi = diag(m_j e^{i phi_j}).
ChoiMatrix choi_of_filter(const DiagonalFilter& filter, const std::optional<PhaseProfile>& phases = std::nullopt);

/// Validates PSD (1e-10) and trace <= d.
ChoiMatrix make_choi(CMatrix chi, std::size_t input_dim);

/// The map encoded by chi: rho -> Tr_2[chi (I (x) rho^T)].
CMatrix apply_choi(const ChoiMatrix& chi, const CMatrix& rho);

struct ProcessMetrics {
  double purity = 0.0;    // Tr[chi^2] / Tr[chi]^2
  double fidelity = 0.0;  // Tr[chi chi_M] / (Tr[chi] Tr[chi_M])
};

ProcessMetrics process_metrics(const ChoiMatrix& chi, const ChoiMatrix& chi_ideal);

struct Compensation {
  ChoiMatrix chi;
  PhaseProfile profile;
};

/// Removes the phases of the entries chi[(j,j),(r,r)] relative to a
/// reference basis state r (the last one, or the largest diagonal entry
/// if that vanishes).
Compensation compensate_phases(const ChoiMatrix& chi);

}  // namespace cforge
