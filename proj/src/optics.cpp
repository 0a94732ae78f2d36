#include "cforge/optics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cforge {

namespace {

constexpr double kDiagonalLeak = 1e-12;
constexpr double kVanishing = 1e-12;

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

InterferometerSpec InterferometerSpec::bare_ppbs(double t_h, double t_v) {
  InterferometerSpec spec;
  spec.bs_transmittance = t_v * t_v;
  spec.h_transmission = t_h;
  spec.validate();
  return spec;
}

void InterferometerSpec::validate() const {
  require_unit_interval(bs_transmittance, "beam splitter transmittance");
  require_unit_interval(h_transmission, "H-mode transmission");
  for (double a : attenuations) {
    require_unit_interval(a, "attenuation amplitude");
  }
}

CMatrix mode_transfer(const InterferometerSpec& spec) {
  spec.validate();
  const double t = std::sqrt(spec.bs_transmittance);
  const double r = std::sqrt(1.0 - spec.bs_transmittance);
  CMatrix coupler = CMatrix::Zero(4, 4);
  coupler(kA0, kA0) = t;
  coupler(kA0, kB0) = r;
  coupler(kB0, kA0) = -r;
  coupler(kB0, kB0) = t;
  coupler(kA1, kA1) = spec.h_transmission;
  coupler(kB1, kB1) = spec.h_transmission;
  RVector att(4);
  att << spec.attenuations[0], spec.attenuations[1], spec.attenuations[2], spec.attenuations[3];
  return att.cast<Complex>().asDiagonal() * coupler;
}

CMatrix coincidence_map(const InterferometerSpec& spec) {
  const CMatrix u = mode_transfer(spec);
  const int a_mode[2] = {kA0, kA1};
  const int b_mode[2] = {kB0, kB1};
  CMatrix out(4, 4);
  for (int jo = 0; jo < 2; ++jo) {
    for (int ko = 0; ko < 2; ++ko) {
      for (int ji = 0; ji < 2; ++ji) {
        for (int ki = 0; ki < 2; ++ki) {
          const int oa = a_mode[jo], ob = b_mode[ko], ia = a_mode[ji], ib = b_mode[ki];
          // 2x2 permanent of the rows (oa, ob) and columns (ia, ib).
          out(2 * jo + ko, 2 * ji + ki) = u(oa, ia) * u(ob, ib) + u(oa, ib) * u(ob, ia);
        }
      }
    }
  }
  return out;
}

EffectiveFilter effective_filter(const InterferometerSpec& spec) {
  const CMatrix map = coincidence_map(spec);
  CMatrix off = map;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > kDiagonalLeak) {
    throw DomainError("interferometer does not act diagonally in the coincidence basis");
  }
  const CVector raw = map.diagonal();
  const double scale = raw.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) {
    throw DomainError("interferometer transmits no coincidences (P_L = 0)");
  }
  return {DiagonalFilter(CVector(raw / scale)), scale * scale};
}

bool in_two_qubit_family(const DiagonalFilter& filter, double tolerance) {
  if (filter.dim() != 4) return false;
  const double b01 = std::abs(filter[1]);
  const double b10 = std::abs(filter[2]);
  return std::abs(b01 - b10) <= tolerance && std::abs(filter[0]) <= b01 * b10 + tolerance;
}

ChoiMatrix make_choi(CMatrix chi, std::size_t input_dim) {
  const auto n = static_cast<Eigen::Index>(input_dim * input_dim);
  if (chi.rows() != n || chi.cols() != n) {
    throw DimensionError("Choi matrix must be d^2 x d^2");
  }
  if ((chi - chi.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("Choi matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(chi, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw DomainError("Choi matrix is not positive semidefinite");
  }
  if (chi.trace().real() > static_cast<double>(input_dim) + 1e-10) {
    throw DomainError("Choi matrix trace exceeds the input dimension");
  }
  return {std::move(chi), input_dim};
}

ChoiMatrix choi_of_filter(const DiagonalFilter& filter, const std::optional<PhaseProfile>& phases) {
  const std::size_t d = filter.dim();
  CVector m = filter.coeffs();
  if (phases) {
    if (phases->phases.size() != d) {
      throw DimensionError("phase profile has " + std::to_string(phases->phases.size()) + " entries, filter has " +
                           std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      m(static_cast<Eigen::Index>(j)) *= std::polar(1.0, phases->phases[j]);
    }
  }
  CVector vec = CVector::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t j = 0; j < d; ++j) {
    vec(static_cast<Eigen::Index>(j * d + j)) = m(static_cast<Eigen::Index>(j));
  }
  return make_choi(vec * vec.adjoint(), d);
}

CMatrix apply_choi(const ChoiMatrix& chi, const CMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(chi.input_dim);
  if (rho.rows() != d || rho.cols() != d) {
    throw DimensionError("state dimension does not match the Choi matrix");
  }
  // chi = sum_{jk} E(|j><k|) (x) |j><k|, so E(rho) = sum_{jk} rho_jk E(|j><k|).
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) {
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
          out(a, b) += chi.chi(a * d + j, b * d + k) * rho(j, k);
        }
      }
    }
  }
  return out;
}

ProcessMetrics process_metrics(const ChoiMatrix& chi, const ChoiMatrix& chi_ideal) {
  if (chi.chi.rows() != chi_ideal.chi.rows()) {
    throw DimensionError("Choi matrices differ in dimension");
  }
  const double tr = chi.trace();
  const double tr_ideal = chi_ideal.trace();
  if (!(tr > 0.0) || !(tr_ideal > 0.0)) {
    throw DomainError("Choi matrix with zero trace");
  }
  return {(chi.chi * chi.chi).trace().real() / (tr * tr), (chi.chi * chi_ideal.chi).trace().real() / (tr * tr_ideal)};
}

Compensation compensate_phases(const ChoiMatrix& chi) {
  const auto d = static_cast<Eigen::Index>(chi.input_dim);
  auto at = [&](Eigen::Index j, Eigen::Index k) { return chi.chi(j * d + j, k * d + k); };
  Eigen::Index ref = d - 1;
  if (std::abs(at(ref, ref)) < kVanishing) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(at(j, j)) > std::abs(at(ref, ref))) ref = j;
    }
  }
  if (std::abs(at(ref, ref)) < kVanishing) {
    throw DomainError("Choi matrix has no nonvanishing filter entry to reference phases against");
  }
  PhaseProfile profile;
  CVector undo = CVector::Ones(d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex entry = at(j, ref);
    const double phi = std::abs(entry) < kVanishing ? 0.0 : std::arg(entry);
    profile.phases.push_back(phi);
    for (Eigen::Index k = 0; k < d; ++k) {
      undo(j * d + k) = std::polar(1.0, -phi);
    }
  }
  CMatrix compensated = undo.asDiagonal() * chi.chi * undo.conjugate().asDiagonal();
  return {ChoiMatrix{std::move(compensated), chi.input_dim}, std::move(profile)};
}

}  // namespace cforge
