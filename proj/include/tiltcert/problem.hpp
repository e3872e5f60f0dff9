#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiltcert/symmat.hpp"

namespace tiltcert {

/// g(x) = G0 + Σ xᵢGᵢ + ½ΣΣ xᵢxⱼHᵢⱼ.
struct MatrixMapping {
  int n = 0;
  SymMatrix G0;
  std::vector<SymMatrix> G;
  std::vector<std::vector<SymMatrix>> H;  // empty when g is affine

  bool affine() const { return H.empty(); }
};

/// φ(x) = ½xᵀQx + cᵀx + c0.
struct QuadraticObjective {
  Mat Q;
  Vec c;
  double c0 = 0.0;
};

enum class InstanceForm { Primal, Lmi, Composite };
const char* form_name(InstanceForm f);

struct NsdpInstance {
  std::string name;
  InstanceForm form = InstanceForm::Lmi;
  int d = 0;
  QuadraticObjective objective;
  Mat A;  // m × d, full row rank after preprocessing
  Vec b;
  MatrixMapping g;
  std::optional<Vec> point;  // candidate x* shipped with the file
  std::vector<std::string> warnings;
  std::string source_text;  // original native document, kept for round trips

  int m() const { return static_cast<int>(A.rows()); }
  int n() const { return g.n; }
};

struct PointReport {
  Vec x;
  SymMatrix Xval;
  double eq_residual = 0.0;
  double psd_residual = 0.0;
  Vec grad;
  Vec vstar;
  double objective = 0.0;
};

double phi(const NsdpInstance& inst, const Vec& x);
Vec grad_phi(const NsdpInstance& inst, const Vec& x);
SymMatrix g_value(const NsdpInstance& inst, const Vec& x);
/// ∂g/∂xᵢ at x.
SymMatrix g_partial(const NsdpInstance& inst, const Vec& x, int i);
SymMatrix g_jac_apply(const NsdpInstance& inst, const Vec& x, const Vec& w);
Vec g_adjoint(const NsdpInstance& inst, const Vec& x, const SymMatrix& S);
SymMatrix g_hess_quad(const NsdpInstance& inst, const Vec& x, const Vec& w);
/// Columns are svec(∂g/∂xᵢ); the matrix of w ↦ svec(g′(x)w).
Mat g_jacobian(const NsdpInstance& inst, const Vec& x);

PointReport evaluate(const NsdpInstance& inst, const Vec& x);

/// True when g(x) = smat(x), the embedding used by matrix-variable instances.
bool is_identity_embedding(const NsdpInstance& inst);

struct ConvexityCheck {
  bool pass = true;
  std::optional<Vec> witness;
  double worst_eig = 0.0;  // largest eigenvalue of D²g(w,w) seen
};

ConvexityCheck check_minus_convexity(const NsdpInstance& inst, int num_samples,
                                     std::uint64_t seed, double tol = 1e-9);

/// Drops dependent rows of A, checks dimensions and S₋ⁿ-convexity. Throws on failure.
void validate(NsdpInstance& inst);

/// min ⟨C,X⟩ + ½ x_rawᵀ Q_raw x_raw s.t. ⟨Aᵢ,X⟩ = bᵢ, X ⪰ 0, in svec coordinates.
/// Q_raw acts on the unscaled upper triangle (X11, X12, X22, X13, ...).
NsdpInstance make_primal(const SymMatrix& C, const std::vector<SymMatrix>& Amats, const Vec& b,
                         const std::optional<Mat>& Q_raw = std::nullopt);
/// Converts a raw-coordinate quadratic form into svec coordinates.
Mat raw_to_svec_quadratic(const Mat& Q_raw);
Mat svec_to_raw_quadratic(const Mat& Q_svec);

NsdpInstance parse_sdpa(const std::string& text);
NsdpInstance load_sdpa(const std::string& path);
NsdpInstance parse_native(const std::string& text);
NsdpInstance load_native(const std::string& path);
/// Loads by extension: .dat-s / .sdpa are SDPA, everything else native.
NsdpInstance load_instance(const std::string& path);
std::string write_native(const NsdpInstance& inst);

/// Parses a point given as JSON text: a vector of length d, or (for primal forms) a matrix.
Vec parse_point(const NsdpInstance& inst, const std::string& json_text);

}  // namespace tiltcert
