#pragma once

#include <map>
#include <optional>
#include <string_view>

#include "pdattack/numkit/matrix.hpp"

namespace pdattack {

enum class AttackVariant {
  TpdaExact,
  TpdaNominal,
  MapdaIdeal,
  MapdaRegulated,
  DiscreteTpdaExact,
  DiscreteTpdaNominal,
  DiscreteMapda,
  DelayInducedDiscreteMapda,
};

std::string_view to_string(AttackVariant v);
bool is_mapda(AttackVariant v);
bool is_discrete(AttackVariant v);

enum class TimeModel { Continuous, Discrete };

/// Which closed-loop matrix the Lyapunov equation −Q = ΦᵀP + PΦ is solved
/// against: the true Φ (ideal attacker) or Φ_n (regulated attacker).
enum class LyapunovModel { Ideal, Regulated };

struct MapdaParams {
  Mat Q;
  Mat Z;
  Mat P;
  Mat F_a0;
  Vec aux0;
};

/// Extra terms used only by the delay-induced discrete engine. That update
/// law reads the exact plant matrix A, so the engine is an analysis tool
/// rather than something an attacker holding only nominal models can run.
struct DelayInducedTerms {
  Mat A;
  Mat BK;
  Mat Z1;
  Mat P1;
  Mat P4;
};

/// Auxiliary-model attacker. At each sample the current auxiliary state is
/// the injected signal a(t); advance() then moves the state forward by one
/// sampling period using the observed network output x_a (held constant
/// over the period).
class AttackEngine {
 public:
  AttackVariant variant() const { return variant_; }
  std::size_t dim() const { return aux_.dim(); }

  /// a(t) for the current sample.
  const Vec& output() const { return aux_; }
  const Vec& auxiliary_state() const { return aux_; }
  /// A for exact variants, A_n otherwise.
  const Mat& model_matrix() const { return model_; }

  bool has_adaptive_gain() const { return is_mapda(variant_); }
  /// F_a; throws InvalidArgument for TPDA variants.
  const Mat& adaptive_gain() const;
  /// Throws InvalidArgument for TPDA variants.
  const MapdaParams& mapda_params() const;
  const std::optional<DelayInducedTerms>& delay_terms() const { return delay_; }
  /// Sampling period the discrete MAPDA engines were built for.
  std::optional<double> design_period() const { return period_; }

  /// Set once the auxiliary state left the representable range (‖·‖ > 1e9);
  /// the engine then keeps its last finite state.
  bool frozen() const { return frozen_; }

  /// Advances by one period h. Continuous variants use RK4 steps no longer
  /// than dt_int; discrete variants ignore dt_int.
  void advance(const Vec& x_a, double h, double dt_int);

 private:
  friend AttackEngine make_tpda_exact(const Mat&, const Vec&, TimeModel);
  friend AttackEngine make_tpda_nominal(const Mat&, const Vec&, TimeModel);
  friend AttackEngine make_mapda(const Mat&, const Mat&, const Mat&, const Mat&, const Mat&, const Vec&,
                                 LyapunovModel);
  friend AttackEngine make_discrete_mapda(const Mat&, const Mat&, const Mat&, const Mat&, const Mat&, const Vec&,
                                          double);
  friend AttackEngine make_delay_induced_discrete_mapda(const Mat&, const Mat&, const Mat&, const Mat&, const Mat&,
                                                        const Mat&, const Mat&, const Mat&, const Mat&, const Mat&,
                                                        const Vec&, double);

  AttackEngine(AttackVariant v, Mat model, Vec aux0);

  void advance_tpda_continuous(double h, double dt_int);
  void advance_tpda_discrete(double h);
  void advance_mapda_continuous(const Vec& x_a, double h, double dt_int);
  void advance_mapda_discrete(const Vec& x_a, double h);
  const Mat& cached_exp(double h);

  AttackVariant variant_;
  Mat model_;
  Vec aux_;
  bool frozen_ = false;

  std::optional<MapdaParams> mapda_;
  Mat gain_;     // F_a
  Mat zp_;       // Z·P, or Z1·P1 for the delay-induced engine
  std::optional<DelayInducedTerms> delay_;
  std::optional<Vec> previous_x_a_;
  std::optional<double> period_;
  std::map<double, Mat> exp_cache_;
};

/// Exact auxiliary model ẋ_eam = A·x_eam, a = x_eam (or x⁺ = e^{Ah}x).
AttackEngine make_tpda_exact(const Mat& A, const Vec& x_eam0, TimeModel time = TimeModel::Continuous);

/// Nominal auxiliary model ẋ_nam = A_n·x_nam, a = x_nam (or x⁺ = e^{A_n h}x).
AttackEngine make_tpda_nominal(const Mat& A_n, const Vec& x_nam0, TimeModel time = TimeModel::Continuous);

/// Adaptive auxiliary model
///   ẋ_aam = (A_n + F_a)·x_aam,  Ḟ_a = Z·P·x_a·x_aamᵀ,  a = x_aam,
/// with P solving −Q = Φ_lyapᵀP + PΦ_lyap.
/// Throws NotPositiveDefinite for Q or Z, NotHurwitz for Φ_lyap.
AttackEngine make_mapda(const Mat& A_n, const Mat& phi_for_lyap, const Mat& Q, const Mat& Z, const Mat& F_a0,
                        const Vec& aux0, LyapunovModel kind = LyapunovModel::Regulated);

/// Sampled adaptive model with period h:
///   x_aam⁺ = e^{(A_n + F_a)h}·x_aam,  F_a⁺ = F_a + h·Z·P·x_a·x_aamᵀ.
AttackEngine make_discrete_mapda(const Mat& A_n, const Mat& Phi_n, const Mat& Q, const Mat& Z, const Mat& F_a0,
                                 const Vec& aux0, double h);

/// Delay-induced sampled adaptive model; the gain update adds the h² terms
///   h²·Z1·P4·A·x_a(k)·x_aamᵀ + h²·Z1·P4·B·K·x_a(k−1)·x_aamᵀ
///   − ½h²·Z1·P4·F_aᵈ·x_aam·x_aamᵀ,   F_aᵈ = F_a + A_n − A,
/// to h·Z1·P1·x_a(k)·x_aamᵀ. x_a(−1) is taken as x_a(0).
AttackEngine make_delay_induced_discrete_mapda(const Mat& A, const Mat& A_n, const Mat& B, const Mat& K,
                                               const Mat& Phi_n, const Mat& Q, const Mat& Z1, const Mat& P1,
                                               const Mat& P4, const Mat& F_a0, const Vec& aux0, double h);

/// Returns a(t) and then advances the engine by h using x_a_sample.
/// dt_int ≤ 0 means a single integration step of length h.
/// Throws NonFiniteState if the engine is frozen.
Vec attack_emit(AttackEngine& engine, double t, const Vec& x_a_sample, double h, double dt_int = 0.0);

/// Magnitude past which an auxiliary state counts as divergent.
inline constexpr double kDivergenceSentinel = 1e9;

}  // namespace pdattack
