#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pmlab {

enum class ProfileKind { ConcretePM, Tabulated };

/// The nonlinearity phi together with its first three derivatives.
///
/// ConcretePM is phi(s) = log(1 + s^2) / 2 with closed-form derivatives.
/// Tabulated holds uniformly spaced samples of an even function; derivatives
/// come from 4th-order central differences on the sample grid.
/// Profiles are immutable and cheap to copy.
class NonlinearityProfile {
 public:
  static NonlinearityProfile perona_malik();
  static NonlinearityProfile tabulated(std::vector<double> sigma, std::vector<double> phi,
                                       std::string name = "tabulated");
  /// Two whitespace-separated columns: sigma, phi(sigma), ascending sigma.
  static NonlinearityProfile from_file(const std::filesystem::path& path);
  /// "pm" or a path to a sample file.
  static NonlinearityProfile from_spec(const std::string& spec);

  ProfileKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  static constexpr double sigma_critical = 1.0;

  /// phi^(order)(s), order in 0..3.
  double phi(double s, int order) const;
  double d1(double s) const {
    if (kind_ == ProfileKind::ConcretePM) return s / (1.0 + s * s);
    return phi(s, 1);
  }
  double d2(double s) const {
    if (kind_ == ProfileKind::ConcretePM) {
      const double q = 1.0 + s * s;
      return (1.0 - s * s) / (q * q);
    }
    return phi(s, 2);
  }

  double dphi_critical() const { return dphi1_; }
  double d3phi_critical() const { return dphi3_; }
  double d2phi_zero() const { return ddphi0_; }

  /// Interval on which phi^(order) can be evaluated.
  std::pair<double, double> range(int order) const;

 private:
  struct Table;
  NonlinearityProfile() = default;
  void cache_constants();

  ProfileKind kind_ = ProfileKind::ConcretePM;
  std::string name_ = "pm";
  std::shared_ptr<const Table> table_;
  double dphi1_ = 0.5;
  double dphi3_ = -0.5;
  double ddphi0_ = 1.0;
};

double eval_phi(const NonlinearityProfile& profile, double sigma, int order);

struct HypothesisItem {
  bool holds = false;
  double margin = 0.0;  ///< worst case; positive means satisfied with room
};

struct HypothesisReport {
  HypothesisItem phi_plus;    ///< phi'' > 0 on [0,1)
  HypothesisItem phi_zero;    ///< phi''(1) = 0
  HypothesisItem phi_minus;   ///< phi'' < 0 on (1, max)
  HypothesisItem phi_triple;  ///< phi'''(1) < 0
  bool even = false;
  bool all() const { return phi_plus.holds && phi_zero.holds && phi_minus.holds && phi_triple.holds; }
};

inline constexpr double hypothesis_margin = 1e-6;
inline constexpr double tol_root = 1e-12;

HypothesisReport check_hypotheses(const NonlinearityProfile& profile, int sample_count);

/// Monotone C^1 truncation of phi' that plateaus at phi'(1).
double truncated_flux_h(const NonlinearityProfile& profile, double sigma);

/// Inverse of h on (0, phi'(1)); closed form for ConcretePM, bisection otherwise.
double h_inverse(const NonlinearityProfile& profile, double y);
/// Always the bisection route.
double h_inverse_bisect(const NonlinearityProfile& profile, double y);

/// g(s) = phi''(h^{-1}(phi'(1) - s)).
double coeff_g(const NonlinearityProfile& profile, double s);
double coeff_g_generic(const NonlinearityProfile& profile, double s);
/// sqrt(s - s^2) + 2 (s - s^2), valid on (0, 1/2).
double coeff_g_closed_pm(double s);

struct DerivedConstants {
  double G = 0.0;
  double A = 0.0;
  double k0 = 0.0;
  double r2 = 0.0;
};

DerivedConstants constants(const NonlinearityProfile& profile, double r2);

}  // namespace pmlab
