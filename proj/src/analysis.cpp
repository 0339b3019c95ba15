#include "chemo/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace chemo {

DecayFit fit_decay(const NormSeries& series, FitWindow window, FitKind kind) {
  if (!(window.lo < window.hi)) throw std::invalid_argument("fit window must satisfy lo < hi");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t < window.lo || t > window.hi) continue;
    const double v = series.values[i];
    if (!(v > 0)) throw std::domain_error("nonpositive value in fit window of " + series.label);
    xs.push_back(kind == FitKind::Power ? std::log(t) : t);
    ys.push_back(std::log(v));
  }
  if (xs.size() < 10)
    throw std::invalid_argument("fit of " + series.label + " needs at least 10 samples in window, got " +
                                std::to_string(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const double x_mean = x.mean();
  const double y_mean = y.mean();
  const Eigen::VectorXd dx = x.array() - x_mean;
  const Eigen::VectorXd dy = y.array() - y_mean;
  DecayFit fit;
  fit.exponent = dx.dot(dy) / dx.squaredNorm();
  fit.intercept = y_mean - fit.exponent * x_mean;
  const double ss_tot = dy.squaredNorm();
  const double ss_res = (dy - fit.exponent * dx).squaredNorm();
  fit.r_squared = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  fit.window = window;
  fit.samples = xs.size();
  return fit;
}

namespace {

double weighted_sup(const NormSeries& series, double delta) {
  if (delta < 0) throw std::invalid_argument("functional exponent must be nonnegative");
  if (series.empty()) throw std::invalid_argument("functional of an empty series");
  double sup = 0;
  for (std::size_t i = 0; i < series.size(); ++i)
    sup = std::max(sup, std::max(1.0, std::pow(series.times[i], delta)) * series.values[i]);
  return sup;
}

}  // namespace

double functional_M(const NormSeries& series, double delta) {
  if (series.kind != NormKind::L2) throw std::invalid_argument("functional M needs an L2 series, got " + series.label);
  return weighted_sup(series, delta);
}

double functional_N(const NormSeries& series, double delta) {
  if (series.kind != NormKind::Linf)
    throw std::invalid_argument("functional N needs an Linf series, got " + series.label);
  return weighted_sup(series, delta);
}

NormSeries running_functional(const NormSeries& series, double delta) {
  if (delta < 0) throw std::invalid_argument("functional exponent must be nonnegative");
  NormSeries out;
  out.label = series.label + "_sup";
  out.kind = series.kind;
  double sup = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sup = std::max(sup, std::max(1.0, std::pow(series.times[i], delta)) * series.values[i]);
    out.push(series.times[i], sup);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convolution integrals

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
  double kronrod;
  double error;
};

template <typename F>
Segment gauss_kronrod(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <typename F>
double adaptive_integral(const F& f, double a, double b, double tol, int depth) {
  const Segment whole = gauss_kronrod(f, a, b);
  if (whole.error <= tol || (b - a) < 1e-12) return whole.kronrod;
  if (depth <= 0) throw std::runtime_error("convolution quadrature did not converge");
  const double mid = 0.5 * (a + b);
  return adaptive_integral(f, a, mid, 0.5 * tol, depth - 1) + adaptive_integral(f, mid, b, 0.5 * tol, depth - 1);
}

double capped_power(double x, double exponent) {
  if (exponent == 0 || x <= 1) return 1.0;
  return std::pow(x, -exponent);
}

bool is_one(double x) { return std::abs(x - 1.0) < 1e-12; }

}  // namespace

double convolution_integral(double gamma_exp, double delta_exp, double t) {
  if (gamma_exp < 0 || delta_exp < 0) throw std::invalid_argument("convolution exponents must be nonnegative");
  if (!(t > 0)) throw std::invalid_argument("convolution time must be positive");
  const auto integrand = [&](double s) { return capped_power(t - s, gamma_exp) * capped_power(s, delta_exp); };
  // Breakpoints at the caps and the midpoint; on [1, t-1] the power laws are
  // integrated in log-substituted form, which keeps them nearly polynomial.
  std::vector<double> cuts = {0.0, t};
  for (double c : {1.0, t - 1.0, 0.5 * t})
    if (c > 0 && c < t) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double tol = 1e-13 * std::max(1.0, b - a);
    if (a >= 1.0 && b <= 0.5 * t + 1e-12) {
      // s = e^y
      const auto g = [&](double y) {
        const double s = std::exp(y);
        return integrand(s) * s;
      };
      total += adaptive_integral(g, std::log(a), std::log(b), tol, 60);
    } else if (a >= 0.5 * t - 1e-12 && b <= t - 1.0 + 1e-12 && b > a) {
      // t - s = e^y
      const auto g = [&](double y) {
        const double r = std::exp(y);
        return integrand(t - r) * r;
      };
      total += adaptive_integral(g, std::log(t - b), std::log(t - a), tol, 60);
    } else {
      total += adaptive_integral(integrand, a, b, tol, 60);
    }
  }
  return total;
}

std::string convolution_lemma_case(double gamma_exp, double delta_exp) {
  if (gamma_exp == 0 || delta_exp == 0) {
    const double other = gamma_exp == 0 ? delta_exp : gamma_exp;
    if (other > 1 && !is_one(other)) return "single power, exponent>1";
    if (is_one(other)) return "single power, exponent=1";
    return "single power, 0<=exponent<1";
  }
  if (is_one(delta_exp) || is_one(gamma_exp)) {
    const double other = is_one(delta_exp) ? gamma_exp : delta_exp;
    if (other <= 1 || is_one(other)) return is_one(delta_exp) ? "gamma<=1, delta=1" : "gamma=1, delta<=1";
    return is_one(delta_exp) ? "gamma>1, delta=1" : "gamma=1, delta>1";
  }
  return "gamma, delta != 1";
}

double convolution_lemma_bound(double gamma_exp, double delta_exp, double t) {
  if (gamma_exp == 0 || delta_exp == 0) {
    // With one exponent zero the integral reduces to int_0^t min{1, s^-e} ds.
    const double e = gamma_exp == 0 ? delta_exp : gamma_exp;
    if (is_one(e)) return std::log(t);
    if (e > 1) return 1.0;
    return std::pow(t, 1.0 - e);
  }
  const double nu = std::min({gamma_exp, delta_exp, gamma_exp + delta_exp - 1.0});
  const std::string label = convolution_lemma_case(gamma_exp, delta_exp);
  if (label == "gamma>1, delta=1" || label == "gamma=1, delta>1") return std::min(1.0, 1.0 / t);
  if (label == "gamma<=1, delta=1" || label == "gamma=1, delta<=1")
    return std::min(1.0, std::pow(t, -nu) * (1.0 + std::log(t)));
  // For nu < 0 the integral grows like t^{-nu}; min{1, .} only caps the decaying case.
  if (nu < 0) return std::pow(t, -nu);
  return std::min(1.0, std::pow(t, -nu));
}

ConvolutionCheck convolution_bound_check(double gamma_exp, double delta_exp, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  ConvolutionCheck out;
  out.case_label = convolution_lemma_case(gamma_exp, delta_exp);
  for (double t : t_grid) {
    if (t < 2) throw std::invalid_argument("convolution lemma applies for t >= 2");
    const double ratio = convolution_integral(gamma_exp, delta_exp, t) / convolution_lemma_bound(gamma_exp, delta_exp, t);
    out.ratios.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

std::vector<double> refine_time_grid(const std::vector<double>& t_grid, int factor) {
  if (factor < 1) throw std::invalid_argument("refinement factor must be >= 1");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    const double ratio = t_grid[i + 1] / t_grid[i];
    for (int k = 0; k < factor; ++k) out.push_back(t_grid[i] * std::pow(ratio, static_cast<double>(k) / factor));
  }
  if (!t_grid.empty()) out.push_back(t_grid.back());
  return out;
}

// ---------------------------------------------------------------------------
// Rate table

double conservative_rate(int n, int k) {
  const double q = n / 4.0;
  if (k <= 0) return q;
  return std::min(q + 0.5 + 0.5 * ((k + 1) / 2), q + conservative_rate(n, k / 2));
}

double dissipative_rate(int n, int k) {
  const double q = n / 4.0;
  if (k <= 0) return std::min(n / 2.0, q + 0.5);
  return std::min(q + 1.0 + 0.5 * ((k + 1) / 2), q + conservative_rate(n, k / 2));
}

double constant_state_rate(int n) { return std::min(n / 4.0, n / 8.0 + 1.0); }

double comparison_rate(int n) { return std::min(n / 4.0 + 0.5, n / 2.0); }

std::vector<ExpectedRate> expected_rates(int n, int max_order) {
  if (n < 1 || n > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  std::vector<ExpectedRate> table;
  const double half = n / 2.0;
  table.push_back({"u_Linf", half});
  table.push_back({"u_L2", n / 4.0});
  for (int k = 1; k <= max_order; ++k) table.push_back({"u_D" + std::to_string(k) + "_L2", conservative_rate(n, k)});
  table.push_back({"v_agg_Linf", half});
  table.push_back({"v_agg_L2", dissipative_rate(n, 0)});
  for (int k = 1; k <= max_order; ++k) table.push_back({"v_D" + std::to_string(k) + "_L2", dissipative_rate(n, k)});
  table.push_back({"phi_Linf", half});
  table.push_back({"gphi_Linf", half});
  table.push_back({"phi_L2", n / 4.0});
  table.push_back({"gphi_L2", conservative_rate(n, 0)});
  for (int k = 1; k <= max_order; ++k)
    table.push_back({"phi_D" + std::to_string(k + 1) + "_L2", conservative_rate(n, k)});
  return table;
}

double default_tolerance(const std::string& quantity) {
  const std::string suffix = "_Linf";
  if (quantity.size() >= suffix.size() && quantity.compare(quantity.size() - suffix.size(), suffix.size(), suffix) == 0)
    return 0.15;
  return 0.1;
}

bool DecayReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

DecayReport assemble_report(const std::map<std::string, DecayFit>& fits, const std::vector<ExpectedRate>& table,
                            const std::function<double(const std::string&)>& tolerance) {
  DecayReport report;
  for (const ExpectedRate& row : table) {
    const auto it = fits.find(row.quantity);
    if (it == fits.end()) continue;
    ReportEntry e;
    e.quantity = row.quantity;
    e.expected_exponent = -row.rate;
    e.fitted_exponent = it->second.exponent;
    e.gap = std::abs(e.fitted_exponent - e.expected_exponent);
    e.tolerance = tolerance(row.quantity);
    e.r_squared = it->second.r_squared;
    e.window = it->second.window;
    e.pass = e.fitted_exponent <= e.expected_exponent + e.tolerance;
    if (e.fitted_exponent < e.expected_exponent - e.tolerance) e.note = "decays faster than expected";
    if (!it->second.reliable()) e.note += std::string(e.note.empty() ? "" : "; ") + "unreliable fit (r^2 < 0.98)";
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace chemo
