#include "ura/decoders.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "ura/rng.hpp"

namespace ura {

namespace {

using cx = std::complex<double>;

constexpr double kDenomFloor = 1e-12;

void check_cfg(const DecoderConfig& cfg) {
  if (cfg.rho <= 0.0 || cfg.alpha <= 0.0 || cfg.max_sweeps < 1 ||
      cfg.tol <= 0.0 || cfg.k_hat < 1) {
    throw std::invalid_argument("decoder config: invariant violated");
  }
}

// Indices of the k largest entries by value, ties by lowest index.
std::vector<arma::uword> topk_by_value(const arma::vec& v, arma::uword k) {
  std::vector<arma::uword> idx(v.n_elem);
  std::iota(idx.begin(), idx.end(), arma::uword{0});
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](arma::uword a, arma::uword b) {
                      if (v(a) != v(b)) return v(a) > v(b);
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

std::vector<arma::uword> positive_entries(const arma::vec& gamma) {
  std::vector<arma::uword> out;
  for (arma::uword k = 0; k < gamma.n_elem; ++k) {
    if (gamma(k) > 0.0) out.push_back(k);
  }
  return out;
}

// y = H x for Hermitian H with a valid upper triangle.
void hemv_upper(const arma::cx_mat& H, const cx* x, cx* y) {
  const cx one(1.0, 0.0), zero(0.0, 0.0);
  cblas_zhemv(CblasColMajor, CblasUpper, static_cast<int>(H.n_rows), &one,
              H.memptr(), static_cast<int>(H.n_rows), x, 1, &zero, y, 1);
}

double dotc_real(arma::uword n, const cx* x, const cx* y) {
  cx out;
  cblas_zdotc_sub(static_cast<int>(n), x, 1, y, 1, &out);
  return out.real();
}

// H += alpha x x^* on the upper triangle only.
void her_upper(arma::cx_mat& H, double alpha, const cx* x) {
  cblas_zher(CblasColMajor, CblasUpper, static_cast<int>(H.n_rows), alpha, x,
             1, H.memptr(), static_cast<int>(H.n_rows));
}

void mirror_upper(arma::cx_mat& H) {
  for (arma::uword j = 0; j < H.n_cols; ++j) {
    for (arma::uword i = j + 1; i < H.n_rows; ++i) {
      H(i, j) = std::conj(H(j, i));
    }
  }
}

double frob_norm_from_upper(const arma::cx_mat& H) {
  double acc = 0.0;
  for (arma::uword j = 0; j < H.n_cols; ++j) {
    acc += std::norm(H(j, j));
    for (arma::uword i = 0; i < j; ++i) acc += 2.0 * std::norm(H(i, j));
  }
  return std::sqrt(acc);
}

// Eq.-(11)-style negative log-likelihood, evaluated from scratch.
double ml_objective(const arma::cx_mat& sigma, const arma::cx_mat& sigmahat) {
  const double logdet = arma::log_det_sympd(sigma);
  const arma::cx_mat x = arma::solve(sigma, sigmahat,
                                     arma::solve_opts::likely_sympd);
  return logdet + arma::trace(x).real();
}

}  // namespace

std::vector<arma::uword> one_step_iht(const Codebook& cb,
                                      const HermitianMatrix& sigmahat,
                                      double sigma2, arma::uword k_hat) {
  if (k_hat < 1 || k_hat > cb.cols()) {
    throw std::invalid_argument("one_step_iht: k_hat must lie in [1, N]");
  }
  const arma::vec grad = lifted_adjoint(cb, sigmahat, sigma2);
  std::vector<arma::uword> support = topk_by_value(grad, k_hat);
  std::sort(support.begin(), support.end());
  return support;
}

GammaEstimate iht(const Codebook& cb, const HermitianMatrix& sigmahat,
                  double sigma2, arma::uword k_hat, double alpha,
                  int max_iter, double tol) {
  const arma::uword N = cb.cols();
  const double D = static_cast<double>(cb.rows());
  if (k_hat < 1 || k_hat > N) {
    throw std::invalid_argument("iht: k_hat must lie in [1, N]");
  }
  if (alpha < 0.0 || max_iter < 1 || tol < 0.0) {
    throw std::invalid_argument("iht: invalid step size, iteration cap or tol");
  }

  GammaEstimate est;
  est.gamma_hat.zeros(N);

  // Residual Sigma_hat - Sigma(gamma); quadratic forms against it are the
  // lifted adjoint of u - A gamma.
  arma::cx_mat residual = sigmahat.mat();
  residual.diag() -= sigma2;
  const double scale = alpha / (D * D);
  est.objective_trace.push_back(
      std::pow(arma::norm(residual, "fro"), 2) / (2.0 * D * D));

  for (int iter = 1; iter <= max_iter; ++iter) {
    const arma::cx_mat prod = residual * cb.entries;
    const arma::vec grad =
        arma::real(arma::sum(arma::conj(cb.entries) % prod, 0)).t();

    arma::vec candidate = est.gamma_hat + scale * grad;
    const std::vector<arma::uword> keep = topk_by_value(candidate, k_hat);
    arma::vec next(N, arma::fill::zeros);
    for (arma::uword k : keep) next(k) = candidate(k);

    const double change = arma::norm(next - est.gamma_hat, 2);
    const double base = std::max(arma::norm(next, 2), 1e-12);
    est.sweeps_used = iter;

    est.gamma_hat = std::move(next);
    residual = sigmahat.mat();
    residual.diag() -= sigma2;
    arma::uvec supp = arma::find(est.gamma_hat != 0.0);
    if (!supp.empty()) {
      // gamma can be negative here, so weight the columns directly
      const arma::cx_mat cols = cb.entries.cols(supp);
      arma::cx_mat weighted = cols;
      weighted.each_row() %= arma::conv_to<arma::cx_rowvec>::from(
          est.gamma_hat(supp).t().eval());
      residual -= weighted * cols.t();
    }
    est.objective_trace.push_back(
        std::pow(arma::norm(residual, "fro"), 2) / (2.0 * D * D));

    if (change / base < tol) break;
  }

  est.active_set = positive_entries(est.gamma_hat);
  return est;
}

std::vector<arma::uword> threshold_screen(const ScreeningStatistic& stat,
                                          double rho) {
  if (rho <= 0.0) {
    throw std::invalid_argument("threshold_screen: rho must be positive");
  }
  std::vector<arma::uword> out;
  const double threshold = rho * stat.mean;
  for (arma::uword k = 0; k < stat.values.n_elem; ++k) {
    if (stat.values(k) > threshold) out.push_back(k);
  }
  return out;
}

GammaEstimate ml_coordinate_descent(const Codebook& cb,
                                    const HermitianMatrix& sigmahat,
                                    double sigma2,
                                    const std::vector<arma::uword>& support,
                                    const DecoderConfig& cfg,
                                    const arma::vec* initial_gamma) {
  check_cfg(cfg);
  const arma::uword D = cb.rows();
  const arma::uword N = cb.cols();
  if (sigma2 <= 0.0) {
    throw std::invalid_argument("ml: sigma2 must be positive");
  }
  if (sigmahat.dim() != D) {
    throw std::invalid_argument("ml: covariance dimension mismatch");
  }
  for (arma::uword k : support) {
    if (k >= N) throw std::invalid_argument("ml: support index out of range");
  }

  GammaEstimate est;
  est.gamma_hat.zeros(N);
  est.screen_size = static_cast<long long>(support.size());

  arma::cx_mat sinv(D, D, arma::fill::zeros);
  sinv.diag() += 1.0 / sigma2;
  if (initial_gamma != nullptr) {
    if (initial_gamma->n_elem != N || initial_gamma->min() < 0.0) {
      throw std::invalid_argument("ml: initial gamma must be a nonnegative N-vector");
    }
    arma::vec mask(N, arma::fill::ones);
    for (arma::uword k : support) mask(k) = 0.0;
    if (arma::any((*initial_gamma) % mask > 0.0)) {
      throw std::invalid_argument("ml: initial gamma must vanish outside the support");
    }
    est.gamma_hat = *initial_gamma;
    sinv = arma::inv_sympd(model_covariance(cb, est.gamma_hat, sigma2).mat());
  }

  const arma::cx_mat& shat = sigmahat.mat();
  arma::cx_mat sigma_fresh = model_covariance(cb, est.gamma_hat, sigma2).mat();
  est.objective_trace.push_back(ml_objective(sigma_fresh, shat));

  const double fidelity_budget = 1e-8 * std::sqrt(static_cast<double>(D));
  std::vector<arma::uword> order(support);
  rng::Engine eng = rng::make_engine(cfg.seed, {0x6d6c});
  arma::cx_vec s(D), w(D);

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    rng::shuffle(order, eng);  // fresh random traversal every sweep
    double max_step = 0.0;

    for (arma::uword k : order) {
      const cx* a = cb.entries.colptr(k);
      hemv_upper(sinv, a, s.memptr());
      double q = dotc_real(D, a, s.memptr());
      if (!(q > 0.0)) {
        // Maintained inverse lost positive definiteness; rebuild and retry.
        sinv = arma::inv_sympd(model_covariance(cb, est.gamma_hat, sigma2).mat());
        ++est.inverse_rebuilds;
        hemv_upper(sinv, a, s.memptr());
        q = dotc_real(D, a, s.memptr());
        if (!(q > 0.0)) {
          ++est.step_guard_events;
          continue;
        }
      }
      hemv_upper(shat, s.memptr(), w.memptr());
      const double num = dotc_real(D, s.memptr(), w.memptr()) - q;
      const double step_unclamped = num / (q * q);

      // Clamp before BOTH updates so sinv always equals Sigma(gamma)^{-1}.
      double step = std::max(step_unclamped, -est.gamma_hat(k));
      double denom = 1.0 + step * q;
      if (denom <= kDenomFloor) {
        step = (kDenomFloor - 1.0) / q;
        denom = kDenomFloor;
        ++est.step_guard_events;
      }
      if (step == 0.0) continue;

      est.gamma_hat(k) += step;
      her_upper(sinv, -step / denom, s.memptr());
      max_step = std::max(max_step, std::abs(step));
    }

    est.sweeps_used = sweep;
    mirror_upper(sinv);

    sigma_fresh = model_covariance(cb, est.gamma_hat, sigma2).mat();
    const double fidelity =
        arma::norm(sinv * sigma_fresh -
                       arma::eye<arma::cx_mat>(D, D), "fro");
    est.max_inverse_error = std::max(est.max_inverse_error, fidelity);
    if (fidelity > fidelity_budget) {
      sinv = arma::inv_sympd(sigma_fresh);
      ++est.inverse_rebuilds;
    }
    est.objective_trace.push_back(ml_objective(sigma_fresh, shat));

    const double base = std::max(est.gamma_hat.max(), 1e-12);
    if (max_step / base < cfg.tol) break;
  }

  est.active_set = positive_entries(est.gamma_hat);
  return est;
}

namespace detail {

RestrictedNnlsResult nnls_on_support(const Codebook& cb,
                                     const HermitianMatrix& sigmahat,
                                     double sigma2,
                                     const std::vector<arma::uword>& support,
                                     int max_sweeps, double tol,
                                     std::vector<double>* trace) {
  const arma::uword D = cb.rows();
  const arma::uword N = cb.cols();
  if (sigma2 < 0.0) {
    throw std::invalid_argument("nnls: sigma2 must be nonnegative");
  }
  if (sigmahat.dim() != D) {
    throw std::invalid_argument("nnls: covariance dimension mismatch");
  }
  for (arma::uword k : support) {
    if (k >= N) throw std::invalid_argument("nnls: support index out of range");
  }

  RestrictedNnlsResult res;
  res.gamma.zeros(N);
  const double D2 = static_cast<double>(D) * static_cast<double>(D);

  arma::cx_mat residual = sigmahat.mat();  // Sigma_hat - Sigma(gamma)
  residual.diag() -= sigma2;
  if (trace != nullptr) trace->push_back(frob_norm_from_upper(residual));

  arma::cx_vec w(D);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (arma::uword k : support) {  // cyclic traversal
      const cx* a = cb.entries.colptr(k);
      hemv_upper(residual, a, w.memptr());
      const double g = dotc_real(D, a, w.memptr());
      // Exact minimizer along the feasible half-line; ||a a^*||_F^2 = D^2.
      const double next = std::max(0.0, res.gamma(k) + g / D2);
      const double delta = next - res.gamma(k);
      if (delta != 0.0) {
        res.gamma(k) = next;
        her_upper(residual, -delta, a);
        max_step = std::max(max_step, std::abs(delta));
      }
    }
    res.sweeps_used = sweep;
    if (trace != nullptr) trace->push_back(frob_norm_from_upper(residual));
    const double base = std::max(res.gamma.max(), 1e-12);
    if (max_step / base < tol) break;
  }

  res.residual_norm = arma::norm(
      sigmahat.mat() - model_covariance(cb, res.gamma, sigma2).mat(), "fro");
  return res;
}

}  // namespace detail

GammaEstimate nnls(const Codebook& cb, const HermitianMatrix& sigmahat,
                   double sigma2, const DecoderConfig& cfg) {
  check_cfg(cfg);
  GammaEstimate est;
  auto res = detail::nnls_on_support(cb, sigmahat, sigma2,
                                     full_support(cb.cols()), cfg.max_sweeps,
                                     cfg.tol, &est.objective_trace);
  est.gamma_hat = std::move(res.gamma);
  est.sweeps_used = res.sweeps_used;
  est.screen_size = static_cast<long long>(cb.cols());
  est.active_set = positive_entries(est.gamma_hat);
  return est;
}

GammaEstimate accml(const Codebook& cb, const HermitianMatrix& sigmahat,
                    double sigma2, const DecoderConfig& cfg) {
  check_cfg(cfg);
  const ScreeningStatistic stat = screening_statistic(cb, sigmahat);
  const std::vector<arma::uword> screen = threshold_screen(stat, cfg.rho);
  if (screen.empty()) {
    GammaEstimate est;
    est.gamma_hat.zeros(cb.cols());
    est.screen_size = 0;
    est.empty_screen = true;
    return est;
  }
  return ml_coordinate_descent(cb, sigmahat, sigma2, screen, cfg);
}

GammaEstimate accml(const Codebook& cb, const ReceivedBlock& blk,
                    const DecoderConfig& cfg) {
  check_cfg(cfg);
  const HermitianMatrix sigmahat = sample_covariance(blk);
  // The raw-block screening route wins when M < D; the ML stage needs the
  // sample covariance either way.
  const ScreeningStatistic stat =
      blk.antennas() < blk.rows() ? screening_statistic(cb, blk)
                                  : screening_statistic(cb, sigmahat);
  const std::vector<arma::uword> screen = threshold_screen(stat, cfg.rho);
  if (screen.empty()) {
    GammaEstimate est;
    est.gamma_hat.zeros(cb.cols());
    est.screen_size = 0;
    est.empty_screen = true;
    return est;
  }
  return ml_coordinate_descent(cb, sigmahat, blk.sigma2, screen, cfg);
}

std::vector<arma::uword> select_top(const arma::vec& gamma, arma::uword T) {
  if (T < 1 || T > gamma.n_elem) {
    throw std::invalid_argument("select_top: T must lie in [1, N]");
  }
  return topk_by_value(gamma, T);
}

std::vector<arma::uword> select_top(const GammaEstimate& est, arma::uword T) {
  return select_top(est.gamma_hat, T);
}

}  // namespace ura
