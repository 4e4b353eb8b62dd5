// Command-line front end: codebook generation, experiment runs, single-block
// decoding, plotting and result summaries.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ura/channel.hpp"
#include "ura/codebook.hpp"
#include "ura/covariance.hpp"
#include "ura/decoders.hpp"
#include "ura/experiment.hpp"
#include "ura/io.hpp"
#include "ura/plots.hpp"

namespace {

int cmd_gen_codebook(const std::string& kind, arma::uword rows,
                     arma::uword cols, std::uint64_t seed,
                     const std::string& out, bool report) {
  ura::Codebook cb;
  switch (ura::codebook_kind_from_string(kind)) {
    case ura::CodebookKind::SubsampledFourier:
      cb = ura::gen_subsampled_fourier(rows, cols, seed);
      break;
    case ura::CodebookKind::SphereUniform:
      cb = ura::gen_sphere_uniform(rows, cols, seed);
      break;
    case ura::CodebookKind::Bernoulli:
      cb = ura::gen_bernoulli(rows, cols, seed);
      break;
  }
  ura::save_codebook(cb, out);
  std::printf("wrote %s: kind=%s D=%llu N=%llu seed=%llu\n", out.c_str(),
              kind.c_str(), static_cast<unsigned long long>(cb.rows()),
              static_cast<unsigned long long>(cb.cols()),
              static_cast<unsigned long long>(cb.seed));
  if (report && cb.cols() >= 2) {
    const ura::CoherenceReport rep = ura::mutual_coherence(cb);
    std::printf("coherence mu=%.6f at (%llu,%llu); sphere bound %.4f, "
                "bernoulli bound %.4f\n",
                rep.mu,
                static_cast<unsigned long long>(rep.argmax_pair.first),
                static_cast<unsigned long long>(rep.argmax_pair.second),
                rep.bound_sphere, rep.bound_bernoulli);
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            bool redact_timing) {
  std::vector<ura::ExperimentConfig> configs =
      ura::load_experiment_configs(config_path);
  for (ura::ExperimentConfig& cfg : configs) {
    cfg.redact_timing = cfg.redact_timing || redact_timing;
    ura::validate_config(cfg);
  }

  std::vector<ura::ResultRow> all_rows;
  for (const ura::ExperimentConfig& cfg : configs) {
    std::fprintf(stderr,
                 "running %s: K=%d M=%llu D=%llu J=%d trials=%d grid=%zu\n",
                 cfg.decoder.c_str(), cfg.active_users,
                 static_cast<unsigned long long>(cfg.antennas),
                 static_cast<unsigned long long>(cfg.rows), cfg.section_bits,
                 cfg.trials, cfg.ebn0_grid_db.size());
    std::vector<ura::ResultRow> rows = ura::run_experiment(cfg);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot open %s for writing\n", out_path.c_str());
    return 1;
  }
  ura::write_result_csv(all_rows, out);
  std::fprintf(stderr, "wrote %zu rows to %s\n", all_rows.size(),
               out_path.c_str());
  return 0;
}

int cmd_decode(const std::string& codebook_path, const std::string& block_path,
               const std::string& decoder, double rho, arma::uword khat,
               int sweeps, double alpha, double tol, std::uint64_t seed) {
  const ura::Codebook cb = ura::load_codebook(codebook_path);
  const ura::ReceivedBlock blk = ura::load_block(block_path);
  if (blk.rows() != cb.rows()) {
    std::fprintf(stderr, "block D=%llu does not match codebook D=%llu\n",
                 static_cast<unsigned long long>(blk.rows()),
                 static_cast<unsigned long long>(cb.rows()));
    return 1;
  }

  ura::DecoderConfig cfg;
  cfg.rho = rho;
  cfg.k_hat = khat == 0 ? 1 : khat;
  cfg.max_sweeps = sweeps;
  cfg.alpha = alpha;
  cfg.tol = tol;
  cfg.seed = seed;

  ura::GammaEstimate est;
  if (decoder == "accml") {
    est = ura::accml(cb, blk, cfg);
  } else if (decoder == "ml") {
    est = ura::ml_coordinate_descent(cb, ura::sample_covariance(blk),
                                     blk.sigma2, ura::full_support(cb.cols()),
                                     cfg);
  } else if (decoder == "nnls") {
    est = ura::nnls(cb, ura::sample_covariance(blk), blk.sigma2, cfg);
  } else if (decoder == "iht") {
    est = ura::iht(cb, ura::sample_covariance(blk), blk.sigma2, cfg.k_hat,
                   cfg.alpha, cfg.max_sweeps, cfg.tol);
  } else if (decoder == "onestep") {
    const auto support = ura::one_step_iht(cb, ura::sample_covariance(blk),
                                           blk.sigma2, cfg.k_hat);
    std::printf("index\n");
    for (arma::uword k : support) {
      std::printf("%llu\n", static_cast<unsigned long long>(k));
    }
    return 0;
  } else {
    std::fprintf(stderr, "unknown decoder '%s'\n", decoder.c_str());
    return 1;
  }

  std::printf("index,gamma\n");
  // descending gamma over the strictly positive entries
  for (arma::uword k : ura::select_top(
           est.gamma_hat,
           std::max<arma::uword>(1, est.active_set.size()))) {
    if (est.gamma_hat(k) <= 0.0) break;
    std::printf("%llu,%s\n", static_cast<unsigned long long>(k),
                ura::format_double(est.gamma_hat(k)).c_str());
  }
  std::fprintf(stderr, "sweeps=%d screen=%lld active=%zu\n", est.sweeps_used,
               est.screen_size, est.active_set.size());
  return 0;
}

int cmd_plot(const std::string& in_path, const std::string& outdir) {
  const std::vector<std::string> written = ura::emit_plots(in_path, outdir);
  for (const std::string& path : written) {
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

int cmd_summarize(const std::string& in_path, double target_pe) {
  const std::vector<ura::ResultRow> rows = ura::load_result_csv(in_path);
  const std::vector<ura::SummaryRow> summary =
      ura::min_ebn0_for_target(rows, target_pe);
  std::printf("decoder,K,min_ebn0_db\n");
  for (const ura::SummaryRow& s : summary) {
    if (s.achieved) {
      std::printf("%s,%d,%s\n", s.decoder.c_str(), s.K,
                  ura::format_double(s.min_ebn0_db).c_str());
    } else {
      std::printf("%s,%d,NA\n", s.decoder.c_str(), s.K);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsourced random access simulation and decoding toolkit"};
  app.require_subcommand(1);

  // gen-codebook
  std::string kind = "fourier", out_path, config_path, in_path, outdir = ".";
  arma::uword rows = 0, cols = 0, khat = 0;
  std::uint64_t seed = 0;
  bool report = false, redact_timing = false;
  auto* gen = app.add_subcommand("gen-codebook", "Generate a codebook file");
  gen->add_option("--kind", kind, "fourier | sphere | bernoulli")->required();
  gen->add_option("--rows", rows, "channel uses per section (D)")->required();
  gen->add_option("--cols", cols, "codebook size (N)")->required();
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_option("--out", out_path, "output path")->required();
  gen->add_flag("--report", report, "print the mutual coherence report");

  auto* run = app.add_subcommand("run", "Run experiments from a JSON config");
  run->add_option("--config", config_path, "config JSON (object or array)")
      ->required();
  run->add_option("--out", out_path, "output CSV path")->required();
  run->add_flag("--redact-timing", redact_timing,
                "write timing as 0 for byte-reproducible output");

  std::string codebook_path, block_path, decoder = "accml";
  double rho = 1.0, alpha = 1.0, tol = 1e-6, target_pe = 0.05;
  int sweeps = 15;
  auto* dec = app.add_subcommand("decode", "Decode one stored block");
  dec->add_option("--codebook", codebook_path, "codebook file")->required();
  dec->add_option("--block", block_path, "received block file")->required();
  dec->add_option("--decoder", decoder, "accml | ml | nnls | iht | onestep")
      ->required();
  dec->add_option("--rho", rho, "screening threshold multiplier");
  dec->add_option("--khat", khat, "sparsity for iht/onestep");
  dec->add_option("--sweeps", sweeps, "sweep cap");
  dec->add_option("--alpha", alpha, "IHT step size");
  dec->add_option("--tol", tol, "relative-change stopping tolerance");
  dec->add_option("--seed", seed, "traversal shuffle seed");

  auto* plot = app.add_subcommand("plot", "Render SVG plots from a result CSV");
  plot->add_option("--in", in_path, "result CSV")->required();
  plot->add_option("--outdir", outdir, "output directory")->required();

  auto* summarize =
      app.add_subcommand("summarize", "Minimal Eb/N0 meeting a PUPE target");
  summarize->add_option("--in", in_path, "result CSV")->required();
  summarize->add_option("--target-pe", target_pe, "PUPE target");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen_codebook(kind, rows, cols, seed, out_path, report);
    }
    if (run->parsed()) return cmd_run(config_path, out_path, redact_timing);
    if (dec->parsed()) {
      return cmd_decode(codebook_path, block_path, decoder, rho, khat, sweeps,
                        alpha, tol, seed);
    }
    if (plot->parsed()) return cmd_plot(in_path, outdir);
    if (summarize->parsed()) return cmd_summarize(in_path, target_pe);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
