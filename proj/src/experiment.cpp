#include "ura/experiment.hpp"

#include <cblas.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ura/channel.hpp"
#include "ura/covariance.hpp"
#include "ura/io.hpp"
#include "ura/metrics.hpp"
#include "ura/rng.hpp"
#include "ura/tree_code.hpp"

namespace ura {

namespace {

// Sub-stream identifiers under the master seed. Channel and message streams
// are keyed by (trial, section) but not by the grid index, so all Eb/N0
// points of a run share fading and noise realizations (paired comparisons).
enum StreamId : std::uint64_t {
  kStreamCodebook = 1,
  kStreamTree = 2,
  kStreamMessages = 3,
  kStreamChannel = 4,
  kStreamDecoder = 5,
};

unsigned worker_cap() {
  if (const char* env = std::getenv("URA_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::string join_parity(const std::vector<int>& parity) {
  std::string out;
  for (std::size_t i = 0; i < parity.size(); ++i) {
    if (i > 0) out += '|';
    out += std::to_string(parity[i]);
  }
  return out;
}

std::vector<Message> draw_distinct_messages(int count, int bits,
                                            rng::Engine& eng) {
  std::set<Message> seen;
  while (seen.size() < static_cast<std::size_t>(count)) {
    Message msg(static_cast<std::size_t>(bits));
    for (auto& b : msg) b = rng::coin(eng) ? 1 : 0;
    seen.insert(std::move(msg));
  }
  return {seen.begin(), seen.end()};
}

Codebook build_codebook(CodebookKind kind, arma::uword D, arma::uword N,
                        std::uint64_t seed) {
  switch (kind) {
    case CodebookKind::SubsampledFourier:
      return gen_subsampled_fourier(D, N, seed);
    case CodebookKind::SphereUniform:
      return gen_sphere_uniform(D, N, seed);
    case CodebookKind::Bernoulli:
      return gen_bernoulli(D, N, seed);
  }
  throw std::invalid_argument("unknown codebook kind");
}

struct SectionOutcome {
  std::vector<arma::uword> list;
  double seconds = 0.0;
  double screen_size = 0.0;
  double sweeps = 0.0;
};

SectionOutcome decode_section(const ExperimentConfig& cfg, const Codebook& cb,
                              const ReceivedBlock& blk,
                              const DecoderConfig& dcfg) {
  const arma::uword T = static_cast<arma::uword>(cfg.list_size());
  SectionOutcome out;
  const auto t0 = std::chrono::steady_clock::now();

  GammaEstimate est;
  if (cfg.decoder == "accml") {
    est = accml(cb, blk, dcfg);
  } else if (cfg.decoder == "ml") {
    est = ml_coordinate_descent(cb, sample_covariance(blk), blk.sigma2,
                                full_support(cb.cols()), dcfg);
  } else if (cfg.decoder == "nnls") {
    est = nnls(cb, sample_covariance(blk), blk.sigma2, dcfg);
  } else if (cfg.decoder == "iht") {
    est = iht(cb, sample_covariance(blk), blk.sigma2, dcfg.k_hat, dcfg.alpha,
              dcfg.max_sweeps, dcfg.tol);
    est.screen_size = static_cast<long long>(dcfg.k_hat);
  } else if (cfg.decoder == "onestep") {
    // Candidate list = largest screening statistics (one-step IHT support,
    // ranked by the statistic itself).
    const arma::uword k_eff = std::min(std::max<arma::uword>(dcfg.k_hat, T),
                                       cb.cols());
    const ScreeningStatistic stat =
        blk.antennas() < blk.rows()
            ? screening_statistic(cb, blk)
            : screening_statistic(cb, sample_covariance(blk));
    est.gamma_hat.zeros(cb.cols());
    for (arma::uword k : select_top(stat.values, k_eff)) {
      est.gamma_hat(k) = stat.values(k);
    }
    est.sweeps_used = 1;
    est.screen_size = static_cast<long long>(k_eff);
  } else {
    throw std::invalid_argument("unknown decoder: " + cfg.decoder);
  }
  out.list = select_top(est.gamma_hat, T);

  const auto t1 = std::chrono::steady_clock::now();
  out.seconds = std::chrono::duration<double>(t1 - t0).count();
  out.screen_size = static_cast<double>(est.screen_size);
  out.sweeps = static_cast<double>(est.sweeps_used);
  return out;
}

}  // namespace

bool is_known_decoder(const std::string& name) {
  return name == "accml" || name == "ml" || name == "nnls" || name == "iht" ||
         name == "onestep";
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.schema_version != kConfigSchemaVersion) {
    throw std::invalid_argument("config: unsupported schema_version");
  }
  if (!is_known_decoder(cfg.decoder)) {
    throw std::invalid_argument("config: unknown decoder '" + cfg.decoder + "'");
  }
  if (cfg.rows < 1) throw std::invalid_argument("config: rows (D) must be >= 1");
  if (cfg.antennas < 1) throw std::invalid_argument("config: antennas (M) must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.ebn0_grid_db.empty()) {
    throw std::invalid_argument("config: ebn0_db grid must be nonempty");
  }
  if (cfg.lsfc <= 0.0) throw std::invalid_argument("config: lsfc must be positive");
  if (cfg.active_users < 1) {
    throw std::invalid_argument("config: active_users (K) must be >= 1");
  }
  if (cfg.list_margin < 0) {
    throw std::invalid_argument("config: list_margin (K_delta) must be >= 0");
  }

  // Delegates the allocation checks; also bounds J.
  make_tree_config(cfg.total_info_bits, cfg.sections, cfg.section_bits,
                   cfg.parity_alloc, 0);

  const arma::uword N = cfg.codebook_cols();
  if (static_cast<arma::uword>(cfg.list_size()) > N) {
    throw std::invalid_argument("config: T = K + K_delta must not exceed N = 2^J");
  }
  if (cfg.kind == CodebookKind::SubsampledFourier && cfg.rows > N) {
    throw std::invalid_argument("config: fourier codebook needs D <= N");
  }
  if (cfg.total_info_bits < 62 &&
      (std::uint64_t{1} << cfg.total_info_bits) <
          static_cast<std::uint64_t>(cfg.active_users)) {
    throw std::invalid_argument("config: fewer than K distinct B-bit messages exist");
  }

  DecoderConfig dcfg = cfg.decoder_cfg;
  if (dcfg.k_hat == 0) dcfg.k_hat = static_cast<arma::uword>(cfg.active_users);
  if (dcfg.rho <= 0.0 || dcfg.alpha <= 0.0 || dcfg.max_sweeps < 1 ||
      dcfg.tol <= 0.0) {
    throw std::invalid_argument("config: decoder parameters violate invariants");
  }
  if (dcfg.k_hat > N) {
    throw std::invalid_argument("config: khat must not exceed N");
  }
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);

  // Trial-level threads own the parallelism; keep BLAS single-threaded.
  openblas_set_num_threads(1);

  const arma::uword N = cfg.codebook_cols();
  const Codebook cb =
      build_codebook(cfg.kind, cfg.rows, N,
                     rng::derive_seed(cfg.master_seed, {kStreamCodebook}));
  const TreeCodeConfig tree =
      make_tree_config(cfg.total_info_bits, cfg.sections, cfg.section_bits,
                       cfg.parity_alloc,
                       rng::derive_seed(cfg.master_seed, {kStreamTree}));

  DecoderConfig dcfg = cfg.decoder_cfg;
  if (dcfg.k_hat == 0) dcfg.k_hat = static_cast<arma::uword>(cfg.active_users);

  const std::size_t grid_points = cfg.ebn0_grid_db.size();
  const std::size_t total_tasks = grid_points * static_cast<std::size_t>(cfg.trials);
  std::vector<ResultRow> rows(total_tasks);

  ResultRow proto;
  proto.decoder = cfg.decoder;
  proto.codebook_kind = to_string(cfg.kind);
  proto.D = cfg.rows;
  proto.J = cfg.section_bits;
  proto.N = N;
  proto.B = cfg.total_info_bits;
  proto.L = cfg.sections;
  proto.parity = join_parity(cfg.parity_alloc);
  proto.K = cfg.active_users;
  proto.K_delta = cfg.list_margin;
  proto.T = cfg.list_size();
  proto.M = cfg.antennas;
  proto.trials = cfg.trials;
  proto.master_seed = cfg.master_seed;

  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= total_tasks || failed.load()) break;
      const std::size_t gi = task / static_cast<std::size_t>(cfg.trials);
      const int trial = static_cast<int>(task % static_cast<std::size_t>(cfg.trials));
      try {
        const double ebn0_db = cfg.ebn0_grid_db[gi];
        const double sigma2 =
            ebn0_to_sigma2(ebn0_db, cfg.sections, cfg.rows,
                           cfg.total_info_bits, cfg.lsfc);

        rng::Engine msg_eng = rng::make_engine(
            cfg.master_seed,
            {kStreamMessages, static_cast<std::uint64_t>(trial)});
        const std::vector<Message> truth = draw_distinct_messages(
            cfg.active_users, cfg.total_info_bits, msg_eng);
        std::vector<MessageTuple> tuples;
        tuples.reserve(truth.size());
        for (const Message& msg : truth) tuples.push_back(tree_encode(msg, tree));

        SectionLists lists(static_cast<std::size_t>(cfg.sections));
        double seconds = 0.0, screen = 0.0, sweeps = 0.0;
        for (int l = 0; l < cfg.sections; ++l) {
          std::vector<std::pair<arma::uword, double>> users;
          users.reserve(tuples.size());
          for (const MessageTuple& tup : tuples) {
            users.emplace_back(tup.sections[static_cast<std::size_t>(l)], cfg.lsfc);
          }
          const ActivityVector act = build_activity(users, N);
          const ReceivedBlock blk = simulate_block(
              cb, act, cfg.antennas, sigma2,
              rng::derive_seed(cfg.master_seed,
                               {kStreamChannel, static_cast<std::uint64_t>(trial),
                                static_cast<std::uint64_t>(l)}));

          DecoderConfig section_cfg = dcfg;
          section_cfg.seed = rng::derive_seed(
              cfg.master_seed, {kStreamDecoder, static_cast<std::uint64_t>(trial),
                                static_cast<std::uint64_t>(l)});
          SectionOutcome outcome = decode_section(cfg, cb, blk, section_cfg);
          seconds += outcome.seconds;
          screen += outcome.screen_size;
          sweeps += outcome.sweeps;
          lists[static_cast<std::size_t>(l)].assign(outcome.list.begin(),
                                                    outcome.list.end());
        }

        // Candidate indices are section values directly (uword -> u32).
        SectionLists lists32(lists.size());
        for (std::size_t l = 0; l < lists.size(); ++l) {
          lists32[l].reserve(lists[l].size());
          for (arma::uword v : lists[l]) {
            lists32[l].push_back(static_cast<std::uint32_t>(v));
          }
        }
        const std::vector<Message> decoded =
            tree_decode(lists32, tree, static_cast<std::size_t>(cfg.list_size()));
        const DecodingReport rep = pupe(decoded, truth);

        ResultRow row = proto;
        row.ebn0_db = ebn0_db;
        row.sigma2 = sigma2;
        row.trial = trial;
        row.p_md = rep.p_md;
        row.p_fa = rep.p_fa;
        row.p_e = rep.p_e;
        row.decode_seconds_per_section =
            cfg.redact_timing ? 0.0 : seconds / cfg.sections;
        row.screen_size_mean = screen / cfg.sections;
        row.sweeps_mean = sweeps / cfg.sections;
        rows[task] = std::move(row);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure_message = e.what();
        failed.store(true);
        break;
      }
    }
  };

  const unsigned workers =
      std::min<std::size_t>(worker_cap(), total_tasks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) {
    throw std::runtime_error("experiment trial failed: " + failure_message);
  }
  return rows;
}

namespace {

constexpr const char* kCsvHeader =
    "decoder,codebook,D,J,N,B,L,parity,K,K_delta,T,M,trials,master_seed,"
    "ebn0_db,sigma2,trial,p_md,p_fa,p_e,decode_seconds_per_section,"
    "screen_size_mean,sweeps_mean";

// Splits one CSV record, honoring RFC-4180 quoting.
std::vector<std::string> split_csv_line(const std::string& line,
                                        std::size_t line_number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty()) {
        throw std::runtime_error("CSV line " + std::to_string(line_number) +
                                 ": stray quote");
      }
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw std::runtime_error("CSV line " + std::to_string(line_number) +
                             ": unterminated quote");
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_double(const std::string& s, std::size_t line_number) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("CSV line " + std::to_string(line_number) +
                             ": bad number '" + s + "'");
  }
}

long long parse_int(const std::string& s, std::size_t line_number) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("CSV line " + std::to_string(line_number) +
                             ": bad integer '" + s + "'");
  }
}

}  // namespace

void write_result_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const ResultRow& r : rows) {
    out << csv_quote(r.decoder) << ',' << csv_quote(r.codebook_kind) << ','
        << r.D << ',' << r.J << ',' << r.N << ',' << r.B << ',' << r.L << ','
        << csv_quote(r.parity) << ',' << r.K << ',' << r.K_delta << ',' << r.T
        << ',' << r.M << ',' << r.trials << ',' << r.master_seed << ','
        << format_double(r.ebn0_db) << ',' << format_double(r.sigma2) << ','
        << r.trial << ',' << format_double(r.p_md) << ','
        << format_double(r.p_fa) << ',' << format_double(r.p_e) << ','
        << format_double(r.decode_seconds_per_section) << ','
        << format_double(r.screen_size_mean) << ','
        << format_double(r.sweeps_mean) << "\n";
  }
}

std::string result_csv_string(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_result_csv(rows, out);
  return out.str();
}

std::vector<ResultRow> read_result_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("CSV line 1: missing header");
  }
  ++line_number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw std::runtime_error("CSV line 1: unexpected header");
  }

  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line, line_number);
    if (f.size() != 23) {
      throw std::runtime_error("CSV line " + std::to_string(line_number) +
                               ": expected 23 fields, got " +
                               std::to_string(f.size()));
    }
    ResultRow r;
    r.decoder = f[0];
    r.codebook_kind = f[1];
    r.D = static_cast<arma::uword>(parse_int(f[2], line_number));
    r.J = static_cast<int>(parse_int(f[3], line_number));
    r.N = static_cast<arma::uword>(parse_int(f[4], line_number));
    r.B = static_cast<int>(parse_int(f[5], line_number));
    r.L = static_cast<int>(parse_int(f[6], line_number));
    r.parity = f[7];
    r.K = static_cast<int>(parse_int(f[8], line_number));
    r.K_delta = static_cast<int>(parse_int(f[9], line_number));
    r.T = static_cast<int>(parse_int(f[10], line_number));
    r.M = static_cast<arma::uword>(parse_int(f[11], line_number));
    r.trials = static_cast<int>(parse_int(f[12], line_number));
    r.master_seed = static_cast<std::uint64_t>(parse_int(f[13], line_number));
    r.ebn0_db = parse_double(f[14], line_number);
    r.sigma2 = parse_double(f[15], line_number);
    r.trial = static_cast<int>(parse_int(f[16], line_number));
    r.p_md = parse_double(f[17], line_number);
    r.p_fa = parse_double(f[18], line_number);
    r.p_e = parse_double(f[19], line_number);
    r.decode_seconds_per_section = parse_double(f[20], line_number);
    r.screen_size_mean = parse_double(f[21], line_number);
    r.sweeps_mean = parse_double(f[22], line_number);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> load_result_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path);
  return read_result_csv(in);
}

namespace {

ExperimentConfig config_from_json_value(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.schema_version = j.at("schema_version").get<int>();

  const auto& cb = j.at("codebook");
  cfg.kind = codebook_kind_from_string(cb.at("kind").get<std::string>());
  cfg.rows = cb.at("rows").get<arma::uword>();

  const auto& tree = j.at("tree");
  cfg.total_info_bits = tree.at("info_bits").get<int>();
  cfg.sections = tree.at("sections").get<int>();
  cfg.section_bits = tree.at("section_bits").get<int>();
  cfg.parity_alloc = tree.at("parity").get<std::vector<int>>();

  cfg.active_users = j.at("active_users").get<int>();
  cfg.list_margin = j.at("list_margin").get<int>();
  cfg.antennas = j.at("antennas").get<arma::uword>();
  cfg.ebn0_grid_db = j.at("ebn0_db").get<std::vector<double>>();

  const auto& dec = j.at("decoder");
  cfg.decoder = dec.at("name").get<std::string>();
  cfg.decoder_cfg.rho = dec.value("rho", 1.0);
  cfg.decoder_cfg.k_hat = dec.value("khat", arma::uword{0});
  cfg.decoder_cfg.alpha = dec.value("alpha", 1.0);
  cfg.decoder_cfg.max_sweeps = dec.value("max_sweeps", 15);
  cfg.decoder_cfg.tol = dec.value("tol", 1e-6);

  cfg.trials = j.at("trials").get<int>();
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  cfg.lsfc = j.value("lsfc", 1.0);
  return cfg;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  return config_from_json_value(nlohmann::json::parse(text));
}

std::vector<ExperimentConfig> load_experiment_configs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  std::vector<ExperimentConfig> configs;
  if (j.is_array()) {
    for (const auto& item : j) configs.push_back(config_from_json_value(item));
  } else {
    configs.push_back(config_from_json_value(j));
  }
  if (configs.empty()) {
    throw std::invalid_argument("config file holds an empty array");
  }
  return configs;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = cfg.schema_version;
  j["codebook"] = {{"kind", to_string(cfg.kind)}, {"rows", cfg.rows}};
  j["tree"] = {{"info_bits", cfg.total_info_bits},
               {"sections", cfg.sections},
               {"section_bits", cfg.section_bits},
               {"parity", cfg.parity_alloc}};
  j["active_users"] = cfg.active_users;
  j["list_margin"] = cfg.list_margin;
  j["antennas"] = cfg.antennas;
  j["ebn0_db"] = cfg.ebn0_grid_db;
  j["decoder"] = {{"name", cfg.decoder},
                  {"rho", cfg.decoder_cfg.rho},
                  {"khat", cfg.decoder_cfg.k_hat},
                  {"alpha", cfg.decoder_cfg.alpha},
                  {"max_sweeps", cfg.decoder_cfg.max_sweeps},
                  {"tol", cfg.decoder_cfg.tol}};
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["lsfc"] = cfg.lsfc;
  return j.dump(2);
}

std::vector<SummaryRow> min_ebn0_for_target(const std::vector<ResultRow>& rows,
                                            double target_pe) {
  // (decoder, K) -> ebn0 -> (sum p_e, count)
  std::map<std::pair<std::string, int>, std::map<double, std::pair<double, int>>>
      groups;
  for (const ResultRow& r : rows) {
    auto& cell = groups[{r.decoder, r.K}][r.ebn0_db];
    cell.first += r.p_e;
    cell.second += 1;
  }

  std::vector<SummaryRow> summary;
  for (const auto& [key, grid] : groups) {
    SummaryRow s;
    s.decoder = key.first;
    s.K = key.second;
    for (const auto& [ebn0, cell] : grid) {  // std::map: ascending ebn0
      if (cell.first / cell.second <= target_pe) {
        s.achieved = true;
        s.min_ebn0_db = ebn0;
        break;
      }
    }
    summary.push_back(std::move(s));
  }
  return summary;
}

std::vector<ExperimentConfig> fig3b_preset(const std::string& decoder,
                                           std::vector<double> ebn0_grid_db,
                                           int trials,
                                           std::uint64_t master_seed) {
  std::vector<ExperimentConfig> configs;
  for (int K : {50, 75, 100, 125, 150}) {
    ExperimentConfig cfg;
    cfg.kind = CodebookKind::SubsampledFourier;
    cfg.rows = 120;
    cfg.total_info_bits = 50;
    cfg.sections = 12;
    cfg.section_bits = 12;
    cfg.parity_alloc = {0, 7, 8, 8, 8, 8, 8, 8, 8, 8, 11, 12};
    cfg.active_users = K;
    cfg.list_margin = 50;
    cfg.antennas = 64;
    cfg.ebn0_grid_db = ebn0_grid_db;
    cfg.decoder = decoder;
    cfg.decoder_cfg.rho = 1.05;
    cfg.trials = trials;
    cfg.master_seed = master_seed;
    configs.push_back(std::move(cfg));
  }
  return configs;
}

}  // namespace ura
