#include <CLI11.hpp>
#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dpp/dynamics.hpp"
#include "dpp/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string kernel_path;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
};

void add_global(CLI::App* cmd, GlobalOpts& g, bool kernel_required = true) {
  cmd->set_help_flag("--help", "print help");  // frees --h for the step size
  auto* k = cmd->add_option("--kernel", g.kernel_path,
                            "kernel spec JSON (or built-in bergman/dyson)");
  if (kernel_required) k->required();
  cmd->add_option("--seed", g.seed, "root RNG seed");
  cmd->add_option("--out", g.out_dir, "output directory");
  cmd->add_option("--threads", g.threads, "worker bound")
      ->check(CLI::PositiveNumber);
}

dpp::SpectralKernel load_kernel(const std::string& path) {
  if (path == "bergman") return dpp::make_bergman_kernel(0.5, 2);
  if (path == "dyson") return dpp::make_dyson_kernel(3);
  if (!fs::exists(path))
    throw dpp::ParameterError("kernel spec not found: " + path);
  return dpp::kernel_from_json_file(path);
}

std::uint64_t kernel_hash_of(const std::string& path) {
  if (!fs::exists(path)) return dpp::hash_label(path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return dpp::kernel_spec_hash(text);
}

fs::path out_file(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

int cmd_sample(const GlobalOpts& g, int n) {
  const dpp::SpectralKernel k = load_kernel(g.kernel_path);
  const dpp::SampleBatch batch = dpp::sample_dpp(k, n, g.seed);
  dpp::write_batch_csv(batch, out_file(g, "samples.csv").string(),
                       out_file(g, "samples.meta.json").string(),
                       kernel_hash_of(g.kernel_path));
  std::cout << "wrote " << batch.size() << " samples to "
            << out_file(g, "samples.csv").string() << "\n";
  return 0;
}

int cmd_evolve(const GlobalOpts& g, double h, double T, int record_every,
               int n_paths, const std::string& boundary,
               const std::string& taming) {
  const dpp::SpectralKernel k = load_kernel(g.kernel_path);
  dpp::SdeConfig cfg;
  cfg.step_size = h;
  cfg.horizon = T;
  cfg.record_every = record_every;
  if (boundary == "auto")
    cfg.boundary = k.domain().any_periodic() ? dpp::Boundary::Periodic
                                             : dpp::Boundary::Reflect;
  else if (boundary == "reflect")
    cfg.boundary = dpp::Boundary::Reflect;
  else if (boundary == "reject")
    cfg.boundary = dpp::Boundary::RejectStep;
  else if (boundary == "periodic")
    cfg.boundary = dpp::Boundary::Periodic;
  else
    throw dpp::ParameterError("unknown boundary: " + boundary);
  if (taming == "none")
    cfg.taming = dpp::Taming::None;
  else if (taming == "tamed")
    cfg.taming = dpp::Taming::Tamed;
  else if (taming == "capped")
    cfg.taming = dpp::Taming::CappedStep;
  else
    throw dpp::ParameterError("unknown taming: " + taming);

  const dpp::SampleBatch init =
      dpp::sample_dpp(k, n_paths, dpp::derive_seed(g.seed, "evolve-init"));
  std::ofstream csv(out_file(g, "trajectory.csv"));
  csv << "path_id,time,point_id";
  for (int a = 0; a < k.domain().dimension(); ++a) csv << ",x_" << (a + 1);
  csv << "\n";
  json summary = json::array();
  for (int p = 0; p < n_paths; ++p) {
    cfg.seed = dpp::derive_seed(g.seed, "evolve-path",
                                static_cast<std::uint64_t>(p));
    const dpp::TrajectoryRecord rec =
        dpp::evolve(k, init.configurations[p], cfg);
    const fs::path tmp_csv = out_file(g, "path_tmp.csv");
    const fs::path tmp_sum = out_file(g, "path_tmp.json");
    dpp::write_trajectory_csv(rec, tmp_csv.string(), tmp_sum.string(), p);
    std::ifstream in(tmp_csv);
    std::string line;
    std::getline(in, line);  // skip per-path header
    while (std::getline(in, line)) csv << line << "\n";
    std::ifstream sin(tmp_sum);
    json s = json::parse(sin);
    s["path_id"] = p;
    summary.push_back(s);
    fs::remove(tmp_csv);
    fs::remove(tmp_sum);
  }
  std::ofstream sf(out_file(g, "trajectory.summary.json"));
  sf << summary.dump(2) << "\n";
  std::cout << "wrote " << n_paths << " paths to "
            << out_file(g, "trajectory.csv").string() << "\n";
  return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& config_csv) {
  const dpp::SpectralKernel k = load_kernel(g.kernel_path);
  const dpp::SampleBatch batch =
      dpp::read_batch_csv(config_csv, k.domain().dimension());
  json out = json::array();
  for (int s = 0; s < batch.size(); ++s) {
    const auto& cfg = batch.configurations[s];
    for (int i = 0; i < cfg.size(); ++i)
      if (!k.domain().contains(cfg.point(i)))
        throw dpp::ParameterError("configuration " + std::to_string(s) +
                                  ": point " + std::to_string(i) +
                                  " lies outside the domain");
    json e;
    e["configuration"] = s;
    e["n_points"] = cfg.size();
    const dpp::DetValue jd = dpp::janossy_density(k, cfg);
    e["janossy"] = jd.value;
    e["log_janossy"] = std::isfinite(jd.log_value)
                           ? json(jd.log_value)
                           : json(nullptr);
    e["correlation"] = dpp::correlation_fn(k, cfg);
    const dpp::Potential u = dpp::potential_u(k, cfg);
    e["potential"] = u.finite() ? json(u.value) : json(nullptr);
    try {
      const Eigen::MatrixXd dr = dpp::drift(k, cfg);
      json rows = json::array();
      for (int i = 0; i < dr.rows(); ++i) {
        json row = json::array();
        for (int a = 0; a < dr.cols(); ++a) row.push_back(dr(i, a));
        rows.push_back(row);
      }
      e["drift"] = rows;
    } catch (const dpp::InfinitePotentialError&) {
      e["drift"] = nullptr;
    }
    out.push_back(e);
  }
  std::ofstream f(out_file(g, "eval.json"));
  f << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& config_path,
               const std::vector<std::string>& suites, int n_samples) {
  json cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in)
      throw dpp::ParameterError("cannot open config: " + config_path);
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw dpp::ParameterError(std::string("config parse error: ") +
                                e.what());
    }
  }
  if (!suites.empty()) cfg["suites"] = suites;
  if (!cfg.contains("seed")) cfg["seed"] = g.seed;
  if (!cfg.contains("n_samples")) cfg["n_samples"] = n_samples;
  if (!cfg.contains("kernel") && !g.kernel_path.empty() &&
      g.kernel_path != "bergman")
    cfg["kernel"] = g.kernel_path;
  const dpp::AggregateReport rep = dpp::run_all(cfg.dump());
  std::ofstream f(out_file(g, "verify.json"));
  f << rep.to_json() << "\n";
  std::cout << rep.to_json() << "\n";
  return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"determinantal point process toolkit"};
  app.require_subcommand(1);

  GlobalOpts g_sample, g_evolve, g_eval, g_verify;

  auto* sample = app.add_subcommand("sample", "draw exact DPP samples");
  add_global(sample, g_sample);
  int n_samples = 1000;
  sample->add_option("--n", n_samples, "number of samples")
      ->check(CLI::NonNegativeNumber);

  auto* evolve = app.add_subcommand("evolve", "integrate the Langevin diffusion");
  add_global(evolve, g_evolve);
  double h = 1e-3, T = 1.0;
  int record_every = 10, n_paths = 1;
  std::string boundary = "auto", taming = "tamed";
  evolve->add_option("--h", h, "step size")->check(CLI::PositiveNumber);
  evolve->add_option("--T", T, "horizon")->check(CLI::NonNegativeNumber);
  evolve->add_option("--record-every", record_every, "recording stride")
      ->check(CLI::PositiveNumber);
  evolve->add_option("--paths", n_paths, "independent paths")
      ->check(CLI::PositiveNumber);
  evolve->add_option("--boundary", boundary,
                     "auto | reflect | reject | periodic");
  evolve->add_option("--taming", taming, "none | tamed | capped");

  auto* eval = app.add_subcommand("eval", "evaluate densities on configurations");
  add_global(eval, g_eval);
  std::string config_csv;
  eval->add_option("--points", config_csv, "configuration CSV")->required();

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_global(verify, g_verify, /*kernel_required=*/false);
  std::string verify_config;
  std::vector<std::string> suites;
  int verify_n = 20000;
  verify->add_option("--config", verify_config, "suite config JSON");
  verify->add_option("--suites", suites, "suite subset");
  verify->add_option("--n", verify_n, "samples per identity")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
    if (sample->parsed()) return cmd_sample(g_sample, n_samples);
    if (evolve->parsed())
      return cmd_evolve(g_evolve, h, T, record_every, n_paths, boundary,
                        taming);
    if (eval->parsed()) return cmd_eval(g_eval, config_csv);
    if (verify->parsed())
      return cmd_verify(g_verify, verify_config, suites, verify_n);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const dpp::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dpp::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
