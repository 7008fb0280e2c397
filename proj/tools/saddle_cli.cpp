#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "saddle/error.hpp"
#include "saddle/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw saddle::Error(saddle::ErrorCode::ConfigError, "cannot read config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw saddle::Error(saddle::ErrorCode::IoError, "cannot open " + path.string());
  f << text;
  f.close();
  if (!f) throw saddle::Error(saddle::ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient descent near strict saddles: trajectories, approximations and exit-time bounds"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::uint64_t seed = 0;

  struct Sub {
    const char* name;
    const char* help;
    saddle::Output (*run)(const saddle::ExperimentConfig&);
  };
  const Sub subs[] = {
      {"validate", "assumption report (Morse, strict saddle, gaps, gradient bound)", saddle::validate_output},
      {"simulate", "gradient descent or gradient flow trajectories", saddle::simulate_output},
      {"approx", "eps-precision trajectory against the exact iterates", saddle::approx_output},
      {"family", "tau-family sampling and the minimal-trajectory exit time", saddle::family_output},
      {"bounds", "trajectory function, K^iota, closed-form and crude exit bounds", saddle::bounds_output},
      {"phase-retrieval", "two-initialization phase retrieval protocol", saddle::phase_retrieval_output},
  };
  std::map<CLI::App*, const Sub*> by_app;
  CLI::Option* seed_opts[std::size(subs)];
  for (size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* sc = app.add_subcommand(subs[i].name, subs[i].help);
    auto* cfg = sc->add_option("--config", config_path, "experiment config (JSON)");
    if (std::string(subs[i].name) != "phase-retrieval") cfg->required();
    sc->add_option("--out", out_dir, "output directory");
    sc->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    seed_opts[i] = sc->add_option("--seed", seed, "run a single seed instead of the config list");
    by_app[sc] = &subs[i];
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const Sub& sub = *by_app.at(chosen);
  const size_t idx = static_cast<size_t>(&sub - subs);
  try {
    saddle::ExperimentConfig cfg =
        config_path.empty() ? saddle::phase_retrieval_protocol() : saddle::config_from_json(read_file(config_path));
    if (seed_opts[idx]->count() > 0) cfg.seeds = {seed};

    saddle::Output out = sub.run(cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw saddle::Error(saddle::ErrorCode::IoError, "cannot create " + out_dir);
    const fs::path base = fs::path(out_dir) / sub.name;
    if (format == "csv") {
      write_file(base.string() + ".csv", out.csv);
      write_file(base.string() + "_summary.json", out.summary_json);
    } else {
      write_file(base.string() + ".json", out.full_json);
    }
  } catch (const saddle::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const auto c = e.code();
    return (c == saddle::ErrorCode::ConfigError || c == saddle::ErrorCode::IoError) ? kConfigExit : kNumericExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericExit;
  }
  return 0;
}
