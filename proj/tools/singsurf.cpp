// Command-line front end. Talks to the library only through singsurf.h.
#include <singsurf.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;  // bad flags share the config exit code

int exit_code(singsurf_status s) {
  switch (s) {
    case SINGSURF_OK: return 0;
    case SINGSURF_ERR_USAGE:
    case SINGSURF_ERR_CONFIG: return 2;
    case SINGSURF_ERR_NUMERICAL: return 3;
    case SINGSURF_ERR_IO: return 4;
    default: return 1;
  }
}

struct ConfigDeleter {
  void operator()(singsurf_config* c) const { singsurf_config_destroy(c); }
};
struct ResultDeleter {
  void operator()(singsurf_result* r) const { singsurf_result_destroy(r); }
};
using ConfigPtr = std::unique_ptr<singsurf_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<singsurf_result, ResultDeleter>;

struct KeyFlag {
  const char* key;
  const char* help;
};

const std::vector<KeyFlag> kShockParams{
    {"c0", "sound speed (m/s)"},
    {"gamma", "adiabatic index"},
    {"g", "gravity (m/s^2)"},
    {"mu_hat", "Rayleigh coefficient (1/s)"},
    {"omega", "signal angular frequency (rad/s)"},
    {"W0", "signal amplitude (m/s)"},
};

const std::vector<KeyFlag> kLweParams{
    {"gamma", "adiabatic index"},
    {"epsilon", "amplitude ratio p_pk/p0"},
    {"alpha", "density exponent, or auto for the critical value"},
};

const std::vector<KeyFlag> kLanczos{
    {"lanczos_tol", "Lanczos relative tolerance"},
    {"lanczos_kmax", "Lanczos iteration cap"},
};

std::vector<KeyFlag> join(std::initializer_list<std::vector<KeyFlag>> parts) {
  std::vector<KeyFlag> out;
  for (const auto& p : parts) {
    for (const auto& k : p) {
      bool dup = false;
      for (const auto& e : out) dup = dup || std::string(e.key) == k.key;
      if (!dup) out.push_back(k);
    }
  }
  return out;
}

std::string flag_name(const std::string& key) {
  std::string f = "--";
  for (char c : key) f += c == '_' ? '-' : c;
  return f;
}

// Options every run subcommand shares, plus per-key flags.
struct RunCommand {
  std::string name;
  CLI::App* app = nullptr;
  std::string config_file;
  std::vector<std::string> sets;
  std::string out_dir;
  std::map<std::string, std::string> values;
};

void add_run(CLI::App& root, RunCommand& cmd, const std::string& help, const std::vector<KeyFlag>& keys) {
  cmd.app = root.add_subcommand(cmd.name, help);
  cmd.app->add_option("--config", cmd.config_file, "key = value file (a manifest works too)");
  cmd.app->add_option("--set", cmd.sets, "extra key=value assignment, repeatable");
  cmd.app->add_option("--out", cmd.out_dir, "output directory (default $SINGSURF_OUT, else ./singsurf-out)");
  for (const auto& k : keys) {
    cmd.app->add_option(flag_name(k.key), cmd.values[k.key], k.help);
  }
}

int fail(singsurf_status s) {
  std::fprintf(stderr, "singsurf: %s\n", singsurf_last_error());
  return exit_code(s);
}

int execute(const RunCommand& cmd) {
  singsurf_config* raw = nullptr;
  if (auto s = singsurf_config_create(&raw); s != SINGSURF_OK) return fail(s);
  ConfigPtr cfg(raw);
  // Precedence, lowest first: config file, --set, named flags.
  if (!cmd.config_file.empty()) {
    if (auto s = singsurf_config_load(cfg.get(), cmd.config_file.c_str()); s != SINGSURF_OK) return fail(s);
  }
  char existing[64];
  size_t needed = 0;
  if (singsurf_config_get(cfg.get(), "experiment", existing, sizeof existing, &needed) == SINGSURF_OK &&
      cmd.name != existing) {
    std::fprintf(stderr, "singsurf: config is for experiment '%s', not '%s'\n", existing, cmd.name.c_str());
    return kExitUsage;
  }
  singsurf_config_set(cfg.get(), "experiment", cmd.name.c_str());
  for (const auto& kv : cmd.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "singsurf: --set expects key=value, got '%s'\n", kv.c_str());
      return kExitUsage;
    }
    if (auto s = singsurf_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
        s != SINGSURF_OK) {
      return fail(s);
    }
  }
  for (const auto& [key, value] : cmd.values) {
    if (cmd.app->count(flag_name(key)) == 0) continue;
    if (auto s = singsurf_config_set(cfg.get(), key.c_str(), value.c_str()); s != SINGSURF_OK) return fail(s);
  }

  std::string out = cmd.out_dir;
  if (out.empty()) {
    const char* env = std::getenv("SINGSURF_OUT");
    out = env && *env ? env : "singsurf-out";
  }
  singsurf_result* res_raw = nullptr;
  const auto status = singsurf_run(cfg.get(), out.c_str(), &res_raw);
  ResultPtr res(res_raw);
  if (res) {
    if (status == SINGSURF_OK) std::printf("%s\n", singsurf_result_summary(res.get()));
    if (*singsurf_result_manifest(res.get())) std::printf("manifest: %s\n", singsurf_result_manifest(res.get()));
  }
  if (status != SINGSURF_OK) return fail(status);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singsurf: singular-surface wave solvers and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(singsurf_version()));

  std::vector<RunCommand> runs(5);
  runs[0].name = "shock";
  add_run(app, runs[0], "KSS solver for the linear shock in a stratified, resisting atmosphere",
          join({kShockParams,
                {{"n", "interior grid points"},
                 {"cfl", "c0 dt / dz"},
                 {"t_end", "final time (s)"},
                 {"snapshots", "comma-separated output times (s)"},
                 {"backend", "kss | fourier | lanczos | expeuler"},
                 {"ell", "domain length (m), 0 for 40 c0"},
                 {"lift_cells", "lift cutoff in cells"},
                 {"power_u", "sigma exponent on u"},
                 {"power_u_shape", "constant | decreasing-square | increasing-linear | increasing-square"},
                 {"power_ut", "sigma exponent on u_t"},
                 {"power_ut_shape", "shape of the u_t exponent"},
                 {"source", "exact | frozen lift source"},
                 {"damping", "exact | frozen damping"},
                 {"laplacian", "fd2 | spectral"}},
                kLanczos}));
  runs[1].name = "shock-analytic";
  add_run(app, runs[1], "exact, small-time and large-time shock profiles",
          join({kShockParams,
                {{"n", "profile points"},
                 {"ell", "domain length (m)"},
                 {"snapshots", "comma-separated times (s)"},
                 {"quad_tol", "relative quadrature tolerance"}}}));
  runs[2].name = "lwe";
  add_run(app, runs[2], "KSS solver for the inhomogeneous Lighthill-Westervelt acceleration wave",
          join({kLweParams,
                {{"n", "interior grid points"},
                 {"cfl", "dT / dY"},
                 {"t_end", "final time, 0 for arrival of the front at X = 0.95"},
                 {"snapshots", "comma-separated output times"},
                 {"backend", "kss | fourier | lanczos | expeuler"},
                 {"power_ut", "sigma exponent on the U_T spectrum"},
                 {"power_ut_shape", "shape of that exponent"},
                 {"power_utt", "sigma exponent on the U_TT estimate"},
                 {"power_utt_shape", "shape of that exponent"},
                 {"lift_ell", "lift cutoff in Y"},
                 {"lift_source", "midpoint | left"},
                 {"compare_fds_m", "also run the finite-difference reference with this M (0 = off)"},
                 {"front_threshold", "relative threshold of the front detector"},
                 {"fit_far", "far end of the fit window behind the front"},
                 {"fit_near", "near end of the fit window behind the front"}},
                kLanczos}));
  runs[3].name = "lwe-fds";
  add_run(app, runs[3], "explicit finite-difference reference for the acceleration wave",
          join({kLweParams,
                {{"m", "grid intervals"},
                 {"t_f", "final time of the grid (sets dT = t_f/(2m))"},
                 {"snapshots", "comma-separated output times"},
                 {"min_denominator", "smallest admissible 1 - 2 eps beta_hat P"},
                 {"front_threshold", "relative threshold of the front detector"},
                 {"fit_far", "far end of the fit window behind the front"},
                 {"fit_near", "near end of the fit window behind the front"}}}));
  runs[4].name = "analyze";
  add_run(app, runs[4], "critical parameters, times and jump amplitudes",
          join({kLweParams, kShockParams, {{"times", "comma-separated times for the jump report"}}}));

  std::string file_a, file_b, region = "all", column;
  auto* cmp = app.add_subcommand("compare", "difference of two profile CSVs over a region");
  cmp->add_option("file_a", file_a, "first CSV (defines the grid)")->required();
  cmp->add_option("file_b", file_b, "second CSV (interpolated when grids differ)")->required();
  cmp->add_option("--region", region, "all | range:LO:HI | behind:FRONT:CELLS | ahead:FRONT:CELLS");
  cmp->add_option("--column", column, "column to compare (default: the second)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (const auto& r : runs) {
    if (r.app->parsed()) return execute(r);
  }
  singsurf_result* raw = nullptr;
  const auto s = singsurf_compare(file_a.c_str(), file_b.c_str(), region.c_str(),
                                  column.empty() ? nullptr : column.c_str(), &raw);
  ResultPtr res(raw);
  if (s != SINGSURF_OK) return fail(s);
  std::printf("%s\n", singsurf_result_summary(res.get()));
  return 0;
}
