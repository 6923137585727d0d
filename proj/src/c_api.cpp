#include "singsurf.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "singsurf/config.hpp"
#include "singsurf/errors.hpp"
#include "singsurf/runner.hpp"
#include "singsurf/surface_analysis.hpp"

struct singsurf_config {
  singsurf::config::Config cfg;
};

struct singsurf_result {
  std::string summary;
  std::string manifest;
  std::vector<std::string> files;
  double max_abs = 0.0;
  double mean_abs = 0.0;
};

namespace {

thread_local std::string last_error;

singsurf_status status_of(singsurf::Error::Category c) {
  using C = singsurf::Error::Category;
  switch (c) {
    case C::usage: return SINGSURF_ERR_USAGE;
    case C::domain:
    case C::config: return SINGSURF_ERR_CONFIG;
    case C::numerical: return SINGSURF_ERR_NUMERICAL;
    case C::io: return SINGSURF_ERR_IO;
  }
  return SINGSURF_ERR_INTERNAL;
}

template <class F>
singsurf_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return SINGSURF_OK;
  } catch (const singsurf::Error& e) {
    last_error = e.what();
    return status_of(e.category());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return SINGSURF_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) throw singsurf::UsageError(std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* singsurf_version(void) { return "1.0.0"; }

const char* singsurf_last_error(void) { return last_error.c_str(); }

singsurf_status singsurf_config_create(singsurf_config** out) {
  return guard([&] {
    require(out, "out");
    *out = new singsurf_config;
  });
}

void singsurf_config_destroy(singsurf_config* cfg) { delete cfg; }

singsurf_status singsurf_config_set(singsurf_config* cfg, const char* key, const char* value) {
  return guard([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    if (!*key) throw singsurf::UsageError("key must not be empty");
    cfg->cfg.set(key, value);
  });
}

singsurf_status singsurf_config_load(singsurf_config* cfg, const char* path) {
  return guard([&] {
    require(cfg, "cfg");
    require(path, "path");
    cfg->cfg.merge(singsurf::config::Config::load(path));
  });
}

singsurf_status singsurf_config_get(const singsurf_config* cfg, const char* key, char* buf, size_t size,
                                    size_t* needed) {
  return guard([&] {
    require(cfg, "cfg");
    require(key, "key");
    const auto it = cfg->cfg.entries().find(key);
    if (it == cfg->cfg.entries().end()) throw singsurf::UsageError(std::string("no key '") + key + "'");
    if (needed) *needed = it->second.size();
    if (!buf || size <= it->second.size()) throw singsurf::UsageError("buffer too small");
    std::memcpy(buf, it->second.c_str(), it->second.size() + 1);
  });
}

singsurf_status singsurf_run(const singsurf_config* cfg, const char* out_dir, singsurf_result** out) {
  if (out) *out = nullptr;
  singsurf::app::RunOutput run;
  const auto st = guard([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    require(out, "out");
    singsurf::app::run(cfg->cfg, out_dir, run);
  });
  if (out && !run.files.empty()) {
    auto* r = new (std::nothrow) singsurf_result;
    if (r) {
      r->summary = st == SINGSURF_OK ? run.summary : run.experiment + ": failed: " + last_error;
      r->manifest = run.manifest.string();
      for (const auto& f : run.files) r->files.push_back(f.string());
      *out = r;
    }
  }
  return st;
}

singsurf_status singsurf_compare(const char* file_a, const char* file_b, const char* region, const char* column,
                                 singsurf_result** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(file_a, "file_a");
    require(file_b, "file_b");
    require(out, "out");
    const auto rep =
        singsurf::app::compare_files(file_a, file_b, region ? region : "all", column ? column : "");
    auto* r = new singsurf_result;
    r->summary = rep.line();
    r->max_abs = rep.max_abs;
    r->mean_abs = rep.mean_abs;
    *out = r;
  });
}

const char* singsurf_result_summary(const singsurf_result* r) { return r ? r->summary.c_str() : ""; }

const char* singsurf_result_manifest(const singsurf_result* r) { return r ? r->manifest.c_str() : ""; }

size_t singsurf_result_file_count(const singsurf_result* r) { return r ? r->files.size() : 0; }

const char* singsurf_result_file(const singsurf_result* r, size_t index) {
  return r && index < r->files.size() ? r->files[index].c_str() : nullptr;
}

double singsurf_result_max_abs(const singsurf_result* r) { return r ? r->max_abs : 0.0; }

double singsurf_result_mean_abs(const singsurf_result* r) { return r ? r->mean_abs : 0.0; }

void singsurf_result_destroy(singsurf_result* r) { delete r; }

singsurf_status singsurf_lwe_critical(double gamma, double epsilon, double* alpha_bullet, double* epsilon_bullet) {
  return guard([&] {
    require(alpha_bullet, "alpha_bullet");
    singsurf::surface::LweParams p{gamma, epsilon, 0.0};
    p.validate(false);
    const auto c = singsurf::surface::lwe_critical(gamma, epsilon);
    *alpha_bullet = c.alpha_bullet;
    if (epsilon_bullet) *epsilon_bullet = c.epsilon_bullet;
  });
}

}  // extern "C"
