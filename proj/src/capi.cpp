#include "cstirap/cstirap.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include "cstirap/analysis.hpp"
#include "cstirap/commands.hpp"
#include "cstirap/config.hpp"
#include "cstirap/error.hpp"

struct cstirap_config {
  cstirap::RunConfig cfg;
};

struct cstirap_result {
  cstirap::Table table;
  std::string csv;
  std::string note;
};

namespace {

thread_local std::string last_error;

cstirap_status fail(cstirap_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
cstirap_status guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const cstirap::Error& e) {
    return fail(static_cast<cstirap_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CSTIRAP_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CSTIRAP_E_INTERNAL, e.what());
  } catch (...) {
    return fail(CSTIRAP_E_INTERNAL, "unknown exception");
  }
}

char* duplicate(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* cstirap_version(void) { return CSTIRAP_VERSION; }

const char* cstirap_status_name(cstirap_status s) {
  switch (s) {
    case CSTIRAP_OK:
      return "ok";
    case CSTIRAP_E_INVALID_ARGUMENT:
      return "invalid argument";
    case CSTIRAP_E_PARSE:
      return "parse error";
    case CSTIRAP_E_NO_CROSSING:
      return "no crossing";
    case CSTIRAP_E_INTEGRATION:
      return "integration failure";
    case CSTIRAP_E_DEGENERATE:
      return "degenerate spectrum";
    case CSTIRAP_E_UNBRACKETED:
      return "unbracketed";
    case CSTIRAP_E_IO:
      return "i/o error";
    case CSTIRAP_E_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* cstirap_last_error(void) { return last_error.c_str(); }

cstirap_status cstirap_config_create(cstirap_config** out) {
  return guarded([&] {
    if (!out) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null output pointer");
    *out = new cstirap_config{};
    return CSTIRAP_OK;
  });
}

cstirap_status cstirap_config_parse(const char* text, cstirap_config** out) {
  return guarded([&] {
    if (!text || !out) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    *out = new cstirap_config{cstirap::parse_config(text)};
    return CSTIRAP_OK;
  });
}

cstirap_status cstirap_config_load(const char* path, cstirap_config** out) {
  return guarded([&] {
    if (!path || !out) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    *out = new cstirap_config{cstirap::load_config(path)};
    return CSTIRAP_OK;
  });
}

void cstirap_config_destroy(cstirap_config* cfg) { delete cfg; }

cstirap_status cstirap_config_set(cstirap_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    if (!cfg || !key || !value) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    // Apply to a copy so a rejected value leaves the configuration untouched.
    cstirap::RunConfig next = cfg->cfg;
    cstirap::set_config_value(next, key, value);
    cfg->cfg = std::move(next);
    return CSTIRAP_OK;
  });
}

cstirap_status cstirap_config_get(const cstirap_config* cfg, const char* key, char* buf, size_t size,
                                  size_t* needed) {
  return guarded([&] {
    if (!cfg || !key || (!buf && size > 0)) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    const std::string v = cstirap::get_config_value(cfg->cfg, key);
    if (needed) *needed = v.size() + 1;
    if (size == 0) return buf ? fail(CSTIRAP_E_INVALID_ARGUMENT, "buffer too small") : CSTIRAP_OK;
    if (size < v.size() + 1) {
      buf[0] = '\0';
      return fail(CSTIRAP_E_INVALID_ARGUMENT, "buffer too small");
    }
    std::memcpy(buf, v.c_str(), v.size() + 1);
    return CSTIRAP_OK;
  });
}

cstirap_status cstirap_config_dump(const cstirap_config* cfg, char** text) {
  return guarded([&] {
    if (!cfg || !text) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    *text = duplicate(cstirap::dump_config(cfg->cfg));
    return CSTIRAP_OK;
  });
}

cstirap_status cstirap_config_validate(const cstirap_config* cfg) {
  return guarded([&] {
    if (!cfg) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    cfg->cfg.validate();
    return CSTIRAP_OK;
  });
}

cstirap_status cstirap_config_transform(cstirap_config* cfg, const char* which) {
  return guarded([&] {
    if (!cfg || !which) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    const std::string w = which;
    if (w == "dual")
      cfg->cfg.protocol = cstirap::dual_transform(cfg->cfg.protocol);
    else if (w == "flip")
      cfg->cfg.protocol = cstirap::flip_detunings(cfg->cfg.protocol);
    else
      return fail(CSTIRAP_E_INVALID_ARGUMENT, "unknown transform '" + w + "'");
    return CSTIRAP_OK;
  });
}

int cstirap_config_equal(const cstirap_config* a, const cstirap_config* b) {
  if (!a || !b) return a == b;
  return a->cfg == b->cfg ? 1 : 0;
}

void cstirap_string_free(char* s) { std::free(s); }

cstirap_status cstirap_run(const cstirap_config* cfg, const char* command, cstirap_result** out) {
  return guarded([&] {
    if (!cfg || !command || !out) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    cstirap::CommandResult r = cstirap::run_command(cfg->cfg, command);
    auto* res = new cstirap_result{std::move(r.table), {}, std::move(r.note)};
    res->csv = cstirap::to_csv(res->table);
    *out = res;
    if (!r.complete) return fail(CSTIRAP_E_UNBRACKETED, res->note);
    return CSTIRAP_OK;
  });
}

void cstirap_result_destroy(cstirap_result* r) { delete r; }

size_t cstirap_result_rows(const cstirap_result* r) { return r ? r->table.rows.size() : 0; }

size_t cstirap_result_columns(const cstirap_result* r) { return r ? r->table.columns.size() : 0; }

const char* cstirap_result_column_name(const cstirap_result* r, size_t j) {
  if (!r || j >= r->table.columns.size()) return nullptr;
  return r->table.columns[j].c_str();
}

double cstirap_result_value(const cstirap_result* r, size_t row, size_t column) {
  if (!r || row >= r->table.rows.size() || column >= r->table.columns.size())
    return std::numeric_limits<double>::quiet_NaN();
  return r->table.rows[row][column];
}

const char* cstirap_result_csv(const cstirap_result* r) { return r ? r->csv.c_str() : ""; }

const char* cstirap_result_note(const cstirap_result* r) { return r ? r->note.c_str() : ""; }

cstirap_status cstirap_p2_figure_of_merit(double kappa, double kappa_delta, double* out) {
  return guarded([&] {
    if (!out) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null output pointer");
    *out = cstirap::p2_figure_of_merit(kappa, kappa_delta);
    return CSTIRAP_OK;
  });
}

cstirap_status cstirap_find_crossings(const cstirap_config* cfg, double* t_minus, double* t_plus) {
  return guarded([&] {
    if (!cfg || !t_minus || !t_plus) return fail(CSTIRAP_E_INVALID_ARGUMENT, "null argument");
    cfg->cfg.protocol.validate();
    const cstirap::CrossingPair c = cstirap::find_crossings(cfg->cfg.protocol);
    *t_minus = c.t_minus;
    *t_plus = c.t_plus;
    return CSTIRAP_OK;
  });
}

}  // extern "C"
