#include "hybridmbqc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "hybridmbqc/errors.hpp"
#include "hybridmbqc/graph.hpp"
#include "hybridmbqc/json_io.hpp"
#include "hybridmbqc/protocols.hpp"
#include "hybridmbqc/version.hpp"

struct hmq_graph {
  hmq::graph::GraphSpec spec;
};

namespace {

thread_local std::string g_last_error;

// malloc-backed so hmq_string_free stays a plain free() across any runtime.
char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

hmq_status set_output(const std::string& text, char** out) {
  char* s = dup_string(text);
  if (!s) {
    g_last_error = "out of memory";
    return HMQ_ERR_CAPACITY;
  }
  *out = s;
  return HMQ_OK;
}

template <typename F>
hmq_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const hmq::Error& e) {
    g_last_error = e.what();
    return static_cast<hmq_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HMQ_ERR_CAPACITY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HMQ_ERR_RUN;
  }
}

hmq_status require(bool ok, const char* what) {
  if (ok) return HMQ_OK;
  g_last_error = what;
  return HMQ_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* hmq_version(void) { return hmq::kVersion; }

const char* hmq_last_error(void) { return g_last_error.c_str(); }

void hmq_string_free(char* s) { std::free(s); }

hmq_status hmq_graph_parse(const char* json_text, hmq_graph** out) {
  if (auto st = require(json_text && out, "hmq_graph_parse: null argument")) return st;
  *out = nullptr;
  return guarded([&] {
    auto spec = hmq::json_io::parse_graph(json_text);
    *out = new hmq_graph{std::move(spec)};
    return HMQ_OK;
  });
}

void hmq_graph_free(hmq_graph* g) { delete g; }

hmq_status hmq_graph_validate(const hmq_graph* g, const char* request_json, char** report_json) {
  if (auto st = require(g && report_json, "hmq_graph_validate: null argument")) return st;
  return guarded([&] {
    std::vector<std::string> outputs, pre;
    if (request_json) hmq::json_io::parse_validate_request(request_json, outputs, pre);
    return set_output(hmq::json_io::graph_report_json(g->spec, std::move(outputs), pre),
                      report_json);
  });
}

hmq_status hmq_run_protocol(const char* config_json, char** report_json) {
  if (auto st = require(config_json && report_json, "hmq_run_protocol: null argument")) return st;
  return guarded([&] {
    auto cfg = hmq::json_io::parse_protocol_config(config_json);
    auto rep = hmq::protocols::run_protocol(cfg);
    return set_output(hmq::json_io::report_to_json(rep), report_json);
  });
}

hmq_status hmq_approx_report(const char* config_json, char** report_json) {
  if (auto st = require(config_json && report_json, "hmq_approx_report: null argument")) return st;
  return guarded([&] {
    auto cfg = hmq::json_io::parse_protocol_config(config_json);
    auto rep = hmq::protocols::approx_diagnostics(cfg);
    return set_output(hmq::json_io::approx_report_to_json(rep), report_json);
  });
}

hmq_status hmq_oracle_check(const char* config_json, char** report_json) {
  if (auto st = require(config_json && report_json, "hmq_oracle_check: null argument")) return st;
  return guarded([&] {
    auto cfg = hmq::json_io::parse_protocol_config(config_json);
    auto chk = hmq::protocols::cross_check(cfg);
    return set_output(hmq::json_io::oracle_check_to_json(chk), report_json);
  });
}

hmq_status hmq_sweep_csv(const char* sweep_json, char** csv_text) {
  if (auto st = require(sweep_json && csv_text, "hmq_sweep_csv: null argument")) return st;
  return guarded([&] {
    auto cfg = hmq::json_io::parse_sweep_config(sweep_json);
    auto rows = hmq::protocols::sweep(cfg);
    return set_output(
        hmq::json_io::rows_to_csv(rows, hmq::json_io::sweep_config_to_json(cfg)), csv_text);
  });
}

}  // extern "C"
