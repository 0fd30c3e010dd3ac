#include "dispersive.h"

#include "errors.hpp"
#include "scenarios.hpp"
#include "verify.hpp"

#include <cstring>
#include <exception>
#include <new>
#include <string>

struct disp_config {
    disp::RunConfig cfg;
};

struct disp_result {
    disp::RunResult res;
};

namespace {

thread_local std::string g_last_error;

disp_status to_status(const std::exception& e) {
    g_last_error = e.what();
    if (dynamic_cast<const disp::ConfigError*>(&e)) return DISP_ERR_CONFIG;
    if (dynamic_cast<const disp::IoError*>(&e)) return DISP_ERR_IO;
    if (dynamic_cast<const disp::RangeError*>(&e)) return DISP_ERR_RANGE;
    if (dynamic_cast<const disp::SequenceError*>(&e)) return DISP_ERR_SEQUENCE;
    if (dynamic_cast<const disp::HypothesisError*>(&e)) return DISP_ERR_HYPOTHESIS;
    if (dynamic_cast<const disp::NumericError*>(&e)) return DISP_ERR_NUMERIC;
    return DISP_ERR_INTERNAL;
}

template <typename Fn>
disp_status guarded(Fn&& fn) {
    try {
        fn();
        return DISP_OK;
    } catch (const std::exception& e) {
        return to_status(e);
    } catch (...) {
        g_last_error = "unknown error";
        return DISP_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

disp_status bad_arg(const char* msg) {
    g_last_error = msg;
    return DISP_ERR_CONFIG;
}

} // namespace

extern "C" {

const char* disp_version(void) { return "1.0.0"; }

const char* disp_last_error(void) { return g_last_error.c_str(); }

disp_status disp_config_preset(const char* name, disp_config** out) {
    if (!name || !out) return bad_arg("disp_config_preset: null argument");
    *out = nullptr;
    return guarded([&] { *out = new disp_config{disp::preset(name)}; });
}

disp_status disp_config_load(const char* path, disp_config** out) {
    if (!path || !out) return bad_arg("disp_config_load: null argument");
    *out = nullptr;
    return guarded([&] { *out = new disp_config{disp::load_config_file(path)}; });
}

disp_status disp_config_set(disp_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return bad_arg("disp_config_set: null argument");
    return guarded([&] { disp::apply_override(cfg->cfg, key, value); });
}

void disp_config_free(disp_config* cfg) { delete cfg; }

disp_status disp_preset_names(char** out) {
    if (!out) return bad_arg("disp_preset_names: null argument");
    return guarded([&] {
        std::string all;
        for (const auto& n : disp::preset_names()) {
            all += n;
            all += '\n';
        }
        *out = dup_string(all);
    });
}

disp_status disp_preset_sweep_defaults(const char* name, char** out) {
    if (!name || !out) return bad_arg("disp_preset_sweep_defaults: null argument");
    return guarded([&] {
        disp::preset(name);  // validates the name
        std::string csv;
        for (double v : disp::preset_sweep_defaults(name)) {
            if (!csv.empty()) csv += ',';
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            csv += buf;
        }
        *out = dup_string(csv);
    });
}

disp_status disp_simulate(const disp_config* cfg, disp_result** out) {
    if (!cfg || !out) return bad_arg("disp_simulate: null argument");
    *out = nullptr;
    return guarded([&] { *out = new disp_result{disp::execute(cfg->cfg)}; });
}

disp_run_state disp_result_state(const disp_result* res) {
    if (!res) return DISP_RUN_DIVERGED;
    switch (res->res.status.state) {
        case disp::RunStatus::State::healthy: return DISP_RUN_HEALTHY;
        case disp::RunStatus::State::diverged: return DISP_RUN_DIVERGED;
        case disp::RunStatus::State::steady: return DISP_RUN_STEADY;
    }
    return DISP_RUN_DIVERGED;
}

size_t disp_result_len(const disp_result* res) { return res ? res->res.norms.size() : 0; }

disp_status disp_result_norms(const disp_result* res, const double** t, const double** l2_u,
                              const double** h1_u, const double** h2_u, const double** weighted) {
    if (!res) return bad_arg("disp_result_norms: null result");
    if (t) *t = res->res.norms.t.data();
    if (l2_u) *l2_u = res->res.norms.l2_u.data();
    if (h1_u) *h1_u = res->res.norms.h1_u.data();
    if (h2_u) *h2_u = res->res.norms.h2_u.data();
    if (weighted) *weighted = res->res.norms.weighted.data();
    return DISP_OK;
}

disp_status disp_result_emit(const disp_result* res, const char* out_dir) {
    if (!res || !out_dir) return bad_arg("disp_result_emit: null argument");
    return guarded([&] { disp::emit(res->res, out_dir); });
}

disp_status disp_result_meta(const disp_result* res, char** json_out) {
    if (!res || !json_out) return bad_arg("disp_result_meta: null argument");
    return guarded([&] { *json_out = dup_string(disp::meta_json(res->res).dump(2) + "\n"); });
}

void disp_result_free(disp_result* res) { delete res; }

void disp_buffer_free(char* buf) { delete[] buf; }

disp_status disp_sweep(const disp_config* base, const char* axis, const char* const* values,
                       size_t n_values, const char* out_dir, int* worst_state) {
    if (!base || !axis || !out_dir || (n_values > 0 && !values))
        return bad_arg("disp_sweep: null argument");
    return guarded([&] {
        const disp::SweepAxis ax = disp::axis_from_name(axis);
        std::vector<std::string> vals;
        vals.reserve(n_values);
        for (size_t i = 0; i < n_values; ++i) vals.emplace_back(values[i]);
        auto results = disp::run_sweep(base->cfg, ax, vals);
        int worst = DISP_RUN_HEALTHY;
        for (size_t i = 0; i < results.size(); ++i) {
            disp::emit(results[i], std::filesystem::path(out_dir) /
                                       disp::sweep_dir_name(ax, vals[i]));
            if (results[i].status.state == disp::RunStatus::State::diverged)
                worst = DISP_RUN_DIVERGED;
        }
        if (worst_state) *worst_state = worst;
    });
}

disp_status disp_report(const char* dir, char** json_out) {
    if (!dir || !json_out) return bad_arg("disp_report: null argument");
    return guarded([&] { *json_out = dup_string(disp::report_dir(dir)); });
}

disp_status disp_verify(int quick, char** table_out, int* n_failed) {
    if (!table_out) return bad_arg("disp_verify: null argument");
    return guarded([&] {
        const disp::verify::VerifySummary sum = disp::verify::run_verification(quick != 0);
        *table_out = dup_string(sum.table());
        if (n_failed) {
            int failed = 0;
            for (const auto& l : sum.lines)
                if (!l.pass) ++failed;
            *n_failed = failed;
        }
    });
}

} // extern "C"
