#include "topopump/topopump.h"

#include <cstring>
#include <memory>
#include <string>

#include "config.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"
#include "topology.hpp"

struct tp_config {
  topopump::config_tree tree;
};

struct tp_cycle {
  topopump::parameter_cycle cycle;
};

struct tp_state {
  std::shared_ptr<const topopump::chain_model> chain;
  topopump::wavepacket packet;
  topopump::cvec psi;
  double t = 0.0;
};

struct tp_run_report {
  int exit_code = 0;
  std::string message;
  std::string summary;
  std::vector<std::string> files;
};

namespace {

thread_local std::string last_error;

tp_status fail(tp_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

/// Runs body and converts exceptions into status codes.
template <class F>
tp_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TP_OK;
  } catch (const topopump::error& e) {
    switch (e.kind()) {
      case topopump::error_kind::config:
        return fail(TP_ERR_CONFIG, e.what());
      case topopump::error_kind::numerical:
        return fail(TP_ERR_NUMERICAL, e.what());
      case topopump::error_kind::domain:
        return fail(TP_ERR_DOMAIN, e.what());
    }
    return fail(TP_ERR_INTERNAL, e.what());
  } catch (const std::exception& e) {
    return fail(TP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TP_ERR_INTERNAL, "unknown error");
  }
}

#define TP_REQUIRE(cond, what) \
  if (!(cond)) return fail(TP_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* tp_last_error(void) { return last_error.c_str(); }

const char* tp_version(void) { return "1.0.0"; }

tp_status tp_config_parse(const char* text, tp_config** out) {
  TP_REQUIRE(text && out, "tp_config_parse: null argument");
  return guarded([&] { *out = new tp_config{topopump::parse_config(text)}; });
}

tp_status tp_config_load(const char* path, tp_config** out) {
  TP_REQUIRE(path && out, "tp_config_load: null argument");
  return guarded([&] { *out = new tp_config{topopump::load_config(path)}; });
}

tp_status tp_config_set(tp_config* cfg, const char* assignment) {
  TP_REQUIRE(cfg && assignment, "tp_config_set: null argument");
  return guarded([&] { topopump::apply_override(cfg->tree, assignment); });
}

tp_status tp_config_resolved(const tp_config* cfg, char* buf, size_t capacity, size_t* needed) {
  TP_REQUIRE(cfg, "tp_config_resolved: null config");
  std::string text;
  const tp_status st = guarded([&] { text = topopump::to_config_text(topopump::resolve(cfg->tree)); });
  if (st != TP_OK) return st;
  if (needed) *needed = text.size() + 1;
  if (buf) {
    TP_REQUIRE(capacity >= text.size() + 1, "tp_config_resolved: buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
  }
  return TP_OK;
}

void tp_config_free(tp_config* cfg) { delete cfg; }

tp_status tp_cycle_from_config(const tp_config* cfg, tp_cycle** out) {
  TP_REQUIRE(cfg && out, "tp_cycle_from_config: null argument");
  return guarded([&] { *out = new tp_cycle{topopump::resolve(cfg->tree).cycle}; });
}

tp_status tp_cycle_preset(const char* platform, tp_cycle** out) {
  TP_REQUIRE(platform && out, "tp_cycle_preset: null argument");
  return guarded([&] { *out = new tp_cycle{topopump::resolve(topopump::platform_preset(platform)).cycle}; });
}

void tp_cycle_free(tp_cycle* cycle) { delete cycle; }

tp_status tp_cycle_period(const tp_cycle* cycle, double* period) {
  TP_REQUIRE(cycle && period, "tp_cycle_period: null argument");
  *period = cycle->cycle.period;
  return TP_OK;
}

tp_status tp_cycle_cell_length(const tp_cycle* cycle, double* a) {
  TP_REQUIRE(cycle && a, "tp_cycle_cell_length: null argument");
  *a = topopump::cell_length(cycle->cycle.base);
  return TP_OK;
}

tp_status tp_cycle_hoppings(const tp_cycle* cycle, double t, int n_terms, double* j_prime_odd, double* j_odd,
                            double* j_even) {
  TP_REQUIRE(cycle && j_prime_odd && j_odd && j_even, "tp_cycle_hoppings: null argument");
  TP_REQUIRE(n_terms >= 1, "tp_cycle_hoppings: n_terms must be >= 1");
  return guarded([&] {
    const auto& c = cycle->cycle;
    const topopump::hopping_set h = topopump::reference_hoppings(c.platform_at(t), n_terms, c.delta(t));
    for (int p = 0; p < n_terms; ++p) {
      j_prime_odd[p] = h.j_prime_odd[p];
      j_odd[p] = h.j_odd[p];
      j_even[p] = h.j_even[p];
    }
  });
}

tp_status tp_cycle_extended_rates(const tp_cycle* cycle, double t, int n_terms, double* jbar_prime, double* jbar) {
  TP_REQUIRE(cycle && jbar_prime && jbar, "tp_cycle_extended_rates: null argument");
  TP_REQUIRE(n_terms >= 1, "tp_cycle_extended_rates: n_terms must be >= 1");
  return guarded([&] {
    const auto& c = cycle->cycle;
    const auto [jp, j] = topopump::extended_rates(topopump::reference_hoppings(c.platform_at(t), n_terms, c.delta(t)));
    *jbar_prime = jp;
    *jbar = j;
  });
}

tp_status tp_cycle_couplings(const tp_cycle* cycle, double t, int n_sites, double* v, double* gamma) {
  TP_REQUIRE(cycle, "tp_cycle_couplings: null cycle");
  TP_REQUIRE(n_sites >= 2 && n_sites % 2 == 0, "tp_cycle_couplings: n_sites must be even and >= 2");
  return guarded([&] {
    const auto g = topopump::build_geometry(cycle->cycle.platform_at(t), n_sites);
    const auto m = topopump::build_coupling_matrices(g, gamma != nullptr);
    for (int i = 0; i < n_sites; ++i) {
      for (int j = 0; j < n_sites; ++j) {
        if (v) v[i * n_sites + j] = m.v(i, j);
        if (gamma) gamma[i * n_sites + j] = m.gamma(i, j);
      }
    }
  });
}

tp_status tp_cycle_berry(const tp_cycle* cycle, int m_t, int m_k, int n_terms, tp_berry_summary* out, double* w_k) {
  TP_REQUIRE(cycle && out, "tp_cycle_berry: null argument");
  TP_REQUIRE(m_t >= 4 && m_k >= 4 && n_terms >= 1, "tp_cycle_berry: grid sizes must be >= 4 and n_terms >= 1");
  return guarded([&] {
    topopump::berry_options bo;
    bo.m_t = m_t;
    bo.m_k = m_k;
    bo.sums = {topopump::lattice_sum::cesaro, n_terms};
    const double a = topopump::cell_length(cycle->cycle.base);
    const auto f = topopump::berry_curvature_grid(topopump::schedule_of(cycle->cycle, n_terms), a, bo);
    out->chern = f.chern;
    out->chern_raw = f.chern_raw;
    out->max_plaquette = f.max_plaquette;
    out->min_gap = f.min_gap;
    out->dx_uniform = topopump::predicted_displacement(f, topopump::uniform_f_sq(f.k_mid)) / a;
    if (w_k) {
      for (int j = 0; j < m_k; ++j) w_k[j] = f.w_k[j];
    }
  });
}

tp_status tp_cycle_predicted_displacement(const tp_cycle* cycle, int m_t, int m_k, int n_terms, double k0,
                                          double w_k, double* dx) {
  TP_REQUIRE(cycle && dx, "tp_cycle_predicted_displacement: null argument");
  TP_REQUIRE(m_t >= 4 && m_k >= 4 && n_terms >= 1 && w_k > 0, "tp_cycle_predicted_displacement: bad grid or width");
  return guarded([&] {
    topopump::berry_options bo;
    bo.m_t = m_t;
    bo.m_k = m_k;
    bo.sums = {topopump::lattice_sum::cesaro, n_terms};
    const double a = topopump::cell_length(cycle->cycle.base);
    const auto f = topopump::berry_curvature_grid(topopump::schedule_of(cycle->cycle, n_terms), a, bo);
    *dx = topopump::predicted_displacement(f, topopump::gaussian_f_sq(f.k_mid, k0, w_k, a)) / a;
  });
}

tp_status tp_state_wavepacket(const tp_cycle* cycle, int n_sites, double k0, double w_k, tp_state** out) {
  TP_REQUIRE(cycle && out, "tp_state_wavepacket: null argument");
  return guarded([&] {
    topopump::wavepacket_spec spec;
    spec.k0 = k0;
    spec.w_k = w_k;
    auto s = std::make_unique<tp_state>();
    s->packet = topopump::build_wavepacket(cycle->cycle, spec, n_sites);
    s->chain = std::make_shared<const topopump::chain_model>(cycle->cycle, n_sites);
    s->psi = s->packet.psi;
    *out = s.release();
  });
}

tp_status tp_state_copy(const tp_state* state, tp_state** out) {
  TP_REQUIRE(state && out, "tp_state_copy: null argument");
  return guarded([&] { *out = new tp_state(*state); });
}

void tp_state_free(tp_state* state) { delete state; }

tp_status tp_state_size(const tp_state* state, int* n_sites) {
  TP_REQUIRE(state && n_sites, "tp_state_size: null argument");
  *n_sites = static_cast<int>(state->psi.size());
  return TP_OK;
}

tp_status tp_state_time(const tp_state* state, double* t) {
  TP_REQUIRE(state && t, "tp_state_time: null argument");
  *t = state->t;
  return TP_OK;
}

tp_status tp_state_amplitudes(const tp_state* state, double* re, double* im) {
  TP_REQUIRE(state && re && im, "tp_state_amplitudes: null argument");
  for (int i = 0; i < state->psi.size(); ++i) {
    re[i] = state->psi[i].real();
    im[i] = state->psi[i].imag();
  }
  return TP_OK;
}

tp_status tp_state_norm(const tp_state* state, double* norm) {
  TP_REQUIRE(state && norm, "tp_state_norm: null argument");
  *norm = state->psi.squaredNorm();
  return TP_OK;
}

tp_status tp_state_center_of_mass(const tp_state* state, double* x) {
  TP_REQUIRE(state && x, "tp_state_center_of_mass: null argument");
  return guarded([&] { *x = topopump::center_of_mass(state->psi, state->chain->coordinates_at(state->t)); });
}

tp_status tp_state_evolve(tp_state* state, int n_cycles, int steps_per_cycle, int dissipative) {
  TP_REQUIRE(state, "tp_state_evolve: null state");
  TP_REQUIRE(n_cycles >= 0 && steps_per_cycle >= 1, "tp_state_evolve: need n_cycles >= 0 and steps_per_cycle >= 1");
  return guarded([&] {
    topopump::evolve_options opt;
    opt.n_cycles = n_cycles;
    opt.steps_per_cycle = steps_per_cycle;
    opt.dissipative = dissipative != 0;
    opt.monitor_terms = 0;
    /// The Hamiltonian is periodic and states are only advanced by whole cycles.
    const auto tr = topopump::evolve(state->psi, *state->chain, opt);
    state->psi = tr.final_state();
    state->t += n_cycles * state->chain->cycle().period;
  });
}

tp_status tp_state_fidelity(const tp_state* state, double shift, double* fidelity) {
  TP_REQUIRE(state && fidelity, "tp_state_fidelity: null argument");
  return guarded([&] { *fidelity = topopump::fidelity(state->packet, shift, state->psi); });
}

tp_status tp_run(const tp_run_options* options, tp_run_report** out) {
  TP_REQUIRE(options && out && options->subcommand, "tp_run: null argument");
  TP_REQUIRE(options->n_overrides >= 0 && (options->n_overrides == 0 || options->overrides),
             "tp_run: bad override list");
  return guarded([&] {
    auto report = std::make_unique<tp_run_report>();
    topopump::run_outcome result;
    try {
      topopump::run_request req;
      req.subcommand = options->subcommand;
      if (options->config_path && *options->config_path) req.tree = topopump::load_config(options->config_path);
      for (int i = 0; i < options->n_overrides; ++i) topopump::apply_override(req.tree, options->overrides[i]);
      if (options->out_dir) req.out_dir = options->out_dir;
      req.figure_id = options->figure_id;
      result = topopump::run_experiment(req);
    } catch (const topopump::error& e) {
      result.exit_code = topopump::exit_code_for(e.kind());
      result.message = e.what();
    }
    report->exit_code = result.exit_code;
    report->message = result.message;
    report->summary = result.summary.is_null() ? std::string("{}") : result.summary.dump(2);
    report->files = std::move(result.files);
    *out = report.release();
  });
}

int tp_run_report_exit_code(const tp_run_report* report) { return report ? report->exit_code : -1; }

const char* tp_run_report_message(const tp_run_report* report) { return report ? report->message.c_str() : ""; }

const char* tp_run_report_summary(const tp_run_report* report) { return report ? report->summary.c_str() : ""; }

int tp_run_report_file_count(const tp_run_report* report) {
  return report ? static_cast<int>(report->files.size()) : 0;
}

const char* tp_run_report_file(const tp_run_report* report, int index) {
  if (!report || index < 0 || index >= static_cast<int>(report->files.size())) return nullptr;
  return report->files[index].c_str();
}

void tp_run_report_free(tp_run_report* report) { delete report; }

}  // extern "C"
