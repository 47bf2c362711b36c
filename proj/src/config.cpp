#include "vort2d/config.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

#include "vort2d/errors.hpp"
#include "vort2d/fieldgen.hpp"
#include "vort2d/operators.hpp"
#include "vort2d/transforms.hpp"

namespace vort {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(path + ": unknown key '" + it.key() + "'");
  }
}

const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double need_num(const json& j, const std::string& key, const std::string& path) {
  const json* v = find(j, key);
  if (!v || !v->is_number())
    throw ConfigError(path + ": missing or non-numeric field '" + key + "'");
  return v->get<double>();
}

double opt_num(const json& j, const std::string& key, double dflt,
               const std::string& path) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_number())
    throw ConfigError(path + ": field '" + key + "' must be numeric");
  return v->get<double>();
}

long opt_int(const json& j, const std::string& key, long dflt,
             const std::string& path) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_number_integer())
    throw ConfigError(path + ": field '" + key + "' must be an integer");
  return v->get<long>();
}

bool opt_bool(const json& j, const std::string& key, bool dflt,
              const std::string& path) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_boolean())
    throw ConfigError(path + ": field '" + key + "' must be a boolean");
  return v->get<bool>();
}

std::string opt_str(const json& j, const std::string& key,
                    const std::string& dflt, const std::string& path) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_string())
    throw ConfigError(path + ": field '" + key + "' must be a string");
  return v->get<std::string>();
}

std::vector<double> opt_num_list(const json& j, const std::string& key,
                                 std::vector<double> dflt,
                                 const std::string& path) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_array())
    throw ConfigError(path + ": field '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number())
      throw ConfigError(path + "." + key + ": entries must be numeric");
    out.push_back(e.get<double>());
  }
  return out;
}

std::pair<int, int> need_mode(const json& j, const std::string& key,
                              const std::string& path) {
  const json* v = find(j, key);
  if (!v || !v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() ||
      !(*v)[1].is_number_integer())
    throw ConfigError(path + ": field '" + key + "' must be [k1, k2]");
  return {(*v)[0].get<int>(), (*v)[1].get<int>()};
}

std::vector<ProfileMode> parse_modes(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of modes");
  std::vector<ProfileMode> out;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    check_keys(j[i], {"k", "amp", "phase"}, p);
    ProfileMode m;
    std::tie(m.k1, m.k2) = need_mode(j[i], "k", p);
    m.amp = opt_num(j[i], "amp", 1.0, p);
    const std::string phase = opt_str(j[i], "phase", "cos", p);
    if (phase == "sin")
      m.sine = true;
    else if (phase != "cos")
      throw ConfigError(p + ": phase must be 'cos' or 'sin'");
    out.push_back(m);
  }
  return out;
}

json modes_to_json(const std::vector<ProfileMode>& modes) {
  json out = json::array();
  for (const ProfileMode& m : modes) {
    json e;
    e["k"] = {m.k1, m.k2};
    e["amp"] = m.amp;
    e["phase"] = m.sine ? "sin" : "cos";
    out.push_back(e);
  }
  return out;
}

FieldSpec parse_field_spec(const json& j, const std::string& path) {
  check_keys(j, {"type", "k", "amplitude", "modes", "decay", "tag"}, path);
  FieldSpec fs;
  const std::string type = opt_str(j, "type", "zero", path);
  if (type == "zero") {
    fs.kind = FieldSpec::Kind::zero;
  } else if (type == "cosine") {
    fs.kind = FieldSpec::Kind::cosine;
    std::tie(fs.k1, fs.k2) = need_mode(j, "k", path);
    fs.amplitude = opt_num(j, "amplitude", 1.0, path);
  } else if (type == "modes") {
    fs.kind = FieldSpec::Kind::modes;
    const json* m = find(j, "modes");
    if (!m) throw ConfigError(path + ": 'modes' field required");
    fs.modes = parse_modes(*m, path + ".modes");
  } else if (type == "random") {
    fs.kind = FieldSpec::Kind::random;
    fs.amplitude = opt_num(j, "amplitude", 1.0, path);
    fs.decay = opt_num(j, "decay", 2.0, path);
    fs.tag = static_cast<uint64_t>(opt_int(j, "tag", 0, path));
  } else {
    throw ConfigError(path + ": unknown field type '" + type + "'");
  }
  return fs;
}

json field_spec_to_json(const FieldSpec& fs) {
  json j;
  switch (fs.kind) {
    case FieldSpec::Kind::zero:
      j["type"] = "zero";
      break;
    case FieldSpec::Kind::cosine:
      j["type"] = "cosine";
      j["k"] = {fs.k1, fs.k2};
      j["amplitude"] = fs.amplitude;
      break;
    case FieldSpec::Kind::modes:
      j["type"] = "modes";
      j["modes"] = modes_to_json(fs.modes);
      break;
    case FieldSpec::Kind::random:
      j["type"] = "random";
      j["amplitude"] = fs.amplitude;
      j["decay"] = fs.decay;
      j["tag"] = fs.tag;
      break;
  }
  return j;
}

ControlSpec parse_control_spec(const json& j, const std::string& path) {
  check_keys(j, {"type", "values", "amplitudes", "omega"}, path);
  ControlSpec cs;
  const std::string type = opt_str(j, "type", "zero", path);
  if (type == "zero") {
    cs.kind = ControlSpec::Kind::zero;
  } else if (type == "constant") {
    cs.kind = ControlSpec::Kind::constant;
    cs.values = opt_num_list(j, "values", {}, path);
    if (cs.values.empty())
      throw ConfigError(path + ": constant control needs 'values'");
  } else if (type == "sine") {
    cs.kind = ControlSpec::Kind::sine;
    cs.amplitudes = opt_num_list(j, "amplitudes", {}, path);
    cs.omega = opt_num(j, "omega", 1.0, path);
    if (cs.amplitudes.empty())
      throw ConfigError(path + ": sine control needs 'amplitudes'");
  } else {
    throw ConfigError(path + ": unknown control type '" + type + "'");
  }
  return cs;
}

json control_spec_to_json(const ControlSpec& cs) {
  json j;
  switch (cs.kind) {
    case ControlSpec::Kind::zero:
      j["type"] = "zero";
      break;
    case ControlSpec::Kind::constant:
      j["type"] = "constant";
      j["values"] = cs.values;
      break;
    case ControlSpec::Kind::sine:
      j["type"] = "sine";
      j["amplitudes"] = cs.amplitudes;
      j["omega"] = cs.omega;
      break;
  }
  return j;
}

EventSpec parse_event(const json& j, const std::string& path) {
  check_keys(j, {"type", "k", "threshold"}, path);
  EventSpec ev;
  const std::string type = opt_str(j, "type", "whole_space", path);
  if (type == "whole_space") {
    ev.kind = EventSpec::Kind::whole_space;
  } else if (type == "terminal_mode_re_exceed") {
    ev.kind = EventSpec::Kind::terminal_mode_re_exceed;
    std::tie(ev.k1, ev.k2) = need_mode(j, "k", path);
    ev.threshold = need_num(j, "threshold", path);
  } else if (type == "terminal_l2_exceed") {
    ev.kind = EventSpec::Kind::terminal_l2_exceed;
    ev.threshold = need_num(j, "threshold", path);
  } else if (type == "sup_lp_exceed") {
    ev.kind = EventSpec::Kind::sup_lp_exceed;
    ev.threshold = need_num(j, "threshold", path);
  } else {
    throw ConfigError(path + ": unknown event type '" + type + "'");
  }
  return ev;
}

json event_to_json(const EventSpec& ev) {
  json j;
  switch (ev.kind) {
    case EventSpec::Kind::whole_space:
      j["type"] = "whole_space";
      break;
    case EventSpec::Kind::terminal_mode_re_exceed:
      j["type"] = "terminal_mode_re_exceed";
      j["k"] = {ev.k1, ev.k2};
      j["threshold"] = ev.threshold;
      break;
    case EventSpec::Kind::terminal_l2_exceed:
      j["type"] = "terminal_l2_exceed";
      j["threshold"] = ev.threshold;
      break;
    case EventSpec::Kind::sup_lp_exceed:
      j["type"] = "sup_lp_exceed";
      j["threshold"] = ev.threshold;
      break;
  }
  return j;
}

SigmaShape parse_shape(const std::string& s, const std::string& path) {
  if (s == "constant") return SigmaShape::constant;
  if (s == "linear") return SigmaShape::linear;
  if (s == "sin") return SigmaShape::sine;
  if (s == "saturated") return SigmaShape::saturated;
  throw ConfigError(path + ": unknown sigma shape '" + s + "'");
}

}  // namespace

SpectralField build_field(const FieldSpec& spec, const TorusGrid& grid,
                          uint64_t seed) {
  switch (spec.kind) {
    case FieldSpec::Kind::zero:
      return SpectralField(grid);
    case FieldSpec::Kind::cosine:
      return cosine_field(grid, spec.k1, spec.k2, spec.amplitude);
    case FieldSpec::Kind::modes:
      return field_from_modes(grid, spec.modes);
    case FieldSpec::Kind::random: {
      NormalSampler rng(RngStream{seed, spec.tag, RngPurpose::initial_data});
      return random_smooth_field(grid, spec.decay, spec.amplitude, rng);
    }
  }
  return SpectralField(grid);
}

ControlPath build_control(const ControlSpec& spec, int n_channels, int steps,
                          double dt, double bound) {
  ControlPath v = ControlPath::zero(n_channels, steps);
  v.bound = bound;
  switch (spec.kind) {
    case ControlSpec::Kind::zero:
      break;
    case ControlSpec::Kind::constant:
      if (static_cast<int>(spec.values.size()) != n_channels)
        throw ConfigError("constant control has wrong channel count");
      for (auto& row : v.values)
        for (int j = 0; j < n_channels; ++j)
          row[static_cast<size_t>(j)] = spec.values[static_cast<size_t>(j)];
      break;
    case ControlSpec::Kind::sine:
      if (static_cast<int>(spec.amplitudes.size()) != n_channels)
        throw ConfigError("sine control has wrong channel count");
      for (int m = 0; m < steps; ++m)
        for (int j = 0; j < n_channels; ++j)
          v.values[static_cast<size_t>(m)][static_cast<size_t>(j)] =
              spec.amplitudes[static_cast<size_t>(j)] *
              std::sin(spec.omega * m * dt);
      break;
  }
  v.project(dt);
  return v;
}

TruncationSpec RunConfig::make_truncation(const SpectralField& xi0) const {
  TruncationSpec t;
  if (trunc_radius < 0.0)
    t = TruncationSpec::auto_radius(xi0, sim.p);
  else if (trunc_radius == 0.0)
    t.radius = std::numeric_limits<double>::infinity();
  else
    t.radius = trunc_radius;
  t.apply_to_sigma = trunc_apply_to_sigma;
  return t;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"grid", "sim", "noise", "truncation", "picard", "initial", "seed",
              "threads", "output", "verify", "rate", "mc", "probe_lipschitz",
              "probe_uniform"},
             "config");

  RunConfig cfg;
  try {
    if (const json* g = find(j, "grid")) {
      check_keys(*g, {"n", "dealias_fraction"}, "grid");
      cfg.sim.grid = TorusGrid(static_cast<int>(opt_int(*g, "n", 64, "grid")),
                               opt_num(*g, "dealias_fraction", 2.0 / 3.0, "grid"));
    }
    if (const json* s = find(j, "sim")) {
      check_keys(*s,
                 {"T", "dt", "epsilon", "p", "integrator", "nonlinearity",
                  "probe_mode"},
                 "sim");
      cfg.sim.T = opt_num(*s, "T", 1.0, "sim");
      cfg.sim.dt = opt_num(*s, "dt", 1e-3, "sim");
      cfg.sim.epsilon = opt_num(*s, "epsilon", 0.0, "sim");
      cfg.sim.p = opt_num(*s, "p", 4.0, "sim");
      const std::string integ = opt_str(*s, "integrator", "euler", "sim");
      if (integ == "euler")
        cfg.sim.integrator = Integrator::exponential_euler;
      else if (integ == "heun")
        cfg.sim.integrator = Integrator::exponential_heun;
      else
        throw ConfigError("sim: integrator must be 'euler' or 'heun'");
      cfg.sim.nonlinearity = opt_bool(*s, "nonlinearity", true, "sim");
      if (find(*s, "probe_mode"))
        std::tie(cfg.sim.probe_k1, cfg.sim.probe_k2) =
            need_mode(*s, "probe_mode", "sim");
    }
    if (const json* n = find(j, "noise")) {
      check_keys(*n, {"type", "a", "K", "L", "channels"}, "noise");
      const std::string type = opt_str(*n, "type", "none", "noise");
      if (type == "none") {
        cfg.noise_type = NoiseType::none;
      } else if (type == "additive") {
        cfg.noise_type = NoiseType::additive;
        cfg.additive = AdditiveNoiseSpec(opt_num(*n, "a", 1.0, "noise"));
      } else if (type == "multiplicative") {
        cfg.noise_type = NoiseType::multiplicative;
        cfg.multiplicative.K = opt_num(*n, "K", 1.0, "noise");
        cfg.multiplicative.L = opt_num(*n, "L", 1.0, "noise");
        const json* ch = find(*n, "channels");
        if (!ch || !ch->is_array() || ch->empty())
          throw ConfigError("noise: multiplicative spec needs channels");
        for (size_t i = 0; i < ch->size(); ++i) {
          const std::string p = "noise.channels[" + std::to_string(i) + "]";
          check_keys((*ch)[i], {"shape", "profile"}, p);
          NoiseChannel c;
          c.shape = parse_shape(opt_str((*ch)[i], "shape", "constant", p), p);
          if (const json* pr = find((*ch)[i], "profile")) {
            check_keys(*pr, {"type", "modes"}, p + ".profile");
            const std::string pt = opt_str(*pr, "type", "uniform", p);
            if (pt == "uniform") {
              c.uniform_profile = true;
            } else if (pt == "modes") {
              const json* m = find(*pr, "modes");
              if (!m) throw ConfigError(p + ".profile: 'modes' required");
              c.modes = parse_modes(*m, p + ".profile.modes");
            } else {
              throw ConfigError(p + ".profile: unknown type '" + pt + "'");
            }
          } else {
            c.uniform_profile = true;
          }
          cfg.multiplicative.channels.push_back(std::move(c));
        }
      } else {
        throw ConfigError("noise: unknown type '" + type + "'");
      }
    }
    if (const json* t = find(j, "truncation")) {
      check_keys(*t, {"radius", "apply_to_sigma"}, "truncation");
      cfg.trunc_radius = opt_num(*t, "radius", -1.0, "truncation");
      cfg.trunc_apply_to_sigma = opt_bool(*t, "apply_to_sigma", false, "truncation");
    }
    if (const json* p = find(j, "picard")) {
      check_keys(*p, {"lambda", "tol", "max_iter"}, "picard");
      cfg.picard.lambda = opt_num(*p, "lambda", 100.0, "picard");
      cfg.picard.tol = opt_num(*p, "tol", 1e-10, "picard");
      cfg.picard.max_iter = static_cast<int>(opt_int(*p, "max_iter", 50, "picard"));
    }
    if (const json* i = find(j, "initial"))
      cfg.initial = parse_field_spec(*i, "initial");
    cfg.seed = static_cast<uint64_t>(opt_int(j, "seed", 1, "config"));
    cfg.threads = static_cast<int>(opt_int(j, "threads", 0, "config"));
    if (const json* o = find(j, "output")) {
      check_keys(*o, {"dump_states", "record_every"}, "output");
      cfg.dump_states = opt_bool(*o, "dump_states", false, "output");
      cfg.sim.record_every =
          static_cast<int>(opt_int(*o, "record_every", 1, "output"));
    }

    if (const json* v = find(j, "verify")) {
      check_keys(*v,
                 {"betas_gradient", "betas_kernel", "s_min", "s_max", "samples",
                  "slope_tol", "r2_min", "random_fields", "rep_agree_tol",
                  "transport_tol", "curl_tol"},
                 "verify");
      cfg.verify.betas_gradient =
          opt_num_list(*v, "betas_gradient", cfg.verify.betas_gradient, "verify");
      cfg.verify.betas_kernel =
          opt_num_list(*v, "betas_kernel", cfg.verify.betas_kernel, "verify");
      cfg.verify.fit.s_min = opt_num(*v, "s_min", 1e-3, "verify");
      cfg.verify.fit.s_max = opt_num(*v, "s_max", 1e-1, "verify");
      cfg.verify.fit.num_samples =
          static_cast<int>(opt_int(*v, "samples", 16, "verify"));
      cfg.verify.slope_tol = opt_num(*v, "slope_tol", 0.05, "verify");
      cfg.verify.r2_min = opt_num(*v, "r2_min", 0.999, "verify");
      cfg.verify.random_fields =
          static_cast<int>(opt_int(*v, "random_fields", 100, "verify"));
      cfg.verify.rep_agree_tol = opt_num(*v, "rep_agree_tol", 1e-10, "verify");
      cfg.verify.transport_tol = opt_num(*v, "transport_tol", 1e-12, "verify");
      cfg.verify.curl_tol = opt_num(*v, "curl_tol", 1e-13, "verify");
    }
    if (const json* r = find(j, "rate")) {
      check_keys(*r,
                 {"target", "penalty0", "growth", "stages", "max_iter",
                  "gradient", "restarts", "restart_amplitude", "bound",
                  "fd_step", "grad_tol", "stall_window", "residual_tol"},
                 "rate");
      if (const json* t = find(*r, "target"))
        cfg.rate.target = parse_field_spec(*t, "rate.target");
      cfg.rate.settings.penalty0 = opt_num(*r, "penalty0", 10.0, "rate");
      cfg.rate.settings.penalty_growth = opt_num(*r, "growth", 10.0, "rate");
      cfg.rate.settings.penalty_stages =
          static_cast<int>(opt_int(*r, "stages", 3, "rate"));
      cfg.rate.settings.max_iter =
          static_cast<int>(opt_int(*r, "max_iter", 500, "rate"));
      const std::string grad = opt_str(*r, "gradient", "fd", "rate");
      if (grad == "fd")
        cfg.rate.settings.gradient = GradientMethod::finite_difference;
      else if (grad == "adjoint")
        cfg.rate.settings.gradient = GradientMethod::adjoint;
      else
        throw ConfigError("rate: gradient must be 'fd' or 'adjoint'");
      cfg.rate.settings.restarts =
          static_cast<int>(opt_int(*r, "restarts", 3, "rate"));
      cfg.rate.settings.restart_amplitude =
          opt_num(*r, "restart_amplitude", 0.1, "rate");
      cfg.rate.settings.control_bound =
          opt_num(*r, "bound", std::numeric_limits<double>::infinity(), "rate");
      cfg.rate.settings.fd_step = opt_num(*r, "fd_step", 1e-5, "rate");
      cfg.rate.settings.grad_norm_tol = opt_num(*r, "grad_tol", 1e-9, "rate");
      cfg.rate.settings.stall_window =
          static_cast<int>(opt_int(*r, "stall_window", 20, "rate"));
      cfg.rate.settings.residual_tol = opt_num(*r, "residual_tol", 0.05, "rate");
    }
    if (const json* m = find(j, "mc")) {
      check_keys(*m, {"event", "epsilons", "samples", "use_additive"}, "mc");
      if (const json* e = find(*m, "event")) cfg.mc.event = parse_event(*e, "mc.event");
      cfg.mc.epsilons = opt_num_list(*m, "epsilons", cfg.mc.epsilons, "mc");
      cfg.mc.samples = opt_int(*m, "samples", 1000, "mc");
      cfg.mc.use_additive = opt_bool(*m, "use_additive", false, "mc");
    }
    if (const json* l = find(j, "probe_lipschitz")) {
      check_keys(*l, {"R1", "R2", "pairs"}, "probe_lipschitz");
      cfg.lipschitz.R1 = opt_num(*l, "R1", 1.0, "probe_lipschitz");
      cfg.lipschitz.R2 = opt_num(*l, "R2", 1.0, "probe_lipschitz");
      cfg.lipschitz.pairs =
          static_cast<int>(opt_int(*l, "pairs", 50, "probe_lipschitz"));
    }
    if (const json* u = find(j, "probe_uniform")) {
      check_keys(*u,
                 {"epsilons", "deltas", "samples", "initials", "controls",
                  "control_bound"},
                 "probe_uniform");
      cfg.uniform.epsilons =
          opt_num_list(*u, "epsilons", cfg.uniform.epsilons, "probe_uniform");
      cfg.uniform.deltas =
          opt_num_list(*u, "deltas", cfg.uniform.deltas, "probe_uniform");
      cfg.uniform.samples =
          static_cast<int>(opt_int(*u, "samples", 200, "probe_uniform"));
      cfg.uniform.control_bound =
          opt_num(*u, "control_bound", 10.0, "probe_uniform");
      if (const json* in = find(*u, "initials")) {
        if (!in->is_array())
          throw ConfigError("probe_uniform.initials must be an array");
        for (size_t i = 0; i < in->size(); ++i)
          cfg.uniform.initials.push_back(parse_field_spec(
              (*in)[i], "probe_uniform.initials[" + std::to_string(i) + "]"));
      }
      if (const json* co = find(*u, "controls")) {
        if (!co->is_array())
          throw ConfigError("probe_uniform.controls must be an array");
        for (size_t i = 0; i < co->size(); ++i)
          cfg.uniform.controls.push_back(parse_control_spec(
              (*co)[i], "probe_uniform.controls[" + std::to_string(i) + "]"));
      }
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  cfg.sim.validate();
  if (cfg.noise_type == NoiseType::multiplicative)
    validate_hypothesis(cfg.multiplicative, cfg.sim.grid, cfg.seed, 2000);
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["grid"]["n"] = cfg.sim.grid.n;
  j["grid"]["dealias_fraction"] = cfg.sim.grid.dealias_fraction;
  j["sim"]["T"] = cfg.sim.T;
  j["sim"]["dt"] = cfg.sim.dt;
  j["sim"]["epsilon"] = cfg.sim.epsilon;
  j["sim"]["p"] = cfg.sim.p;
  j["sim"]["integrator"] =
      cfg.sim.integrator == Integrator::exponential_euler ? "euler" : "heun";
  j["sim"]["nonlinearity"] = cfg.sim.nonlinearity;
  j["sim"]["probe_mode"] = {cfg.sim.probe_k1, cfg.sim.probe_k2};
  switch (cfg.noise_type) {
    case NoiseType::none:
      j["noise"]["type"] = "none";
      break;
    case NoiseType::additive:
      j["noise"]["type"] = "additive";
      j["noise"]["a"] = cfg.additive.a;
      break;
    case NoiseType::multiplicative: {
      j["noise"]["type"] = "multiplicative";
      j["noise"]["K"] = cfg.multiplicative.K;
      j["noise"]["L"] = cfg.multiplicative.L;
      json chans = json::array();
      for (const NoiseChannel& c : cfg.multiplicative.channels) {
        json cj;
        cj["shape"] = sigma_shape_name(c.shape);
        if (c.uniform_profile) {
          cj["profile"]["type"] = "uniform";
        } else {
          cj["profile"]["type"] = "modes";
          cj["profile"]["modes"] = modes_to_json(c.modes);
        }
        chans.push_back(cj);
      }
      j["noise"]["channels"] = chans;
      break;
    }
  }
  j["truncation"]["radius"] = cfg.trunc_radius;
  j["truncation"]["apply_to_sigma"] = cfg.trunc_apply_to_sigma;
  j["picard"]["lambda"] = cfg.picard.lambda;
  j["picard"]["tol"] = cfg.picard.tol;
  j["picard"]["max_iter"] = cfg.picard.max_iter;
  j["initial"] = field_spec_to_json(cfg.initial);
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["output"]["dump_states"] = cfg.dump_states;
  j["output"]["record_every"] = cfg.sim.record_every;

  j["verify"]["betas_gradient"] = cfg.verify.betas_gradient;
  j["verify"]["betas_kernel"] = cfg.verify.betas_kernel;
  j["verify"]["s_min"] = cfg.verify.fit.s_min;
  j["verify"]["s_max"] = cfg.verify.fit.s_max;
  j["verify"]["samples"] = cfg.verify.fit.num_samples;
  j["verify"]["slope_tol"] = cfg.verify.slope_tol;
  j["verify"]["r2_min"] = cfg.verify.r2_min;
  j["verify"]["random_fields"] = cfg.verify.random_fields;
  j["verify"]["rep_agree_tol"] = cfg.verify.rep_agree_tol;
  j["verify"]["transport_tol"] = cfg.verify.transport_tol;
  j["verify"]["curl_tol"] = cfg.verify.curl_tol;

  j["rate"]["target"] = field_spec_to_json(cfg.rate.target);
  j["rate"]["penalty0"] = cfg.rate.settings.penalty0;
  j["rate"]["growth"] = cfg.rate.settings.penalty_growth;
  j["rate"]["stages"] = cfg.rate.settings.penalty_stages;
  j["rate"]["max_iter"] = cfg.rate.settings.max_iter;
  j["rate"]["gradient"] =
      cfg.rate.settings.gradient == GradientMethod::adjoint ? "adjoint" : "fd";
  j["rate"]["restarts"] = cfg.rate.settings.restarts;
  j["rate"]["restart_amplitude"] = cfg.rate.settings.restart_amplitude;
  if (std::isfinite(cfg.rate.settings.control_bound))
    j["rate"]["bound"] = cfg.rate.settings.control_bound;
  j["rate"]["fd_step"] = cfg.rate.settings.fd_step;
  j["rate"]["grad_tol"] = cfg.rate.settings.grad_norm_tol;
  j["rate"]["stall_window"] = cfg.rate.settings.stall_window;
  j["rate"]["residual_tol"] = cfg.rate.settings.residual_tol;

  j["mc"]["event"] = event_to_json(cfg.mc.event);
  j["mc"]["epsilons"] = cfg.mc.epsilons;
  j["mc"]["samples"] = cfg.mc.samples;
  j["mc"]["use_additive"] = cfg.mc.use_additive;

  j["probe_lipschitz"]["R1"] = cfg.lipschitz.R1;
  j["probe_lipschitz"]["R2"] = cfg.lipschitz.R2;
  j["probe_lipschitz"]["pairs"] = cfg.lipschitz.pairs;

  j["probe_uniform"]["epsilons"] = cfg.uniform.epsilons;
  j["probe_uniform"]["deltas"] = cfg.uniform.deltas;
  j["probe_uniform"]["samples"] = cfg.uniform.samples;
  j["probe_uniform"]["control_bound"] = cfg.uniform.control_bound;
  json inits = json::array();
  for (const FieldSpec& f : cfg.uniform.initials)
    inits.push_back(field_spec_to_json(f));
  j["probe_uniform"]["initials"] = inits;
  json ctrls = json::array();
  for (const ControlSpec& c : cfg.uniform.controls)
    ctrls.push_back(control_spec_to_json(c));
  j["probe_uniform"]["controls"] = ctrls;

  return j.dump(2) + "\n";
}

}  // namespace vort
