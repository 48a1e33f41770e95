// Python bindings: thin bridges over the C++ core. Structured values cross
// the boundary as JSON strings (the same shapes the CLI prints); the Python
// package decodes them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "modalab/controls.hpp"
#include "modalab/formula.hpp"
#include "modalab/kripke.hpp"
#include "modalab/multiverse.hpp"
#include "modalab/theories.hpp"

namespace py = pybind11;

namespace {

using ojson = nlohmann::ordered_json;
using namespace modalab;

Theory theory_of(const std::string& name) {
  const auto t = theory_from_string(name);
  if (!t) throw std::invalid_argument("unknown theory: " + name + " (expected k|s4|s4.2|s5)");
  return *t;
}

std::vector<PropFormula> parse_all(const std::vector<std::string>& texts) {
  std::vector<PropFormula> fs;
  fs.reserve(texts.size());
  for (const auto& t : texts) fs.push_back(parse_prop(t));
  return fs;
}

std::vector<std::string> scope_or_all(const Model& m, std::vector<std::string> scope) {
  if (scope.empty()) scope = m.frame().worlds();
  return scope;
}

ojson substitution_json(const Substitution& s) {
  std::map<std::string, std::string> sorted;
  for (const auto& [atom, f] : s.map()) sorted[atom] = render(f);
  ojson j = ojson::object();
  for (const auto& [atom, text] : sorted) j[atom] = text;
  return j;
}

std::string py_decide(const std::string& formula, const std::string& theory, size_t cap) {
  const PropFormula f = parse_prop(formula);
  const Theory t = theory_of(theory);
  const Verdict v = decide(f, t, cap);
  ojson out;
  out["theory"] = theory_name(t);
  out["formula"] = render(f);
  switch (v.kind) {
    case Verdict::Kind::Valid:
      out["verdict"] = "Valid";
      out["searched_bound"] = v.searched_bound;
      break;
    case Verdict::Kind::Countermodel:
      out["verdict"] = "Countermodel";
      out["world"] = v.world;
      out["model"] = ojson::parse(model_to_json(*v.model));
      break;
    case Verdict::Kind::Inconclusive:
      out["verdict"] = "Inconclusive";
      out["cap"] = v.cap;
      break;
  }
  return out.dump();
}

bool py_model_check(const std::string& model_json, const std::string& world,
                    const std::string& formula) {
  const Model m = model_from_json(model_json);
  return model_check(m, world, parse_prop(formula));
}

std::string py_valid_on_model(const std::string& model_json, const std::string& formula) {
  const Model m = model_from_json(model_json);
  const ModelValidity mv = valid_on_model(m, parse_prop(formula));
  ojson out;
  out["valid"] = mv.valid;
  if (!mv.valid) out["failing_world"] = mv.failing_world;
  return out.dump();
}

std::string py_frame_valid(const std::string& model_json, const std::string& formula,
                           size_t atom_cap) {
  const Model m = model_from_json(model_json);
  const FrameValidity fv = valid_on_frame(m.frame(), parse_prop(formula), atom_cap);
  ojson out;
  out["holds"] = fv.valid;
  if (!fv.valid) {
    out["valuation"] = fv.valuation;
    out["failing_world"] = fv.failing_world;
  }
  return out.dump();
}

std::string py_frame_properties(const std::string& model_json) {
  const Model m = model_from_json(model_json);
  ojson out = ojson::object();
  const std::pair<const char*, FrameProperty> props[] = {
      {"reflexive", FrameProperty::Reflexive},   {"transitive", FrameProperty::Transitive},
      {"directed", FrameProperty::Directed},     {"symmetric", FrameProperty::Symmetric},
      {"equivalence", FrameProperty::Equivalence}};
  for (const auto& [name, p] : props) out[name] = frame_property(m.frame(), p).holds;
  return out.dump();
}

std::string py_classify(const std::string& model_json, const std::string& world,
                        const std::string& stmt) {
  const Model m = model_from_json(model_json);
  const ControlReport r = classify(m, world, parse_prop(stmt));
  ojson out;
  switch (r.role) {
    case ControlReport::Role::Switch:
      out["role"] = "switch";
      out["also_button"] = r.also_button;
      if (r.also_button) out["pushed"] = r.pushed;
      break;
    case ControlReport::Role::Button:
      out["role"] = "button";
      out["pushed"] = r.pushed;
      break;
    case ControlReport::Role::Neither:
      out["role"] = "neither";
      out["violating_world"] = r.world;
      out["reason"] = r.reason;
      break;
  }
  return out.dump();
}

std::string py_is_dial(const std::string& model_json, const std::vector<std::string>& values,
                       std::vector<std::string> scope) {
  const Model m = model_from_json(model_json);
  DialFamily dial;
  dial.statements = parse_all(values);
  dial.scope = scope_or_all(m, std::move(scope));
  const DialCheck dc = is_dial(m, dial);
  ojson out;
  out["ok"] = dc.ok;
  if (!dc.ok) {
    out["world"] = dc.world;
    out["value"] = dc.value;
    out["reason"] = dc.reason;
  }
  return out.dump();
}

std::string py_independent_switches(const std::string& model_json, const std::string& world,
                                    const std::vector<std::string>& switches) {
  const Model m = model_from_json(model_json);
  const SwitchIndependence si = independent_switches(m, world, parse_all(switches));
  ojson out;
  out["ok"] = si.ok;
  if (!si.ok) {
    out["violating_world"] = si.world;
    out["pattern"] = si.detail;
  }
  return out.dump();
}

std::string py_independent_buttons_dial(const std::string& model_json,
                                        const std::vector<std::string>& buttons,
                                        const std::vector<std::string>& dial_values,
                                        std::vector<std::string> scope) {
  const Model m = model_from_json(model_json);
  DialFamily dial;
  dial.statements = parse_all(dial_values);
  dial.scope = scope_or_all(m, std::move(scope));
  const ButtonDialIndependence bd = independent_buttons_dial(m, parse_all(buttons), dial);
  ojson out;
  out["ok"] = bd.ok;
  if (!bd.ok) {
    out["violating_world"] = bd.world;
    out["detail"] = bd.detail;
  }
  return out.dump();
}

ojson witness_json(const Model& m, const WitnessResult& w) {
  if (model_check(m, w.world, w.instance)) {
    throw std::runtime_error("internal error: witness failed re-verification");
  }
  ojson out;
  out["substitution"] = substitution_json(w.substitution);
  out["world"] = w.world;
  out["instance"] = render(w.instance);
  return out;
}

std::string py_s5_witness(const std::string& model_json, const std::string& world,
                          const std::vector<std::string>& switches, const std::string& formula) {
  const Model m = model_from_json(model_json);
  return witness_json(m, s5_cap_witness(m, world, parse_all(switches), parse_prop(formula)))
      .dump();
}

std::string py_s42_witness(const std::string& model_json, const std::string& world,
                           const std::vector<std::string>& buttons,
                           const std::vector<std::string>& dial_values,
                           std::vector<std::string> scope, const std::string& formula) {
  const Model m = model_from_json(model_json);
  DialFamily dial;
  dial.statements = parse_all(dial_values);
  dial.scope = scope_or_all(m, std::move(scope));
  return witness_json(m, s42_cap_witness(m, world, parse_all(buttons), dial, parse_prop(formula)))
      .dump();
}

std::string py_mp_check(const std::string& model_json, const std::string& world,
                        const std::vector<std::string>& pool, size_t depth) {
  const Model m = model_from_json(model_json);
  const MpReport r = mp_check(m, world, parse_all(pool), depth);
  ojson out;
  out["ok"] = r.ok;
  if (!r.ok) {
    out["witness"] = render(*r.witness);
    out["instance"] = r.instance;
  }
  return out.dump();
}

std::string py_fingerprint(const std::string& model_json, const std::vector<std::string>& pool,
                           size_t depth, size_t max_pool) {
  const Model m = model_from_json(model_json);
  FingerprintOptions opts;
  opts.max_pool = max_pool;
  const FingerprintReport r = logic_fingerprint(m, parse_all(pool), depth, opts);
  ojson out;
  out["pool_size"] = r.pool_size;
  auto schemes = ojson::array();
  for (const auto& s : r.schemes) {
    ojson one;
    one["name"] = s.name;
    one["scheme"] = s.scheme;
    one["instances"] = s.instances;
    one["valid"] = s.valid;
    one["all_valid"] = s.all_valid();
    if (!s.all_valid()) {
      auto fails = ojson::array();
      for (const auto& fl : s.failures) {
        ojson fj;
        fj["instance"] = fl.instance;
        fj["failing_worlds"] = fl.failing_worlds;
        fails.push_back(std::move(fj));
      }
      one["failures"] = std::move(fails);
    }
    schemes.push_back(std::move(one));
  }
  out["schemes"] = std::move(schemes);
  return out.dump();
}

std::string py_make_toy_system(size_t max_height, const std::vector<size_t>& multipliers,
                               size_t K) {
  return system_to_json(make_toy_system(max_height, multipliers, K));
}

std::string py_corollary_check(const std::string& system_json,
                               const std::vector<std::string>& sentences) {
  const ToySystem sys = system_from_json(system_json);
  std::vector<FoFormula> corpus;
  corpus.reserve(sentences.size());
  for (const auto& s : sentences) corpus.push_back(parse_fo(s));
  const CorollaryReport r = corollary_check(sys, corpus);
  ojson out;
  out["ok"] = r.ok;
  out["sentences"] = r.sentences;
  out["checks"] = r.checks;
  auto vio = ojson::array();
  for (const auto& v : r.violations) {
    ojson one;
    one["sentence"] = v.sentence;
    one["world"] = v.world;
    one["env"] = v.env;
    vio.push_back(std::move(one));
  }
  out["violations"] = std::move(vio);
  return out.dump();
}

bool py_account_check(const std::string& system_json) {
  return account_check(system_from_json(system_json));
}

std::string py_induce_model(const std::string& system_json,
                            const std::map<std::string, std::string>& atoms) {
  const ToySystem sys = system_from_json(system_json);
  std::map<std::string, AtomSpec> specs;
  for (const auto& [name, text] : atoms) specs.emplace(name, parse_atom_spec(text));
  return model_to_json(induce_model(sys, specs));
}

// Closed sentences only; modal truth evaluates the sentence as such,
// classical truth requires a first-order sentence.
bool py_eval_sentence(const std::string& system_json, const std::string& world,
                      const std::string& sentence, bool potentialist) {
  const ToySystem sys = system_from_json(system_json);
  const size_t w = sys.index_of(world);
  const FoFormula f = parse_fo(sentence);
  if (potentialist) return eval_potentialist(sys, w, f, {});
  return eval_fo(sys.world(w), f, {});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite Kripke-frame laboratory (C++ core)";

  py::register_exception<CapError>(m, "CapError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("canon", [](const std::string& text) { return render(parse_prop(text)); },
        py::arg("formula"), "Parse a formula and return its canonical rendering.");
  m.def("canon_fo", [](const std::string& text) { return render_fo(parse_fo(text)); },
        py::arg("formula"), "Parse a first-order/modal formula and render it canonically.");
  m.def("potentialist_translate",
        [](const std::string& text) { return render_fo(potentialist_translate(parse_fo(text))); },
        py::arg("formula"),
        "Prefix every universal with box and every existential with diamond.");
  m.def("button_sentence",
        [](size_t m_, size_t count) { return render_fo(button_sentence(m_, count)); },
        py::arg("multiplier"), py::arg("count"),
        "Pure-membership sentence asserting the truncated multiple set exists.");

  m.def("decide_json", &py_decide, py::arg("formula"), py::arg("theory"), py::arg("cap") = 12);
  m.def("model_check", &py_model_check, py::arg("model_json"), py::arg("world"),
        py::arg("formula"));
  m.def("valid_on_model_json", &py_valid_on_model, py::arg("model_json"), py::arg("formula"));
  m.def("frame_valid_json", &py_frame_valid, py::arg("model_json"), py::arg("formula"),
        py::arg("atom_cap") = 4);
  m.def("frame_properties_json", &py_frame_properties, py::arg("model_json"));

  m.def("classify_json", &py_classify, py::arg("model_json"), py::arg("world"),
        py::arg("statement"));
  m.def("is_dial_json", &py_is_dial, py::arg("model_json"), py::arg("values"),
        py::arg("scope") = std::vector<std::string>{});
  m.def("independent_switches_json", &py_independent_switches, py::arg("model_json"),
        py::arg("world"), py::arg("switches"));
  m.def("independent_buttons_dial_json", &py_independent_buttons_dial, py::arg("model_json"),
        py::arg("buttons"), py::arg("dial_values"),
        py::arg("scope") = std::vector<std::string>{});
  m.def("s5_witness_json", &py_s5_witness, py::arg("model_json"), py::arg("world"),
        py::arg("switches"), py::arg("formula"));
  m.def("s42_witness_json", &py_s42_witness, py::arg("model_json"), py::arg("world"),
        py::arg("buttons"), py::arg("dial_values"), py::arg("scope"), py::arg("formula"));
  m.def("mp_check_json", &py_mp_check, py::arg("model_json"), py::arg("world"), py::arg("pool"),
        py::arg("depth") = 2);
  m.def("fingerprint_json", &py_fingerprint, py::arg("model_json"), py::arg("pool"),
        py::arg("depth") = 2, py::arg("max_pool") = 4096);

  m.def("make_switch_model_json",
        [](size_t n, size_t depth) { return model_to_json(make_switch_model(n, depth)); },
        py::arg("switches"), py::arg("depth"));
  m.def("make_button_dial_model_json",
        [](size_t nb, size_t nd, size_t depth) {
          return model_to_json(make_button_dial_model(nb, nd, depth));
        },
        py::arg("buttons"), py::arg("dial_values"), py::arg("depth"));

  m.def("make_toy_system_json", &py_make_toy_system, py::arg("max_height"),
        py::arg("multipliers"), py::arg("K"));
  m.def("corollary_check_json", &py_corollary_check, py::arg("system_json"),
        py::arg("sentences"));
  m.def("account_check", &py_account_check, py::arg("system_json"));
  m.def("induce_model_json", &py_induce_model, py::arg("system_json"), py::arg("atoms"));
  m.def("eval_sentence", &py_eval_sentence, py::arg("system_json"), py::arg("world"),
        py::arg("sentence"), py::arg("potentialist") = false);
}
