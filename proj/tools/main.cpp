// modalab command-line front end.
//
// Exit codes: 0 = valid/true/success, 1 = countermodel/false (witness on
// stdout), 2 = usage or parse error, 3 = inconclusive or cap exceeded.
// Machine-readable JSON goes to stdout (one document per invocation, byte
// identical across identical invocations); diagnostics go to stderr.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modalab/controls.hpp"
#include "modalab/formula.hpp"
#include "modalab/kripke.hpp"
#include "modalab/multiverse.hpp"
#include "modalab/theories.hpp"

namespace {

using ojson = nlohmann::ordered_json;
using namespace modalab;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text << "\n";
  if (!out) throw std::invalid_argument("cannot write file: " + path);
}

Model load_model(const std::string& path) { return model_from_json(read_file(path)); }

ToySystem load_system(const std::string& path) { return system_from_json(read_file(path)); }

std::vector<PropFormula> parse_all(const std::vector<std::string>& texts) {
  std::vector<PropFormula> fs;
  fs.reserve(texts.size());
  for (const auto& t : texts) fs.push_back(parse_prop(t));
  return fs;
}

// Empty scope means every world, in declared order.
std::vector<std::string> scope_or_all(const Model& m, std::vector<std::string> scope) {
  if (scope.empty()) scope = m.frame().worlds();
  return scope;
}

void require_world(const Model& m, const std::string& w) {
  if (!m.frame().has_world(w)) throw std::invalid_argument("unknown world: " + w);
}

// Substitutions print sorted by atom so output stays deterministic.
ojson substitution_json(const Substitution& s) {
  std::map<std::string, std::string> sorted;
  for (const auto& [atom, f] : s.map()) sorted[atom] = render(f);
  ojson j = ojson::object();
  for (const auto& [atom, text] : sorted) j[atom] = text;
  return j;
}

void emit(const ojson& j) { std::cout << j.dump() << "\n"; }

FrameProperty property_from_name(const std::string& name) {
  if (name == "reflexive") return FrameProperty::Reflexive;
  if (name == "transitive") return FrameProperty::Transitive;
  if (name == "directed") return FrameProperty::Directed;
  if (name == "symmetric") return FrameProperty::Symmetric;
  if (name == "equivalence") return FrameProperty::Equivalence;
  throw std::invalid_argument(
      "unknown frame property: " + name +
      " (expected reflexive|transitive|directed|symmetric|equivalence)");
}

// ---------------------------------------------------------------------------
// decide

int run_decide(const std::string& theory, const std::string& formula, size_t cap) {
  const auto th = theory_from_string(theory);
  if (!th) throw std::invalid_argument("unknown theory: " + theory + " (expected k|s4|s4.2|s5)");
  const PropFormula f = parse_prop(formula);
  const Verdict v = decide(f, *th, cap);

  ojson out;
  out["theory"] = theory_name(*th);
  out["formula"] = render(f);
  switch (v.kind) {
    case Verdict::Kind::Valid:
      out["verdict"] = "Valid";
      out["searched_bound"] = v.searched_bound;
      emit(out);
      return 0;
    case Verdict::Kind::Countermodel: {
      if (model_check(*v.model, v.world, f)) {
        throw std::runtime_error("internal error: countermodel failed re-verification");
      }
      out["verdict"] = "Countermodel";
      out["world"] = v.world;
      out["model"] = ojson::parse(model_to_json(*v.model));
      emit(out);
      return 1;
    }
    case Verdict::Kind::Inconclusive:
    default:
      out["verdict"] = "Inconclusive";
      out["cap"] = v.cap;
      emit(out);
      return 3;
  }
}

// ---------------------------------------------------------------------------
// model-check

int run_model_check(const std::string& model_path, std::string world, bool all,
                    std::string formula) {
  // Under --all only the formula is positional; it lands in the world slot.
  if (all && formula.empty() && !world.empty()) {
    formula = std::move(world);
    world.clear();
  }
  if (formula.empty()) throw std::invalid_argument("missing formula argument");
  if (all == !world.empty()) {
    throw std::invalid_argument("model-check takes either a world argument or --all");
  }
  const Model m = load_model(model_path);
  const PropFormula f = parse_prop(formula);

  ojson out;
  out["formula"] = render(f);
  if (all) {
    const ModelValidity mv = valid_on_model(m, f);
    out["valid"] = mv.valid;
    if (!mv.valid) out["failing_world"] = mv.failing_world;
    emit(out);
    return mv.valid ? 0 : 1;
  }
  require_world(m, world);
  const bool holds = model_check(m, world, f);
  out["world"] = world;
  out["holds"] = holds;
  emit(out);
  return holds ? 0 : 1;
}

// ---------------------------------------------------------------------------
// frame-check

int run_frame_check(const std::string& model_path, const std::string& formula,
                    const std::vector<std::string>& props, size_t atom_cap) {
  const Model m = load_model(model_path);
  const Frame& fr = m.frame();

  static const std::vector<std::string> kAll = {"reflexive", "transitive", "directed",
                                                "symmetric", "equivalence"};
  const bool explicit_props = !props.empty();
  const std::vector<std::string>& requested = explicit_props ? props : kAll;

  ojson out;
  out["worlds"] = fr.size();
  ojson pj = ojson::object();
  bool props_ok = true;
  for (const auto& name : requested) {
    const PropertyCheck pc = frame_property(fr, property_from_name(name));
    ojson one;
    one["holds"] = pc.holds;
    if (!pc.holds) {
      one["witness"] = pc.witness;
      one["detail"] = pc.detail;
      props_ok = false;
    }
    pj[name] = std::move(one);
  }
  out["properties"] = std::move(pj);

  bool formula_ok = true;
  if (!formula.empty()) {
    const PropFormula f = parse_prop(formula);
    const FrameValidity fv = valid_on_frame(fr, f, atom_cap);
    ojson vj;
    vj["formula"] = render(f);
    vj["holds"] = fv.valid;
    if (!fv.valid) {
      vj["valuation"] = fv.valuation;
      vj["failing_world"] = fv.failing_world;
      formula_ok = false;
    }
    out["frame_valid"] = std::move(vj);
  }
  emit(out);
  // Properties gate the exit code only when the caller picked them.
  return (formula_ok && (!explicit_props || props_ok)) ? 0 : 1;
}

// ---------------------------------------------------------------------------
// frames-sweep

int run_frames_sweep(const std::string& formula, const std::vector<std::string>& over,
                     const std::string& property, size_t max_worlds, size_t atom_cap,
                     size_t cap) {
  const PropFormula f = parse_prop(formula);
  std::vector<FrameProperty> base;
  for (const auto& name : over) base.push_back(property_from_name(name));
  const FrameProperty target = property_from_name(property);
  const size_t bound = std::min(max_worlds, cap);

  size_t frames = 0;
  size_t agree = 0;
  size_t valid_not_property = 0;
  size_t property_not_valid = 0;
  constexpr size_t kMaxMismatches = 5;
  auto mismatches = ojson::array();
  bool truncated = false;

  for (size_t n = 1; n <= bound; ++n) {
    enumerate_frames(n, base, [&](const Frame& fr) {
      ++frames;
      const bool fv = valid_on_frame(fr, f, atom_cap).valid;
      const bool pp = frame_property(fr, target).holds;
      if (fv == pp) {
        ++agree;
      } else {
        (fv ? valid_not_property : property_not_valid) += 1;
        if (mismatches.size() < kMaxMismatches) {
          ojson mm;
          mm["worlds"] = fr.size();
          auto rel = ojson::array();
          for (const auto& [a, b] : fr.relation_pairs()) rel.push_back(ojson::array({a, b}));
          mm["relation"] = std::move(rel);
          mm["frame_valid"] = fv;
          mm["property"] = pp;
          mismatches.push_back(std::move(mm));
        } else {
          truncated = true;
        }
      }
      return true;
    });
  }

  ojson out;
  out["formula"] = render(f);
  out["over"] = over;
  out["property"] = property;
  out["max_worlds"] = bound;
  out["frames"] = frames;
  out["agree"] = agree;
  out["valid_not_property"] = valid_not_property;
  out["property_not_valid"] = property_not_valid;
  const bool equivalent = valid_not_property == 0 && property_not_valid == 0;
  out["equivalent"] = equivalent;
  out["mismatches"] = std::move(mismatches);
  if (truncated) out["mismatches_truncated"] = true;
  emit(out);
  return equivalent ? 0 : 1;
}

// ---------------------------------------------------------------------------
// controls

int run_classify(const std::string& model_path, const std::string& world,
                 const std::string& stmt) {
  const Model m = load_model(model_path);
  require_world(m, world);
  const PropFormula s = parse_prop(stmt);
  const ControlReport r = classify(m, world, s);

  ojson out;
  out["statement"] = render(s);
  out["world"] = world;
  switch (r.role) {
    case ControlReport::Role::Switch:
      out["role"] = "switch";
      out["also_button"] = r.also_button;
      if (r.also_button) out["pushed"] = r.pushed;
      emit(out);
      return 0;
    case ControlReport::Role::Button:
      out["role"] = "button";
      out["pushed"] = r.pushed;
      emit(out);
      return 0;
    case ControlReport::Role::Neither:
    default:
      out["role"] = "neither";
      out["violating_world"] = r.world;
      out["reason"] = r.reason;
      emit(out);
      return 1;
  }
}

int run_dial(const std::string& model_path, const std::vector<std::string>& values,
             std::vector<std::string> scope) {
  const Model m = load_model(model_path);
  DialFamily dial;
  dial.statements = parse_all(values);
  dial.scope = scope_or_all(m, std::move(scope));
  for (const auto& w : dial.scope) require_world(m, w);
  const DialCheck dc = is_dial(m, dial);

  ojson out;
  out["values"] = values.size();
  out["scope_size"] = dial.scope.size();
  out["ok"] = dc.ok;
  if (!dc.ok) {
    out["world"] = dc.world;
    out["value"] = dc.value;
    out["reason"] = dc.reason;
  }
  emit(out);
  return dc.ok ? 0 : 1;
}

int run_independent(const std::string& model_path, const std::string& world,
                    const std::vector<std::string>& switches,
                    const std::vector<std::string>& buttons,
                    const std::vector<std::string>& dial_values,
                    std::vector<std::string> scope) {
  const bool switch_mode = !switches.empty();
  const bool button_mode = !buttons.empty() || !dial_values.empty();
  if (switch_mode == button_mode) {
    throw std::invalid_argument(
        "independent takes either --switches or --buttons with --dial");
  }
  const Model m = load_model(model_path);

  ojson out;
  if (switch_mode) {
    if (world.empty()) throw std::invalid_argument("--switches requires a world argument");
    require_world(m, world);
    const SwitchIndependence si = independent_switches(m, world, parse_all(switches));
    out["kind"] = "switches";
    out["world"] = world;
    out["ok"] = si.ok;
    if (!si.ok) {
      out["violating_world"] = si.world;
      out["pattern"] = si.detail;
    }
    emit(out);
    return si.ok ? 0 : 1;
  }

  if (buttons.empty() || dial_values.empty()) {
    throw std::invalid_argument("buttons-dial independence needs both --buttons and --dial");
  }
  if (!world.empty()) {
    throw std::invalid_argument("buttons-dial independence takes no world argument");
  }
  DialFamily dial;
  dial.statements = parse_all(dial_values);
  dial.scope = scope_or_all(m, std::move(scope));
  for (const auto& w : dial.scope) require_world(m, w);
  const ButtonDialIndependence bd = independent_buttons_dial(m, parse_all(buttons), dial);
  out["kind"] = "buttons-dial";
  out["ok"] = bd.ok;
  if (!bd.ok) {
    out["violating_world"] = bd.world;
    out["detail"] = bd.detail;
  }
  emit(out);
  return bd.ok ? 0 : 1;
}

ojson witness_json(const Model& m, const WitnessResult& w, const PropFormula& f) {
  if (model_check(m, w.world, w.instance)) {
    throw std::runtime_error("internal error: witness failed re-verification");
  }
  ojson out;
  out["formula"] = render(f);
  out["substitution"] = substitution_json(w.substitution);
  out["world"] = w.world;
  out["instance"] = render(w.instance);
  return out;
}

int run_s5_witness(const std::string& model_path, const std::string& world,
                   const std::vector<std::string>& switches, const std::string& formula) {
  const Model m = load_model(model_path);
  require_world(m, world);
  const PropFormula f = parse_prop(formula);
  const WitnessResult w = s5_cap_witness(m, world, parse_all(switches), f);
  emit(witness_json(m, w, f));
  return 0;
}

int run_s42_witness(const std::string& model_path, const std::string& world,
                    const std::vector<std::string>& buttons,
                    const std::vector<std::string>& dial_values,
                    std::vector<std::string> scope, const std::string& formula) {
  const Model m = load_model(model_path);
  require_world(m, world);
  const PropFormula f = parse_prop(formula);
  DialFamily dial;
  dial.statements = parse_all(dial_values);
  dial.scope = scope_or_all(m, std::move(scope));
  for (const auto& w : dial.scope) require_world(m, w);
  const WitnessResult w = s42_cap_witness(m, world, parse_all(buttons), dial, f);
  emit(witness_json(m, w, f));
  return 0;
}

int run_mp(const std::string& model_path, const std::string& world,
           const std::vector<std::string>& pool, size_t depth) {
  const Model m = load_model(model_path);
  require_world(m, world);
  const MpReport r = mp_check(m, world, parse_all(pool), depth);

  ojson out;
  out["world"] = world;
  out["ok"] = r.ok;
  if (!r.ok) {
    const PropFormula g = *r.witness;
    const PropFormula inst = PropFormula::implies(PropFormula::diamond(PropFormula::box(g)), g);
    if (model_check(m, world, inst)) {
      throw std::runtime_error("internal error: witness failed re-verification");
    }
    out["witness"] = render(g);
    out["instance"] = r.instance;
  }
  emit(out);
  return r.ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// multiverse

int run_mv_build(size_t max_height, const std::vector<size_t>& multipliers, size_t K,
                 const std::string& out_path) {
  const ToySystem sys = make_toy_system(max_height, multipliers, K);
  const std::string js = system_to_json(sys);
  if (out_path.empty()) {
    std::cout << js << "\n";
    return 0;
  }
  write_file(out_path, js);
  ojson out;
  out["worlds"] = sys.size();
  out["top"] = sys.world(sys.top()).id;
  out["out"] = out_path;
  emit(out);
  return 0;
}

// Corpus files hold one sentence per line; blank lines and lines starting
// with '#' are skipped.
std::vector<FoFormula> load_corpus(const std::string& path,
                                   std::vector<std::string>* rendered) {
  const std::string text = read_file(path);
  std::vector<FoFormula> corpus;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      corpus.push_back(parse_fo(line));
    } catch (const ParseError& e) {
      std::ostringstream os;
      os << path << ":" << lineno << ": " << e.what();
      throw std::invalid_argument(os.str());
    }
    if (rendered) rendered->push_back(render_fo(corpus.back()));
  }
  return corpus;
}

int run_mv_corollary(const std::string& sys_path, const std::string& corpus_path) {
  const ToySystem sys = load_system(sys_path);
  std::vector<std::string> rendered;
  const std::vector<FoFormula> corpus = load_corpus(corpus_path, &rendered);
  const CorollaryReport r = corollary_check(sys, corpus);

  ojson out;
  out["ok"] = r.ok;
  out["sentences"] = r.sentences;
  out["checks"] = r.checks;
  auto vio = ojson::array();
  for (const auto& v : r.violations) {
    ojson one;
    one["sentence"] = v.sentence;
    one["formula"] = rendered.at(v.sentence);
    one["world"] = v.world;
    one["env"] = v.env;
    vio.push_back(std::move(one));
  }
  out["violations"] = std::move(vio);
  emit(out);
  return r.ok ? 0 : 1;
}

int run_mv_account(const std::string& sys_path) {
  const ToySystem sys = load_system(sys_path);
  const bool ok = account_check(sys);
  ojson out;
  out["ok"] = ok;
  emit(out);
  return ok ? 0 : 1;
}

// Atom spec files are JSON objects mapping atom names to observable
// descriptions: a closed first-order sentence, "height_mod <m> = <i>", or
// "button <m> <count>".
int run_mv_induce(const std::string& sys_path, const std::string& atoms_path,
                  const std::string& out_path) {
  const ToySystem sys = load_system(sys_path);
  ojson spec;
  try {
    spec = ojson::parse(read_file(atoms_path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(atoms_path + ": " + e.what());
  }
  if (!spec.is_object() || spec.empty()) {
    throw std::invalid_argument(atoms_path + ": expected a non-empty object of atom -> spec");
  }
  std::map<std::string, AtomSpec> atoms;
  for (const auto& [name, value] : spec.items()) {
    if (!value.is_string()) {
      throw std::invalid_argument(atoms_path + ": spec for '" + name + "' must be a string");
    }
    atoms.emplace(name, parse_atom_spec(value.get<std::string>()));
  }
  const Model m = induce_model(sys, atoms);
  const std::string js = model_to_json(m);
  if (out_path.empty()) {
    std::cout << js << "\n";
    return 0;
  }
  write_file(out_path, js);
  ojson out;
  out["worlds"] = m.size();
  out["atoms"] = m.atom_names();
  out["out"] = out_path;
  emit(out);
  return 0;
}

// ---------------------------------------------------------------------------
// fingerprint

int run_fingerprint(const std::string& model_path, const std::vector<std::string>& pool,
                    size_t depth, const FingerprintOptions& opts) {
  const Model m = load_model(model_path);
  const FingerprintReport r = logic_fingerprint(m, parse_all(pool), depth, opts);

  ojson out;
  out["pool_size"] = r.pool_size;
  auto schemes = ojson::array();
  bool all_ok = true;
  for (const auto& s : r.schemes) {
    ojson one;
    one["name"] = s.name;
    one["scheme"] = s.scheme;
    one["instances"] = s.instances;
    one["valid"] = s.valid;
    one["all_valid"] = s.all_valid();
    if (!s.all_valid()) {
      all_ok = false;
      auto fails = ojson::array();
      for (const auto& fl : s.failures) {
        ojson fj;
        fj["args"] = fl.args;
        fj["instance"] = fl.instance;
        fj["failing_worlds"] = fl.failing_worlds;
        if (fl.worlds_truncated) fj["worlds_truncated"] = true;
        fails.push_back(std::move(fj));
      }
      one["failures"] = std::move(fails);
      if (s.failures_truncated) one["failures_truncated"] = true;
    }
    schemes.push_back(std::move(one));
  }
  out["schemes"] = std::move(schemes);
  emit(out);
  return all_ok ? 0 : 1;
}

// One-token-per-occurrence list option: repeatable, never consumes trailing
// positionals the way greedy vector options do.
CLI::Option* list_option(CLI::App* cmd, const std::string& name, std::vector<std::string>& dst,
                         const std::string& help, bool comma_split) {
  CLI::Option* opt = cmd->add_option(name, dst, help);
  opt->allow_extra_args(false);
  if (comma_split) opt->delimiter(',');
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite Kripke-frame laboratory: modal decision procedures, frame "
               "correspondence sweeps, control-statement analysis, and toy set-theoretic "
               "multiverses."};
  app.require_subcommand(1);
  app.fallthrough();

  bool quiet = false;
  bool json_mode = true;
  size_t cap = 12;
  app.add_flag("--quiet", quiet, "Suppress diagnostics on stderr");
  app.add_flag("--json", json_mode, "Emit machine-readable JSON on stdout (default)");
  app.add_option("--cap", cap, "Bound on searched model sizes (default 12)");

  // decide -------------------------------------------------------------
  auto* c_decide = app.add_subcommand("decide", "Decide a formula over a theory's frame class");
  std::string d_theory, d_formula;
  c_decide->add_option("--theory", d_theory, "Theory: k|s4|s4.2|s5")->required();
  c_decide->add_option("formula", d_formula, "Formula in the text grammar")->required();

  // model-check ----------------------------------------------------------
  auto* c_mc = app.add_subcommand("model-check", "Evaluate a formula at a world of a model");
  std::string mc_model, mc_world, mc_formula;
  bool mc_all = false;
  c_mc->add_option("model", mc_model, "Model JSON file")->required();
  c_mc->add_option("world", mc_world, "World id (omit with --all)");
  c_mc->add_option("formula", mc_formula, "Formula in the text grammar");
  c_mc->add_flag("--all", mc_all, "Check every world instead of one");

  // frame-check ----------------------------------------------------------
  auto* c_fc = app.add_subcommand(
      "frame-check", "Report frame properties and optional frame-validity of a formula");
  std::string fc_model, fc_formula;
  std::vector<std::string> fc_props;
  size_t fc_atom_cap = 4;
  c_fc->add_option("model", fc_model, "Model JSON file (valuation ignored)")->required();
  c_fc->add_option("formula", fc_formula, "Formula checked under every valuation");
  list_option(c_fc, "--properties", fc_props,
              "Properties gating the exit code (comma separated)", true);
  c_fc->add_option("--atom-cap", fc_atom_cap, "Max distinct atoms in the sweep (default 4)");

  // frames-sweep ---------------------------------------------------------
  auto* c_fs = app.add_subcommand(
      "frames-sweep", "Compare frame-validity with a frame property over all small frames");
  std::string fs_formula, fs_property;
  std::vector<std::string> fs_over;
  size_t fs_max_worlds = 4;
  size_t fs_atom_cap = 4;
  c_fs->add_option("formula", fs_formula, "Formula in the text grammar")->required();
  c_fs->add_option("--property", fs_property, "Property the formula should correspond to")
      ->required();
  list_option(c_fs, "--over", fs_over,
              "Base frame class: property names, comma separated (default: all frames)", true);
  c_fs->add_option("--max-worlds", fs_max_worlds, "Largest frame size swept (default 4)");
  c_fs->add_option("--atom-cap", fs_atom_cap, "Max distinct atoms in the sweep (default 4)");

  // controls ---------------------------------------------------------------
  auto* c_controls =
      app.add_subcommand("controls", "Classify and exercise control statements on a model");
  c_controls->require_subcommand(1);

  auto* c_classify =
      c_controls->add_subcommand("classify", "Classify a statement as switch, button, or neither");
  std::string cl_model, cl_world, cl_stmt;
  c_classify->add_option("model", cl_model, "Model JSON file")->required();
  c_classify->add_option("world", cl_world, "Reference world")->required();
  c_classify->add_option("statement", cl_stmt, "Statement in the text grammar")->required();

  auto* c_dial = c_controls->add_subcommand("dial", "Check a statement family for dial behaviour");
  std::string dl_model;
  std::vector<std::string> dl_values, dl_scope;
  c_dial->add_option("model", dl_model, "Model JSON file")->required();
  c_dial->add_option("values", dl_values, "Dial value statements")->required();
  list_option(c_dial, "--scope", dl_scope,
              "Scope world id (repeatable; default: every world)", false);

  auto* c_ind = c_controls->add_subcommand(
      "independent", "Check independence of switches, or of buttons from a dial");
  std::string in_model, in_world;
  std::vector<std::string> in_switches, in_buttons, in_dial, in_scope;
  c_ind->add_option("model", in_model, "Model JSON file")->required();
  c_ind->add_option("world", in_world, "Reference world (switch mode only)");
  list_option(c_ind, "--switches", in_switches, "Switch statements, comma separated", true);
  list_option(c_ind, "--buttons", in_buttons, "Button statements, comma separated", true);
  list_option(c_ind, "--dial", in_dial, "Dial value statements, comma separated", true);
  list_option(c_ind, "--scope", in_scope,
              "Dial scope world id (repeatable; default: every world)", false);

  auto* c_s5w = c_controls->add_subcommand(
      "s5-witness", "Realize a failing substitution instance through independent switches");
  std::string s5_model, s5_world, s5_formula;
  std::vector<std::string> s5_switches;
  c_s5w->add_option("model", s5_model, "Model JSON file")->required();
  c_s5w->add_option("world", s5_world, "Reference world")->required();
  c_s5w->add_option("formula", s5_formula, "Formula to falsify")->required();
  list_option(c_s5w, "--switches", s5_switches, "Switch statements, comma separated", true)
      ->required();

  auto* c_s42w = c_controls->add_subcommand(
      "s42-witness", "Realize a failing substitution instance through buttons and a dial");
  std::string s42_model, s42_world, s42_formula;
  std::vector<std::string> s42_buttons, s42_dial, s42_scope;
  c_s42w->add_option("model", s42_model, "Model JSON file")->required();
  c_s42w->add_option("world", s42_world, "Reference world")->required();
  c_s42w->add_option("formula", s42_formula, "Formula to falsify")->required();
  list_option(c_s42w, "--buttons", s42_buttons, "Button statements, comma separated", true)
      ->required();
  list_option(c_s42w, "--dial", s42_dial, "Dial value statements, comma separated", true)
      ->required();
  list_option(c_s42w, "--scope", s42_scope,
              "Dial scope world id (repeatable; default: every world)", false);

  auto* c_mp = c_controls->add_subcommand(
      "mp", "Probe a world for pool formulas violating the maximality implication");
  std::string mp_model, mp_world;
  std::vector<std::string> mp_pool;
  size_t mp_depth = 2;
  c_mp->add_option("model", mp_model, "Model JSON file")->required();
  c_mp->add_option("world", mp_world, "World to probe")->required();
  list_option(c_mp, "--pool", mp_pool, "Seed formulas, comma separated", true)->required();
  c_mp->add_option("--depth", mp_depth, "Pool closure depth (default 2)");

  // multiverse -------------------------------------------------------------
  auto* c_mv = app.add_subcommand("multiverse", "Build and probe toy set-theoretic multiverses");
  c_mv->require_subcommand(1);

  auto* c_build = c_mv->add_subcommand("build", "Build a truncated-multiples world system");
  size_t bd_max_height = 0, bd_K = 0;
  std::vector<size_t> bd_multipliers;
  std::string bd_out;
  c_build->add_option("--max-height", bd_max_height, "Largest world height")->required();
  c_build->add_option("--multipliers", bd_multipliers, "Multiplier list, comma separated")
      ->required()
      ->allow_extra_args(false)
      ->delimiter(',');
  c_build->add_option("--K", bd_K, "Multiples kept per multiplier")->required();
  c_build->add_option("--out", bd_out, "Write the system here (summary on stdout)");

  auto* c_cor = c_mv->add_subcommand(
      "corollary", "Compare top-world truth with translated truth everywhere");
  std::string co_sys, co_corpus;
  c_cor->add_option("system", co_sys, "System JSON file")->required();
  c_cor->add_option("corpus", co_corpus, "Sentence file, one per line ('#' comments)")
      ->required();

  auto* c_acc = c_mv->add_subcommand(
      "account", "Check that every set in the union shows up above every world");
  std::string ac_sys;
  c_acc->add_option("system", ac_sys, "System JSON file")->required();

  auto* c_induce = c_mv->add_subcommand("induce", "Induce a Kripke model from observables");
  std::string iv_sys, iv_atoms, iv_out;
  c_induce->add_option("system", iv_sys, "System JSON file")->required();
  c_induce->add_option("--atoms", iv_atoms, "JSON object mapping atom names to observables")
      ->required();
  c_induce->add_option("--out", iv_out, "Write the model here (summary on stdout)");

  // fingerprint ------------------------------------------------------------
  auto* c_fp = app.add_subcommand(
      "fingerprint", "Validate every axiom-scheme instance over a formula pool on a model");
  std::string fp_model;
  std::vector<std::string> fp_pool;
  size_t fp_depth = 2;
  FingerprintOptions fp_opts;
  c_fp->add_option("model", fp_model, "Model JSON file")->required();
  list_option(c_fp, "--pool", fp_pool, "Seed formulas, comma separated", true)->required();
  c_fp->add_option("--depth", fp_depth, "Pool closure depth (default 2)");
  c_fp->add_option("--max-pool", fp_opts.max_pool, "Pool size cap");
  c_fp->add_option("--max-instances", fp_opts.max_instances, "Instance count cap per scheme");
  c_fp->add_option("--max-failures", fp_opts.max_failures_per_scheme,
                   "Failures reported per scheme");

  int rc = 0;
  c_decide->callback([&] { rc = run_decide(d_theory, d_formula, cap); });
  c_mc->callback([&] { rc = run_model_check(mc_model, mc_world, mc_all, mc_formula); });
  c_fc->callback([&] { rc = run_frame_check(fc_model, fc_formula, fc_props, fc_atom_cap); });
  c_fs->callback(
      [&] { rc = run_frames_sweep(fs_formula, fs_over, fs_property, fs_max_worlds, fs_atom_cap, cap); });
  c_classify->callback([&] { rc = run_classify(cl_model, cl_world, cl_stmt); });
  c_dial->callback([&] { rc = run_dial(dl_model, dl_values, dl_scope); });
  c_ind->callback(
      [&] { rc = run_independent(in_model, in_world, in_switches, in_buttons, in_dial, in_scope); });
  c_s5w->callback([&] { rc = run_s5_witness(s5_model, s5_world, s5_switches, s5_formula); });
  c_s42w->callback(
      [&] { rc = run_s42_witness(s42_model, s42_world, s42_buttons, s42_dial, s42_scope, s42_formula); });
  c_mp->callback([&] { rc = run_mp(mp_model, mp_world, mp_pool, mp_depth); });
  c_build->callback([&] { rc = run_mv_build(bd_max_height, bd_multipliers, bd_K, bd_out); });
  c_cor->callback([&] { rc = run_mv_corollary(co_sys, co_corpus); });
  c_acc->callback([&] { rc = run_mv_account(ac_sys); });
  c_induce->callback([&] { rc = run_mv_induce(iv_sys, iv_atoms, iv_out); });
  c_fp->callback([&] { rc = run_fingerprint(fp_model, fp_pool, fp_depth, fp_opts); });

  try {
    app.parse(argc, argv);
    return rc;
  } catch (const CLI::CallForHelp&) {
    const CLI::App* deepest = &app;
    while (!deepest->get_subcommands().empty()) deepest = deepest->get_subcommands().front();
    std::cout << deepest->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (!quiet && e.get_exit_code() != 0) std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapError& e) {
    if (!quiet) std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    if (!quiet) std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
