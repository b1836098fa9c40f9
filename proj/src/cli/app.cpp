#include "spectra/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "spectra/errors.hpp"
#include "spectra/fragment.hpp"
#include "spectra/interp.hpp"
#include "spectra/kb.hpp"
#include "spectra/normalize.hpp"
#include "spectra/realize.hpp"
#include "spectra/solver.hpp"
#include "spectra/spectrum.hpp"

namespace spectra::cli {
namespace {

using ordered = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError(fmt::format("cannot read {}", path));
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

KB load_kb(const std::string& path) {
  KB kb = parse_kb(read_file(path));
  check_namespaces(kb);
  return kb;
}

nlohmann::json load_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(fmt::format("{}: {}", path, e.what()));
  }
}

ExtNat parse_value(const std::string& s) {
  if (s == "inf") return ExtNat::infinity();
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw CLI::ValidationError(fmt::format("expected a natural number or inf, got '{}'", s));
  return ExtNat(v);
}

ordered spectrum_json(const SpectrumRep& rep) {
  if (rep.is_empty()) return ordered{{"status", "empty"}};
  ordered j;
  j["status"] = "ok";
  j["sporadic"] = rep.sporadic();
  if (rep.tail())
    j["tail"] = ordered{{"start", rep.tail()->start}, {"period", rep.tail()->period}};
  else
    j["tail"] = nullptr;
  j["infinity"] = rep.has_infinity();
  return j;
}

ordered query_json(const CardinalityQuery& q) {
  return ordered{{"kind", q.is_role() ? "role" : "concept"}, {"name", q.name}};
}

// Options shared by the subcommands; each subcommand binds the ones it uses.
struct Settings {
  std::string kb_path;
  std::string model_path;
  std::string graph_path;
  std::string output_path;
  std::string concept_name;
  std::string role_name;
  std::string ccq;
  std::string value;
  std::string fragment;
  std::string target = "ALC";
  std::string logic = "EL_bot";
  std::string write_dir;
  std::vector<std::string> semigroup;
  std::vector<std::uint64_t> role_semigroup;
  std::optional<std::uint64_t> interval;
  bool with_zero = false;
  bool exclude_zero = false;
  bool role_interval = false;
  bool pretty = false;
  bool explain = false;
  int max_domain = 4;
  std::uint64_t max_steps = 1'000'000;
  std::size_t limit = 100;
  int jobs = 1;

  SolverOptions solver_options() const {
    SolverOptions o;
    o.max_steps = max_steps;
    o.jobs = std::max(1, jobs);
    if (!fragment.empty()) {
      const auto f = fragment_from_string(fragment);
      if (!f) throw CLI::ValidationError(fmt::format("unknown fragment '{}'", fragment));
      o.assume_fragment = *f;
    }
    return o;
  }

  SearchLimits search_limits() const {
    SearchLimits l;
    l.max_domain = max_domain;
    return l;
  }

  CardinalityQuery query() const {
    if (concept_name.empty() == role_name.empty())
      throw CLI::ValidationError("exactly one of --query and --role is required");
    return concept_name.empty() ? CardinalityQuery::role_query(role_name)
                                : CardinalityQuery::concept_query(concept_name);
  }
};

class Emitter {
 public:
  Emitter(std::ostream& out, const Settings& s) : out_(out), settings_(s) {}

  void json(const ordered& j) const { out_ << (settings_.pretty ? j.dump(2) : j.dump()) << '\n'; }

  void text(const std::string& t) const {
    if (settings_.output_path.empty()) {
      out_ << t;
      return;
    }
    std::ofstream file(settings_.output_path, std::ios::binary);
    if (!file) throw DomainError(fmt::format("cannot write {}", settings_.output_path));
    file << t;
    json(ordered{{"written", settings_.output_path}});
  }

 private:
  std::ostream& out_;
  const Settings& settings_;
};

void add_query_options(CLI::App* cmd, Settings& s) {
  auto* concept_opt = cmd->add_option("--query", s.concept_name, "Concept name C for the query q_C");
  auto* role_opt = cmd->add_option("--role", s.role_name, "Role name r for the query q_r");
  concept_opt->excludes(role_opt);
}

void add_solver_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--max-steps", s.max_steps, "Work budget for chase and entailment probes")
      ->capture_default_str();
  cmd->add_option("--assume-fragment", s.fragment, "Treat the input as this fragment (must admit it)");
  cmd->add_option("--jobs", s.jobs, "Worker threads for membership sweeps")->capture_default_str();
}

void solve(const Settings& s, const Emitter& emit, std::ostream& out) {
  const auto q = s.query();
  const auto result = compute_spectrum(load_kb(s.kb_path), q, s.solver_options());
  if (s.pretty) {
    out << fmt::format("{}: {}\n", q.to_string(), result.rep.to_string());
    if (!result.rep.is_empty()) {
      const auto t = result.rep.to_triple();
      std::vector<std::string> set;
      for (const auto& v : t.s) set.push_back(v.to_string());
      out << fmt::format("(S, M, alpha) = ({{{}}}, {}, {})\n", fmt::join(set, ", "), t.m.to_string(),
                         t.alpha.to_string());
    }
    if (result.trace.contains("fragment")) out << "fragment: " << result.trace["fragment"].get<std::string>() << '\n';
    if (result.trace.contains("shape")) out << "shape: " << result.trace["shape"].get<std::string>() << '\n';
    if (s.explain) out << result.trace.dump(2) << '\n';
    return;
  }
  auto j = spectrum_json(result.rep);
  if (s.explain) j["trace"] = ordered::parse(result.trace.dump());
  emit.json(j);
}

void member(const Settings& s, const Emitter& emit) {
  const auto q = s.query();
  const auto kb = load_kb(s.kb_path);
  const auto n = parse_value(s.value);
  const auto options = s.solver_options();
  if (n.is_infinite()) {
    emit.json(ordered{{"member", infinity_in_spectrum(kb, q, options)}});
    return;
  }
  const auto witness = membership_witness(kb, q, n.value(), options);
  ordered j{{"member", witness.has_value()}};
  if (s.explain && witness) j["witness"] = ordered::parse(witness->to_json().dump());
  emit.json(j);
}

void minimum(const Settings& s, const Emitter& emit) {
  const auto q = s.query();
  const auto kb = load_kb(s.kb_path);
  const auto options = s.solver_options();
  if (!is_satisfiable(kb, options)) {
    emit.json(ordered{{"status", "empty"}});
    return;
  }
  emit.json(ordered{{"status", "ok"}, {"min", ordered::parse(min_value(kb, q, options).to_json().dump())}});
}

void realize(const Settings& s, const Emitter& emit) {
  const int chosen = static_cast<int>(!s.semigroup.empty()) + static_cast<int>(s.interval.has_value()) +
                     static_cast<int>(!s.role_semigroup.empty());
  if (chosen != 1)
    throw CLI::ValidationError("exactly one of --semigroup, --interval and --role-semigroup is required");
  KB kb;
  if (!s.semigroup.empty()) {
    std::vector<ExtNat> generators;
    for (const auto& g : s.semigroup) generators.push_back(parse_value(g));
    kb = realize_semigroup_alcif(generators, s.exclude_zero);
  } else if (s.interval) {
    const auto logic = fragment_from_string(s.logic);
    if (!logic) throw CLI::ValidationError(fmt::format("unknown fragment '{}'", s.logic));
    kb = s.role_interval ? realize_role_interval(*s.interval, s.with_zero, *logic)
                         : realize_interval(*s.interval, s.with_zero, *logic);
  } else {
    kb = realize_role_semigroup_alcf(s.role_semigroup, s.with_zero);
  }
  emit.text(serialize_kb(kb));
}

void reduce(const Settings& s, const Emitter& emit) {
  ReductionTarget target;
  try {
    target = reduction_target_from_string(s.target);
  } catch (const DomainError& e) {
    throw CLI::ValidationError(e.what());
  }
  emit.text(serialize_kb(reduce_independent_set(Graph::from_json(load_json(s.graph_path)), target)));
}

void check(const Settings& s, const Emitter& emit) {
  const auto model = Interpretation::from_json(load_json(s.model_path));
  const auto violations = check_model(model, load_kb(s.kb_path));
  ordered list = ordered::array();
  for (const auto& v : violations) list.push_back(ordered{{"axiom", v.axiom}, {"elements", v.elements}});
  emit.json(ordered{{"model", violations.empty()}, {"violations", list}});
}

void count(const Settings& s, const Emitter& emit) {
  const auto model = Interpretation::from_json(load_json(s.model_path));
  if (!s.ccq.empty()) {
    if (!s.concept_name.empty() || !s.role_name.empty())
      throw CLI::ValidationError("--ccq excludes --query and --role");
    emit.json(ordered{{"count", count_answers(model, parse_ccq(s.ccq))}});
    return;
  }
  emit.json(ordered{{"count", count_answers(model, s.query())}});
}

void enumerate(const Settings& s, const Emitter& emit) {
  const auto kb = load_kb(s.kb_path);
  const auto limits = s.search_limits();
  if (!s.value.empty()) {
    const auto n = parse_value(s.value);
    if (n.is_infinite()) throw CLI::ValidationError("the enumerator only checks finite values");
    const auto result = oracle_membership(kb, s.query(), n.value(), limits);
    ordered j{{"found", result.found}};
    if (result.witness) j["witness"] = ordered::parse(result.witness->to_json().dump());
    emit.json(j);
    return;
  }
  ordered models = ordered::array();
  bool truncated = false;
  enumerate_models(kb, limits, [&](const Interpretation& i) {
    if (models.size() == s.limit) {
      truncated = true;
      return false;
    }
    models.push_back(ordered::parse(i.to_json().dump()));
    return true;
  });
  emit.json(ordered{{"count", models.size()}, {"truncated", truncated}, {"models", models}});
}

void normal_form(const Settings& s, const Emitter& emit) {
  KB kb = load_kb(s.kb_path);
  reject_reserved_names(kb);
  const auto nf = normalize(kb.tbox, kb.concept_names(), kb.role_names());
  kb.tbox = nf.to_tbox();
  emit.text(serialize_kb(kb));
}

void list_fixtures(const Settings& s, const Emitter& emit) {
  const auto all = fixtures();
  if (!s.write_dir.empty()) {
    std::filesystem::create_directories(s.write_dir);
    ordered written = ordered::array();
    for (const auto& f : all) {
      const auto path = std::filesystem::path(s.write_dir) / (f.name + ".dl");
      std::ofstream file(path, std::ios::binary);
      if (!file) throw DomainError(fmt::format("cannot write {}", path.string()));
      file << "# " << f.description << '\n' << serialize_kb(f.kb);
      written.push_back(path.string());
    }
    emit.json(ordered{{"written", written}});
    return;
  }
  ordered list = ordered::array();
  for (const auto& f : all)
    list.push_back(ordered{{"name", f.name},
                           {"description", f.description},
                           {"query", query_json(f.query)},
                           {"expected", spectrum_json(f.expected)}});
  emit.json(list);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Cardinality spectra of description logic knowledge bases", "dlspec"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--pretty", s.pretty, "Indented JSON; a human summary for solve");

  auto* solve_cmd = app.add_subcommand("solve", "Compute the spectrum of a cardinality query");
  solve_cmd->add_option("kb", s.kb_path, "Knowledge base (.dl)")->required()->check(CLI::ExistingFile);
  add_query_options(solve_cmd, s);
  add_solver_options(solve_cmd, s);
  solve_cmd->add_flag("--explain", s.explain, "Include the decision trace");

  auto* member_cmd = app.add_subcommand("member", "Decide whether a value belongs to the spectrum");
  member_cmd->add_option("kb", s.kb_path, "Knowledge base (.dl)")->required()->check(CLI::ExistingFile);
  add_query_options(member_cmd, s);
  add_solver_options(member_cmd, s);
  member_cmd->add_option("--n", s.value, "Natural number or inf")->required();
  member_cmd->add_flag("--explain", s.explain, "Include a witness model");

  auto* min_cmd = app.add_subcommand("min", "Least element of the spectrum");
  min_cmd->add_option("kb", s.kb_path, "Knowledge base (.dl)")->required()->check(CLI::ExistingFile);
  add_query_options(min_cmd, s);
  add_solver_options(min_cmd, s);

  auto* realize_cmd = app.add_subcommand("realize", "Emit a knowledge base with a prescribed spectrum");
  realize_cmd->add_option("--semigroup", s.semigroup, "ALCIF generators, e.g. 2,3 (0 and inf act as flags)")
      ->delimiter(',');
  realize_cmd->add_flag("--exclude-zero", s.exclude_zero, "Drop 0 from a --semigroup spectrum");
  realize_cmd->add_option("--interval", s.interval, "Least nonzero member m of {0} ∪ ⟦m,∞⟧ or ⟦m,∞⟧");
  realize_cmd->add_option("--logic", s.logic, "EL_bot or DL-Lite_core for --interval")->capture_default_str();
  realize_cmd->add_flag("--role-interval", s.role_interval, "Realize --interval for the role r");
  realize_cmd->add_option("--role-semigroup", s.role_semigroup, "ALCF role generators, e.g. 2,3")
      ->delimiter(',');
  realize_cmd->add_flag("--with-zero", s.with_zero, "Include 0 for --interval and --role-semigroup");
  realize_cmd->add_option("-o,--output", s.output_path, "Write the .dl file here");

  auto* reduce_cmd = app.add_subcommand("reduce", "Encode maximum independent set as a minimum");
  reduce_cmd->add_option("graph", s.graph_path, "Graph JSON")->required()->check(CLI::ExistingFile);
  reduce_cmd->add_option("--target", s.target, "ALC, ELIF or EL-role")->capture_default_str();
  reduce_cmd->add_option("-o,--output", s.output_path, "Write the .dl file here");

  auto* check_cmd = app.add_subcommand("check-model", "Check an interpretation against a knowledge base");
  check_cmd->add_option("model", s.model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("kb", s.kb_path, "Knowledge base (.dl)")->required()->check(CLI::ExistingFile);

  auto* count_cmd = app.add_subcommand("count", "Count query answers in an interpretation");
  count_cmd->add_option("model", s.model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  add_query_options(count_cmd, s);
  count_cmd->add_option("--ccq", s.ccq, "Counting conjunctive query, e.g. 'r(!x,?y) & C(?y)'");

  auto* enum_cmd = app.add_subcommand("enumerate", "Brute-force models up to a domain bound");
  enum_cmd->add_option("kb", s.kb_path, "Knowledge base (.dl)")->required()->check(CLI::ExistingFile);
  enum_cmd->add_option("--max-domain", s.max_domain, "Largest domain size")->capture_default_str();
  enum_cmd->add_option("--limit", s.limit, "Largest number of models printed")->capture_default_str();
  add_query_options(enum_cmd, s);
  enum_cmd->add_option("--n", s.value, "Search only for a model with n answers");

  auto* normalize_cmd = app.add_subcommand("normalize", "Print the TBox in normal form");
  normalize_cmd->add_option("kb", s.kb_path, "Knowledge base (.dl)")->required()->check(CLI::ExistingFile);
  normalize_cmd->add_option("-o,--output", s.output_path, "Write the .dl file here");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "List the built-in examples");
  fixtures_cmd->add_option("--write", s.write_dir, "Write each example as <dir>/<name>.dl");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  const Emitter emit(out, s);
  try {
    app.parse(reversed);
    if (solve_cmd->parsed()) solve(s, emit, out);
    if (member_cmd->parsed()) member(s, emit);
    if (min_cmd->parsed()) minimum(s, emit);
    if (realize_cmd->parsed()) realize(s, emit);
    if (reduce_cmd->parsed()) reduce(s, emit);
    if (check_cmd->parsed()) check(s, emit);
    if (count_cmd->parsed()) count(s, emit);
    if (enum_cmd->parsed()) enumerate(s, emit);
    if (normalize_cmd->parsed()) normal_form(s, emit);
    if (fixtures_cmd->parsed()) list_fixtures(s, emit);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const LimitError& e) {
    err << ordered{{"status", "error"}, {"kind", "limit"}, {"error", e.what()}}.dump() << '\n';
    return kExitLimit;
  } catch (const DomainError& e) {
    err << ordered{{"status", "error"}, {"kind", "domain"}, {"error", e.what()}}.dump() << '\n';
    return kExitDomain;
  } catch (const nlohmann::json::exception& e) {
    err << ordered{{"status", "error"}, {"kind", "domain"}, {"error", e.what()}}.dump() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace spectra::cli
