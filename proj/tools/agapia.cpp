// agapia: parse, typecheck, run, render, verify and protocol subcommands.
// Exit codes: 0 ok, 1 usage, 2 parse/type error, 3 runtime error, 4 verification failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "agapia/error.hpp"
#include "agapia/interp.hpp"
#include "agapia/proofcheck.hpp"
#include "agapia/protocol.hpp"
#include "agapia/syntax.hpp"
#include "agapia/typecheck.hpp"

using namespace agapia;
using nlohmann::json;

namespace {

// Output channel for --json: absent, stdout ("" or "-"), or a file.
struct JsonOut {
  std::vector<CLI::Option*> opts;  // one per subcommand
  std::string path;
  bool on() const {
    for (auto* o : opts)
      if (o->count() > 0) return true;
    return false;
  }
  bool to_stdout() const { return on() && (path.empty() || path == "-"); }
  void emit(const json& j) const {
    if (to_stdout()) {
      std::cout << j.dump(2) << "\n";
      return;
    }
    std::ofstream f(path);
    if (!f) fail(ErrorKind::Usage, "cannot write " + path);
    f << j.dump(2) << "\n";
  }
};

void add_json(CLI::App* app, JsonOut& o) {
  o.opts.push_back(app->add_option("--json", o.path, "machine-readable output, to stdout or the given file")->expected(0, 1));
}

// Unreadable sources count as parse errors.
std::string read_source(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, path + ": cannot read file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProgP load_program(const std::string& path, const std::string& entry) {
  return resolve(parse_source(read_source(path), path), entry);
}

json type_json(const ProgramType& t) {
  return {{"w", to_json(t.w)},
          {"n", to_json(t.n)},
          {"e", to_json(t.e)},
          {"s", to_json(t.s)},
          {"text", to_text(t)},
          {"named", to_text(t, true)}};
}

json items_json(const std::vector<Value>& items) {
  json a = json::array();
  for (auto& v : items) a.push_back(to_json(v));
  return a;
}

void render(const Scenario& s, const std::string& how) {
  if (how == "svg")
    std::cout << render_svg(s);
  else
    std::cout << render_ascii(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AGAPIA v0.1 toolchain"};
  app.require_subcommand(1);
  std::string file, entry;
  JsonOut jout;

  // parse
  bool parse_pretty = false;
  auto* parse = app.add_subcommand("parse", "parse a source file and print its AST as JSON");
  parse->add_option("file", file, "source file")->required();
  parse->add_option("--entry", entry, "definition to resolve (default: the first)");
  parse->add_flag("--pretty", parse_pretty, "print the resolved program as source text instead");
  add_json(parse, jout);

  // typecheck
  bool names = false;
  auto* tc = app.add_subcommand("typecheck", "infer the four-border type of a program");
  tc->add_option("file", file, "source file")->required();
  tc->add_option("--entry", entry, "definition to check");
  tc->add_flag("--names", names, "print field names");
  add_json(tc, jout);

  // run / render
  uint64_t seed = 0;
  int64_t max_iters = 10000;
  std::string west, north, render_as;
  bool show_trace = false;
  auto* runc = app.add_subcommand("run", "execute a program and print its output borders");
  runc->add_option("file", file, "source file")->required();
  runc->add_option("--entry", entry, "definition to run");
  runc->add_option("--seed", seed, "PRNG seed")->default_val(0);
  runc->add_option("--max-iters", max_iters, "bound per loop kind")->default_val(10000)->check(CLI::NonNegativeNumber);
  runc->add_option("--west", west, "west border items, ';' separated");
  runc->add_option("--north", north, "north border items, ';' separated");
  runc->add_option("--render", render_as, "draw the scenario")->check(CLI::IsMember({"ascii", "svg"}));
  runc->add_flag("--trace", show_trace, "list loop boundaries");
  add_json(runc, jout);

  std::string render_fmt = "ascii";
  auto* rend = app.add_subcommand("render", "draw a scenario saved by run --json");
  rend->add_option("file", file, "JSON file")->required();
  rend->add_option("--format", render_fmt, "ascii or svg")->check(CLI::IsMember({"ascii", "svg"}));

  // verify
  std::vector<std::string> domain;
  bool harness = false, timings = false;
  auto* ver = app.add_subcommand("verify", "check a proof script");
  ver->add_option("script", file, "proof script (.sthl)")->required();
  ver->add_option("--domain", domain, "domain override k=v (n, int, set, star, cap); repeatable");
  ver->add_flag("--harness", harness, "also run every accepted triple on its whole domain");
  ver->add_flag("--timings", timings, "add per-node seconds to the table");
  add_json(ver, jout);

  // protocol ring
  int64_t n = 3, max_rounds = 1000;
  bool monitor = false, oracle = false;
  auto* proto = app.add_subcommand("protocol", "the ring termination-detection protocol");
  proto->require_subcommand(1);
  auto* ring = proto->add_subcommand("ring", "run P on a ring of n processes");
  ring->add_option("--n", n, "number of processes")->default_val(3)->check(CLI::Range(int64_t{1}, int64_t{64}));
  ring->add_option("--seed", seed, "PRNG seed")->default_val(0);
  ring->add_option("--max-rounds", max_rounds, "bound on while_st rounds")->default_val(1000);
  ring->add_flag("--monitor", monitor, "check the invariants at every loop boundary");
  ring->add_flag("--oracle-check", oracle, "compare with an independent simulation");
  ring->add_option("--render", render_as, "draw the scenario")->check(CLI::IsMember({"ascii", "svg"}));
  add_json(ring, jout);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*parse) {
      ProgP p = load_program(file, entry);
      if (parse_pretty && !jout.on()) {
        std::cout << pretty(p) << "\n";
        return 0;
      }
      json j{{"schema", "agapia.parse/1"}, {"file", file}, {"ast", to_json(p)}};
      if (jout.on() && !jout.to_stdout())
        jout.emit(j);
      else
        std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*tc) {
      ProgP p = expand_for_s(load_program(file, entry));
      ProgramType t = infer_type(p);
      if (jout.on())
        jout.emit({{"schema", "agapia.type/1"}, {"file", file}, {"type", type_json(t)}});
      if (!jout.to_stdout()) std::cout << to_text(t, names) << "\n";
      return 0;
    }

    if (*runc) {
      ProgP p = load_program(file, entry);
      ProgramType t = infer_type(expand_for_s(p));
      RunConfig cfg;
      cfg.seed = seed;
      cfg.max_while_t = cfg.max_while_s = cfg.max_while_st = cfg.max_inner = max_iters;
      cfg.trace = show_trace;
      RunResult r = run(p, parse_items(west), parse_items(north), cfg);
      if (jout.on()) {
        json j{{"schema", "agapia.run/1"},   {"file", file},
               {"seed", seed},               {"type", type_json(t)},
               {"east", items_json(r.east)}, {"south", items_json(r.south)},
               {"scenario", to_json(r.scenario)}};
        if (show_trace) {
          j["trace"] = json::array();
          for (auto& tr : r.trace)
            j["trace"].push_back({{"kind", tr.kind}, {"path", tr.path}, {"iteration", tr.iteration},
                                  {"west", items_json(tr.west)}, {"north", items_json(tr.north)}});
        }
        jout.emit(j);
      }
      if (jout.to_stdout()) return 0;
      if (render_as == "svg") {
        render(r.scenario, "svg");
        return 0;
      }
      std::cout << "east:  " << items_text(r.east) << "\nsouth: " << items_text(r.south) << "\n";
      std::cout << "scenario: " << r.scenario.rows() << " x " << r.scenario.cols() << ", " << r.modules_run
                << " module runs\n";
      if (show_trace)
        for (auto& tr : r.trace) {
          std::cout << tr.kind << " [";
          for (size_t i = 0; i < tr.path.size(); ++i) std::cout << (i ? "," : "") << tr.path[i];
          std::cout << "] #" << tr.iteration << " west=" << items_text(tr.west) << " north=" << items_text(tr.north)
                    << "\n";
        }
      if (render_as == "ascii") render(r.scenario, "ascii");
      return 0;
    }

    if (*rend) {
      json j;
      try {
        j = json::parse(read_source(file));
      } catch (const json::exception& e) {
        fail(ErrorKind::Parse, file + ": " + e.what());
      }
      const json& sj = j.contains("scenario") ? j["scenario"] : j;
      render(scenario_from_json(sj), render_fmt);
      return 0;
    }

    if (*ver) {
      ProofScript s;
      try {
        s = load_script(file);
      } catch (const Error& e) {
        // a script that cannot be read is reported like an unparsable one
        if (e.kind == ErrorKind::Usage && std::string(e.what()).rfind("cannot read", 0) == 0)
          fail(ErrorKind::Parse, e.what());
        throw;
      }
      Domain d = default_domain();
      for (auto& kv : domain) apply_domain_override(d, kv);
      Report r = check_proof(s, d);
      bool ok = r.ok();
      json hj = json::array();
      int64_t violations = 0;
      if (harness && ok)
        for (auto& h : soundness_harness(r)) {
          violations += h.violations;
          hj.push_back({{"path", h.path}, {"param", h.param}, {"initial", h.initial}, {"scenarios", h.scenarios},
                        {"skipped", h.skipped}, {"violations", h.violations}, {"first", h.first}});
        }
      if (jout.on()) {
        json j = r.to_json();
        if (harness) j["harness"] = hj;
        jout.emit(j);
      }
      if (!jout.to_stdout()) {
        std::cout << r.table(timings);
        if (harness && ok) std::cout << "harness: " << hj.size() << " triples, " << violations << " violations\n";
      }
      return ok && violations == 0 ? 0 : 4;
    }

    if (*ring) {
      MonitorConfig mc;
      mc.max_rounds = max_rounds;
      mc.check_invariants = monitor;
      MonitorReport m = monitor_run(n, seed, mc);
      json j{{"schema", "agapia.protocol/1"}, {"run", m.to_json()}};
      bool agree = true;
      if (oracle) {
        OracleResult o = oracle_simulate(n, seed, max_rounds);
        agree = o.terminated == m.terminated && (!m.terminated || (o.state == m.final && o.rounds == m.rounds));
        j["oracle"] = {{"terminated", o.terminated}, {"rounds", o.rounds}, {"agrees", agree}};
        if (o.terminated) j["oracle"]["final"] = o.state.to_json();
      }
      if (jout.on()) jout.emit(j);
      if (!jout.to_stdout() && render_as != "svg") {
        if (!m.terminated) {
          std::cout << "n=" << n << " seed=" << seed << ": " << m.note << "\n";
        } else {
          std::cout << "n=" << n << " seed=" << seed << ": terminated after " << m.rounds << " rounds\n";
          std::cout << "final: " << m.final.text() << "\n";
          std::cout << "safe: " << (m.safe ? "yes" : "no") << "\n";
          if (monitor)
            std::cout << "monitor: " << m.inv_checks << " Inv/WF checks, " << m.inv2_checks << " Inv2 checks, "
                      << m.sent_checks << " sent-message checks, " << m.violations.size() << " violations\n";
          for (auto& v : m.violations) std::cout << "  " << v.boundary << ": " << v.formula << "\n";
          if (oracle) std::cout << "oracle: " << (agree ? "agrees" : "DISAGREES") << "\n";
        }
      }
      if (!jout.to_stdout() && !render_as.empty() && m.terminated) {
        {
          RunConfig cfg;
          cfg.seed = seed;
          cfg.max_while_st = max_rounds;
          render(run(build_protocol(), {}, protocol_input(n), cfg).scenario, render_as);
        }
      }
      if (!m.terminated) return 3;
      return m.safe && m.violations.empty() && agree ? 0 : 4;
    }
  } catch (const Error& e) {
    std::cerr << kind_name(e.kind) << ": " << e.what() << "\n";
    if (jout.to_stdout())
      std::cout << json{{"schema", "agapia.error/1"}, {"kind", kind_name(e.kind)}, {"message", e.what()}}.dump(2)
                << "\n";
    return exit_code_for(e.kind);
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
