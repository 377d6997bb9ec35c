#include "mstream/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mstream/dsl/elaborate.hpp"
#include "mstream/error.hpp"
#include "mstream/json.hpp"
#include "mstream/laws.hpp"
#include "mstream/trunc.hpp"

namespace mstream::cli {

namespace {

struct Config {
  std::string file;
  std::string name, name2;
  std::size_t steps = 10;
  std::size_t depth = 5;
  std::uint64_t seed = 0;
  std::size_t instances = 100;
  std::string format = "json";
  std::string inputs;
  bool joint = false;
  std::optional<std::size_t> support_cap;
};

// Exit code carried out of a command.
struct Fail {
  int code;
  std::string msg;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Fail{kNoInput, "cannot read '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

dsl::Elaborated load(const Config& c) {
  const std::string src = read_file(c.file);
  try {
    return dsl::compile(src);
  } catch (const dsl::ParseError& e) {
    throw Fail{kParseError, c.file + ":" + e.what()};
  } catch (const dsl::TypeError& e) {
    throw Fail{kTypeError, c.file + ":" + e.what()};
  }
}

const MStream& stream(const dsl::Elaborated& e, const std::string& name) {
  auto it = e.streams.find(name);
  if (it == e.streams.end()) throw Fail{kNoInput, "no stream named '" + name + "'"};
  return it->second;
}

Value decode(const nlohmann::json& j, const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Unit:
      if (!j.is_null()) break;
      return Value::unit();
    case Ty::Kind::Int:
      if (!j.is_number_integer()) break;
      return Value::integer(j.get<std::int64_t>());
    case Ty::Kind::Set: {
      if (!j.is_array()) break;
      std::vector<std::int64_t> elems;
      for (const auto& e : j) {
        if (!e.is_number_integer()) throw Fail{kUsage, "set elements must be integers"};
        elems.push_back(e.get<std::int64_t>());
      }
      return Value::set(std::move(elems));
    }
    case Ty::Kind::Prod: {
      if (!j.is_array() || j.size() != t.items().size()) break;
      std::vector<Value> items;
      for (std::size_t i = 0; i < j.size(); ++i) items.push_back(decode(j[i], t.items()[i]));
      return Value::tuple(std::move(items));
    }
    case Ty::Kind::Delay:
      break;
  }
  throw Fail{kUsage, "input " + j.dump() + " does not fit type " + t.str()};
}

// Input wires for steps 0..steps-1, from --inputs when the stream has any.
History input_history(const Config& c, const MStream& f, std::size_t steps) {
  if (f.inputs().size() == 0) return History(steps);
  if (c.inputs.empty()) throw Fail{kUsage, "this stream has inputs; pass them with --inputs '[[...], ...]'"};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(c.inputs);
  } catch (const nlohmann::json::exception& e) {
    throw Fail{kUsage, std::string("--inputs is not valid JSON: ") + e.what()};
  }
  if (!j.is_array() || j.size() < steps)
    throw Fail{kUsage, "--inputs needs an array with at least " + std::to_string(steps) + " steps"};
  History h;
  for (std::size_t t = 0; t < steps; ++t) {
    const auto tys = f.inputs().at(t);
    if (!j[t].is_array() || j[t].size() != tys.size())
      throw Fail{kUsage, "step " + std::to_string(t) + " of --inputs needs " + std::to_string(tys.size()) + " values"};
    Step s;
    for (std::size_t i = 0; i < tys.size(); ++i) s.push_back(decode(j[t][i], tys[i]));
    h.push_back(std::move(s));
  }
  return h;
}

// CSV: tuples spread over columns, sets as {a b c}, unit empty.
void csv_header(const Ty& t, const std::string& prefix, std::vector<std::string>& cols) {
  const Ty n = t.normalized();
  if (n.kind() == Ty::Kind::Prod) {
    for (std::size_t i = 0; i < n.items().size(); ++i) csv_header(n.items()[i], prefix + "." + std::to_string(i), cols);
  } else {
    cols.push_back(prefix);
  }
}

void csv_cells(const Value& v, std::vector<std::string>& cells) {
  switch (v.kind()) {
    case Value::Kind::Unit:
      cells.emplace_back();
      return;
    case Value::Kind::Int:
      cells.push_back(v.as_int().str());
      return;
    case Value::Kind::Set: {
      std::string s = "{";
      for (std::size_t i = 0; i < v.as_set().size(); ++i) s += (i ? " " : "") + std::to_string(v.as_set()[i]);
      cells.push_back(s + "}");
      return;
    }
    case Value::Kind::Tuple:
      for (const auto& i : v.as_tuple()) csv_cells(i, cells);
      return;
  }
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

const Ty& output_type(const dsl::Elaborated& e, const std::string& name) { return e.typed.find(name)->type; }

int cmd_check(const Config& c, std::ostream& out) {
  auto e = load(c);
  for (const auto& in : e.typed.inputs) out << "input " << in.name << " : " << dsl::surface(in.type) << "\n";
  for (const auto& d : e.typed.defs) out << d.name << " : " << dsl::surface(d.type) << "\n";
  return kOk;
}

int cmd_run(const Config& c, std::ostream& out) {
  auto e = load(c);
  const MStream& f = stream(e, c.name);
  const History h = input_history(c, f, c.steps);
  Rng rng(c.seed);
  auto steps = run_sample(f, f.inputs().size() ? h : History{}, c.steps, rng);
  if (c.format == "csv") {
    std::vector<std::string> cols{"t"};
    csv_header(output_type(e, c.name), "out", cols);
    out << join(cols) << "\n";
    for (std::size_t t = 0; t < steps.size(); ++t) {
      std::vector<std::string> cells{std::to_string(t)};
      csv_cells(steps[t][0], cells);
      out << join(cells) << "\n";
    }
  } else {
    for (std::size_t t = 0; t < steps.size(); ++t) out << "{\"t\":" << t << ",\"out\":" << to_json(steps[t]) << "}\n";
  }
  return kOk;
}

int cmd_dist(const Config& c, std::ostream& out) {
  auto e = load(c);
  const MStream& f = stream(e, c.name);
  const History h = input_history(c, f, c.steps + 1);
  const bool csv = c.format == "csv";
  std::vector<std::string> cols;
  csv_header(output_type(e, c.name), "out", cols);
  if (c.joint) {
    const Dist d = run_exact(f, h);
    if (csv) {
      std::vector<std::string> header;
      for (std::size_t t = 0; t <= c.steps; ++t)
        for (const auto& col : cols) header.push_back(col + "@" + std::to_string(t));
      header.push_back("p");
      out << join(header) << "\n";
      for (const auto& [v, p] : d) {
        std::vector<std::string> cells;
        csv_cells(v, cells);
        cells.push_back(p.str());
        out << join(cells) << "\n";
      }
    } else {
      out << "{\"steps\":" << c.steps << ",\"joint\":" << to_json(d) << "}\n";
    }
    return kOk;
  }
  auto ms = step_marginals(f, h, c.steps + 1);
  if (csv) out << "t," << join(cols) << ",p\n";
  for (std::size_t t = 0; t < ms.size(); ++t) {
    if (!csv) {
      out << "{\"t\":" << t << ",\"dist\":" << to_json(ms[t]) << "}\n";
      continue;
    }
    for (const auto& [v, p] : ms[t]) {
      std::vector<std::string> cells{std::to_string(t)};
      csv_cells(v, cells);
      cells.push_back(p.str());
      out << join(cells) << "\n";
    }
  }
  return kOk;
}

int cmd_equiv(const Config& c, std::ostream& out) {
  auto e = load(c);
  const MStream& f = stream(e, c.name);
  const MStream& g = stream(e, c.name2);
  if (!f.inputs().matches(g.inputs()) || !f.outputs().matches(g.outputs()))
    throw Fail{kTypeError, "'" + c.name + "' and '" + c.name2 + "' have different types"};
  auto r = obs_equiv(f, g, InputSpec::from_schedule(), c.depth);
  out << r.json() << "\n";
  return r.equal ? kOk : kDiffer;
}

int cmd_causal(const Config& c, std::ostream& out) {
  auto e = load(c);
  auto r = check_causality(stream(e, c.name), InputSpec::from_schedule(), c.depth);
  out << r.json() << "\n";
  return r.passed ? kOk : kDiffer;
}

int cmd_laws(const Config& c, std::ostream& out) {
  auto axioms = axiom_suite(c.seed, c.instances, c.depth);
  auto category = category_suite(c.seed, c.instances, c.depth);
  out << "{\"axioms\":" << axioms.json() << ",\"category\":" << category.json() << "}\n";
  return axioms.passed() && category.passed() ? kOk : kLawFailure;
}

std::optional<std::size_t> env_cap() {
  const char* v = std::getenv("MSTREAM_SUPPORT_CAP");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long n = std::stoull(v, &used);
    if (used == std::string(v).size() && n > 0) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  throw Fail{kUsage, "MSTREAM_SUPPORT_CAP must be a positive integer"};
}

// Restores the process-wide support cap when a command finishes.
struct CapScope {
  explicit CapScope(std::optional<std::size_t> cap) : saved(support_cap()) {
    if (cap) set_support_cap(*cap);
  }
  ~CapScope() { set_support_cap(saved); }
  std::size_t saved;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Monoidal stream programs: run, exact distributions, causality and equivalence checks"};
  app.name("mstream");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--support-cap", c.support_cap, "Largest distribution support before giving up (env MSTREAM_SUPPORT_CAP)")
      ->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "Parse and type check; print each definition's type");
  check->add_option("file", c.file)->required();

  auto* run_cmd = app.add_subcommand("run", "Sample-execute a stream, one record per step");
  run_cmd->add_option("file", c.file)->required();
  run_cmd->add_option("name", c.name)->required();
  run_cmd->add_option("--steps", c.steps, "Number of steps")->required();
  run_cmd->add_option("--seed", c.seed, "Seed of mt19937_64/exact-v1")->capture_default_str();
  run_cmd->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  run_cmd->add_option("--inputs", c.inputs, "JSON array of steps, each an array of input values");

  auto* dist = app.add_subcommand("dist", "Exact per-step marginals, or the joint history distribution");
  dist->add_option("file", c.file)->required();
  dist->add_option("name", c.name)->required();
  dist->add_option("--steps", c.steps, "Truncation depth: steps 0..N")->required();
  dist->add_flag("--joint", c.joint, "Joint distribution over whole histories");
  dist->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  dist->add_option("--inputs", c.inputs, "JSON array of steps, each an array of input values");

  auto* equiv = app.add_subcommand("equiv", "Observational equivalence up to a depth");
  equiv->add_option("file", c.file)->required();
  equiv->add_option("name1", c.name)->required();
  equiv->add_option("name2", c.name2)->required();
  equiv->add_option("--depth", c.depth)->required();

  auto* causal = app.add_subcommand("causal", "Check that truncations marginalise correctly");
  causal->add_option("file", c.file)->required();
  causal->add_option("name", c.name)->required();
  causal->add_option("--depth", c.depth)->capture_default_str();

  auto* laws = app.add_subcommand("laws", "Run the feedback-axiom and category-law suites");
  laws->add_option("--instances", c.instances)->capture_default_str();
  laws->add_option("--depth", c.depth)->default_val(4)->capture_default_str();
  laws->add_option("--seed", c.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    std::optional<std::size_t> cap = c.support_cap ? c.support_cap : env_cap();
    CapScope scope(cap);
    if (*check) return cmd_check(c, out);
    if (*run_cmd) return cmd_run(c, out);
    if (*dist) return cmd_dist(c, out);
    if (*equiv) return cmd_equiv(c, out);
    if (*causal) return cmd_causal(c, out);
    if (*laws) return cmd_laws(c, out);
  } catch (const Fail& f) {
    err << "error: " << f.msg << "\n";
    if (f.code == kUsage) err << app.help();
    return f.code;
  } catch (const SupportOverflow& e) {
    err << "error: " << e.what() << " (raise it with --support-cap or MSTREAM_SUPPORT_CAP)\n";
    return kSupportOverflow;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kEvalError;
  }
  return kUsage;
}

}  // namespace mstream::cli
