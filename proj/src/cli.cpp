#include "blp/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "blp/errors.hpp"
#include "blp/hugin.hpp"
#include "blp/semantics.hpp"
#include "blp/text.hpp"

namespace blp {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitResource = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string state_list(const DiscreteAnswer& answer, std::size_t index) {
  // Decodes a flat table index into "a=x, b=y" in variable order.
  std::vector<std::size_t> states(answer.variables.size(), 0);
  for (std::size_t i = answer.variables.size(); i-- > 0;) {
    std::size_t card = answer.states[i].size();
    states[i] = index % card;
    index /= card;
  }
  std::string out;
  for (std::size_t i = 0; i < answer.variables.size(); ++i) {
    if (i > 0) out += ", ";
    out += answer.variables[i].to_string() + "=" +
           answer.states[i][states[i]];
  }
  return out;
}

std::string gaussian_text(const GaussianBelief& belief) {
  std::ostringstream out;
  if (belief.variables.size() == 1) {
    out << "p(" << belief.variables[0].to_string() << ") ~ N(mean="
        << format_double(belief.mean[0]) << ", var="
        << format_double(belief.covariance[0][0]) << ")\n";
    return out.str();
  }
  out << "joint Gaussian over";
  for (const Atom& atom : belief.variables) out << ' ' << atom.to_string();
  out << "\n";
  for (std::size_t i = 0; i < belief.variables.size(); ++i) {
    out << "  mean(" << belief.variables[i].to_string() << ") = "
        << format_double(belief.mean[i]) << "\n";
  }
  out << "  covariance:\n";
  for (std::size_t i = 0; i < belief.variables.size(); ++i) {
    out << "   ";
    for (std::size_t j = 0; j < belief.variables.size(); ++j) {
      out << ' ' << format_double(belief.covariance[i][j]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string answer_text(const QueryAnswer& answer) {
  std::ostringstream out;
  if (const DiscreteAnswer* discrete = std::get_if<DiscreteAnswer>(&answer)) {
    for (std::size_t i = 0; i < discrete->values.size(); ++i) {
      out << "P(" << state_list(*discrete, i)
          << ") = " << format_double(discrete->values[i]) << "\n";
    }
    return out.str();
  }
  if (const GaussianBelief* belief = std::get_if<GaussianBelief>(&answer)) {
    return gaussian_text(*belief);
  }
  const MixtureAnswer& mixture = std::get<MixtureAnswer>(answer);
  out << "mixture over";
  for (const Atom& atom : mixture.variables) out << ' ' << atom.to_string();
  out << " with " << mixture.components.size() << " component(s)\n";
  for (std::size_t k = 0; k < mixture.components.size(); ++k) {
    const MixtureComponent& component = mixture.components[k];
    out << "component " << k
        << ": weight = " << format_double(component.weight) << "\n";
    for (const auto& [atom, state] : component.configuration) {
      out << "  " << atom.to_string() << " = " << state << "\n";
    }
    out << "  " << gaussian_text(component.belief);
  }
  return out.str();
}

std::string answer_json(const QueryAnswer& answer) {
  nlohmann::json doc;
  auto atom_names = [](const std::vector<Atom>& atoms) {
    std::vector<std::string> names;
    for (const Atom& atom : atoms) names.push_back(atom.to_string());
    return names;
  };
  if (const DiscreteAnswer* discrete = std::get_if<DiscreteAnswer>(&answer)) {
    doc["kind"] = "discrete";
    doc["variables"] = atom_names(discrete->variables);
    doc["states"] = discrete->states;
    doc["values"] = discrete->values;
  } else if (const GaussianBelief* belief = std::get_if<GaussianBelief>(&answer)) {
    doc["kind"] = "gaussian";
    doc["variables"] = atom_names(belief->variables);
    doc["mean"] = belief->mean;
    doc["covariance"] = belief->covariance;
  } else {
    const MixtureAnswer& mixture = std::get<MixtureAnswer>(answer);
    doc["kind"] = "mixture";
    doc["variables"] = atom_names(mixture.variables);
    nlohmann::json components = nlohmann::json::array();
    for (const MixtureComponent& component : mixture.components) {
      nlohmann::json entry;
      entry["weight"] = component.weight;
      nlohmann::json config = nlohmann::json::object();
      for (const auto& [atom, state] : component.configuration) {
        config[atom.to_string()] = state;
      }
      entry["configuration"] = config;
      entry["mean"] = component.belief.mean;
      entry["covariance"] = component.belief.covariance;
      components.push_back(std::move(entry));
    }
    doc["components"] = std::move(components);
  }
  return doc.dump();
}

namespace {

int exit_code_for(const Error& error) {
  return error.kind() == ErrorKind::ResourceExceeded ? kExitResource
                                                     : kExitUserError;
}

struct QueryArgs {
  std::string file;
  std::string query;
  std::string export_net;
  bool no_prune = false;
  std::size_t depth_limit = ProofLimits{}.max_depth;
  std::size_t max_atoms = ProofLimits{}.max_nodes;
  std::string engine = "auto";
  std::string output = "text";
};

int run_query(const QueryArgs& args, std::ostream& out) {
  Program program = parse_program(read_file(args.file));
  Query query = parse_query(program, args.query);
  AnswerOptions options;
  options.proof_limits.max_depth = args.depth_limit;
  options.proof_limits.max_nodes = args.max_atoms;
  options.prune_network = !args.no_prune;
  if (args.engine == "ve") {
    options.engine = AnswerOptions::Engine::VariableElimination;
  } else if (args.engine == "gaussian") {
    options.engine = AnswerOptions::Engine::Gaussian;
  }
  AnswerResult result = answer_query(program, query, options);
  if (!args.export_net.empty()) {
    std::ofstream net(args.export_net, std::ios::binary);
    if (!net) {
      throw ValidationError("cannot write file '" + args.export_net + "'");
    }
    net << export_hugin_net(result.network);
  }
  if (args.output == "json") {
    out << answer_json(result.answer) << "\n";
  } else {
    out << answer_text(result.answer);
  }
  return kExitOk;
}

struct ShellState {
  std::unique_ptr<Program> program;
  std::string file;
};

void shell_help(std::ostream& out) {
  out << "commands:\n"
         "  consult <file>.          load a program\n"
         "  Q1,...,Qn.               query p(Q1,...,Qn)\n"
         "  Q1,...,Qn | E=e,... .    query with evidence\n"
         "  help.                    this message\n"
         "  exit.                    leave the shell\n";
}

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

int run_shell(const std::string& initial_file, std::istream& in,
              std::ostream& out, std::ostream& err) {
  ShellState state;
  auto consult = [&](const std::string& path) {
    state.program = std::make_unique<Program>(parse_program(read_file(path)));
    state.file = path;
    out << "consulted " << path << "\n";
  };
  if (!initial_file.empty()) {
    consult(initial_file);
  }
  out << "blp shell; type 'help.' for commands\n";
  std::string line;
  while (out << "?- " << std::flush, std::getline(in, line)) {
    std::string input = trim(line);
    if (input.empty()) continue;
    if (input.back() == '.') input = trim(input.substr(0, input.size() - 1));
    if (input.empty()) continue;
    if (input == "exit") return kExitOk;
    if (input == "help") {
      shell_help(out);
      continue;
    }
    try {
      if (input.rfind("consult ", 0) == 0) {
        std::string path = trim(input.substr(8));
        if (path.size() >= 2 && path.front() == '\'' && path.back() == '\'') {
          path = path.substr(1, path.size() - 2);
        }
        consult(path);
        continue;
      }
      if (!state.program) {
        err << "no program consulted\n";
        continue;
      }
      Query query = parse_query(*state.program, input);
      AnswerResult result = answer_query(*state.program, query);
      out << answer_text(result.answer);
    } catch (const Error& error) {
      err << error_kind_name(error.kind()) << ": " << error.what() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in,
            std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian logic program interpreter"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "parse a program and report "
                                            "well-definedness");
  std::string check_file;
  SemanticsLimits check_limits;
  check->add_option("file", check_file, "program file")->required();
  check->add_option("--max-iterations", check_limits.max_iterations,
                    "fixpoint iteration bound");
  check->add_option("--max-atoms", check_limits.max_atoms,
                    "model size bound");
  check->add_option("--ancestor-bound", check_limits.ancestor_bound,
                    "ancestor set bound");

  auto* query = app.add_subcommand("query", "answer a probabilistic query");
  QueryArgs query_args;
  query->add_option("file", query_args.file, "program file")->required();
  query->add_option("query", query_args.query, "query string")->required();
  query->add_option("--export-net", query_args.export_net,
                    "write the pruned support network as a NET file");
  query->add_flag("--no-prune", query_args.no_prune,
                  "keep evidence-only network components");
  query->add_option("--depth-limit", query_args.depth_limit,
                    "SLD tree depth limit");
  query->add_option("--max-atoms", query_args.max_atoms,
                    "SLD tree node limit");
  query->add_option("--engine", query_args.engine, "auto|ve|gaussian")
      ->check(CLI::IsMember({"auto", "ve", "gaussian"}));
  query->add_option("--output", query_args.output, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* shell = app.add_subcommand("shell", "interactive query loop");
  std::string shell_file;
  shell->add_option("file", shell_file, "program file to consult on startup");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& error) {
    if (error.get_exit_code() == 0) {
      // --help and friends.
      out << app.help();
      return kExitOk;
    }
    err << "error: " << error.what() << "\n";
    return kExitUserError;
  }

  try {
    if (check->parsed()) {
      Program program = parse_program(read_file(check_file));
      WellDefinednessReport report = check_well_defined(program, check_limits);
      out << report.to_string() << "\n";
      switch (report.status) {
        case WellDefinednessReport::Status::WellDefined:
          return kExitOk;
        case WellDefinednessReport::Status::IllDefined:
          return kExitUserError;
        case WellDefinednessReport::Status::Undetermined:
          return kExitResource;
      }
    }
    if (query->parsed()) {
      return run_query(query_args, out);
    }
    if (shell->parsed()) {
      return run_shell(shell_file, in, out, err);
    }
  } catch (const Error& error) {
    err << error_kind_name(error.kind()) << ": " << error.what() << "\n";
    return exit_code_for(error);
  } catch (const std::exception& error) {
    err << "internal error: " << error.what() << "\n";
    return kExitResource;
  }
  return kExitUserError;
}

}  // namespace blp
