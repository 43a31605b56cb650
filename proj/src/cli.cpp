#include "blade/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "blade/bpmn.hpp"
#include "blade/kb.hpp"
#include "blade/mcdm.hpp"
#include "blade/perfsim.hpp"
#include "blade/requirements.hpp"
#include "blade/service.hpp"
#include "blade/stubgen.hpp"

namespace blade {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << content;
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("malformed JSON in '" + path + "': " + e.what());
  }
}

void print_findings(const std::vector<Finding>& findings, std::ostream& err) {
  for (const auto& f : findings) err << "  " << to_string(f.severity) << ": " << f.message << "\n";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void print_table(const RankingResult& r, const KnowledgeBase& kb, std::ostream& out) {
  std::vector<std::array<std::string, 4>> rows;
  int rank = 0;
  for (const auto& a : r.ranked) {
    const auto* p = kb.find_profile(a.alternative_id);
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", a.fitting_score);
    rows.push_back({std::to_string(++rank), a.alternative_id, p ? p->name : "", score});
  }
  std::array<std::string, 4> header = {"rank", "id", "platform", "score"};
  std::array<std::size_t, 4> width{};
  for (std::size_t c = 0; c < 4; ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::array<std::string, 4>& row) {
    out << pad(row[0], width[0]) << "  " << pad(row[1], width[1]) << "  " << pad(row[2], width[2])
        << "  " << row[3] << "\n";
  };
  line(header);
  for (const auto& row : rows) line(row);
  if (rows.empty()) out << "(no platform satisfies every strict requirement)\n";
  if (!r.eliminations.empty()) {
    out << "\neliminated:\n";
    for (const auto& e : r.eliminations) {
      for (const auto& v : e.violated) out << "  " << e.alternative_id << ": " << v.explanation << "\n";
    }
  }
  out << "\nkb_version " << r.provenance.kb_version << ", strategy "
      << to_string(r.provenance.strategy) << "\n";
}

struct Inputs {
  KnowledgeBase kb;
  RequirementSet reqs;
  std::vector<std::string> warnings;
};

Inputs load_inputs(const std::string& kb_path, const std::string& reqs_path,
                   const std::optional<ProcessModel>& model) {
  Inputs in{load_knowledge_base_file(kb_path), parse_requirements_file(reqs_path), {}};
  if (model) {
    auto embedded = extract_embedded_requirements(*model);
    in.warnings = model->warnings;
    in.warnings.insert(in.warnings.end(), embedded.warnings.begin(), embedded.warnings.end());
    in.reqs = merge_requirements(in.reqs, embedded.requirements, in.warnings);
  }
  return in;
}

RankingResult checked_evaluate(const Inputs& in) { return evaluate(in.kb, in.reqs); }

}  // namespace

ExitCode run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"blockchain platform decision engine", "blade"};
  app.require_subcommand(1);

  std::string kb_path;
  std::string reqs_path;
  std::string bpmn_path;
  std::string params_path;
  std::string workload_path;
  std::string out_path;
  std::string format = "table";
  std::string profile_id;
  std::string bind = "127.0.0.1:8080";
  std::string ui_dir;
  std::string csv_path;
  double rate = 1.0;
  double duration = 0.0;

  auto kb_option = [&](CLI::App* sub) {
    sub->add_option("-k,--kb", kb_path, "knowledge base JSON file")->required()->envname("BLADE_KB");
  };

  auto* evaluate_cmd = app.add_subcommand("evaluate", "rank platforms against requirements");
  kb_option(evaluate_cmd);
  evaluate_cmd->add_option("-r,--reqs", reqs_path, "requirements file")->required();
  evaluate_cmd->add_option("--bpmn", bpmn_path, "BPMN file with embedded requirements");
  evaluate_cmd->add_option("--rate", rate, "process instances per second");
  evaluate_cmd->add_option("--format", format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));

  auto* simulate_cmd = app.add_subcommand("simulate", "run the performance simulator");
  simulate_cmd->add_option("-p,--params", params_path, "chain parameters JSON")->required();
  simulate_cmd->add_option("-w,--workload", workload_path, "workload JSON")->required();
  simulate_cmd->add_option("-d,--duration", duration, "simulated seconds")->required();
  simulate_cmd->add_option("--csv", csv_path, "write the block occupancy series here");

  auto* refine_cmd = app.add_subcommand("refine", "narrow a profile's intervals by simulation");
  kb_option(refine_cmd);
  refine_cmd->add_option("--profile", profile_id, "profile id")->required();
  refine_cmd->add_option("-p,--params", params_path, "chain parameters JSON")->required();
  refine_cmd->add_option("-w,--workload", workload_path, "workload JSON")->required();
  refine_cmd->add_option("-o,--out", out_path, "refined knowledge base output")->required();

  auto* generate_cmd = app.add_subcommand("generate", "generate stubs for the top-ranked platform");
  kb_option(generate_cmd);
  generate_cmd->add_option("-r,--reqs", reqs_path, "requirements file")->required();
  generate_cmd->add_option("--bpmn", bpmn_path, "BPMN process file")->required();
  generate_cmd->add_option("-o,--out", out_path, "output directory")->required();
  generate_cmd->add_option("-p,--params", params_path, "chain parameters JSON");
  generate_cmd->add_option("--rate", rate, "process instances per second");

  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API");
  kb_option(serve_cmd);
  serve_cmd->add_option("--bind", bind, "host:port to listen on");
  serve_cmd->add_option("--ui-dir", ui_dir, "static UI assets served under /ui");

  auto* validate_cmd = app.add_subcommand("validate", "check a knowledge base and requirements");
  kb_option(validate_cmd);
  validate_cmd->add_option("-r,--reqs", reqs_path, "requirements file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::success;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ExitCode::success;
  } catch (const CLI::ParseError& e) {
    err << "blade: " << e.what() << "\n";
    return ExitCode::io_or_format;
  }

  try {
    if (evaluate_cmd->parsed()) {
      std::optional<ProcessModel> model;
      if (!bpmn_path.empty()) model = parse_bpmn_file(bpmn_path);
      auto in = load_inputs(kb_path, reqs_path, model);
      if (model) {
        const auto profile = build_profile(*model, rate);
        err << "process '" << profile.process_id << "': " << profile.onchain_tasks.size()
            << " on-chain tasks, " << profile.tx_rate << " tx/s\n";
      }
      for (const auto& w : in.warnings) err << "warning: " << w << "\n";
      const auto result = checked_evaluate(in);
      for (const auto& w : result.warnings) err << "warning: " << w << "\n";
      if (format == "json") {
        out << render_ranking(result);
      } else {
        print_table(result, in.kb, out);
      }
    } else if (simulate_cmd->parsed()) {
      const auto params = chain_params_from_json(read_json_file(params_path));
      const auto workload = workload_from_json(read_json_file(workload_path));
      const auto result = simulate(params, workload, duration);
      out << to_json(result).dump(2) << "\n";
      if (!csv_path.empty()) write_file(csv_path, occupancy_csv(result));
    } else if (refine_cmd->parsed()) {
      const auto kb = load_knowledge_base_file(kb_path);
      const auto params = chain_params_from_json(read_json_file(params_path));
      const auto workload = workload_from_json(read_json_file(workload_path));
      const auto refined = refine_intervals(kb, profile_id, {{profile_id, params}}, workload);
      write_file(out_path, serialize(refined));
      const auto& p = *refined.find_profile(profile_id);
      out << "refined '" << profile_id << "' to kb_version " << refined.kb_version << "\n";
      for (auto id : {kThroughputCriterion, kLatencyCriterion}) {
        if (const auto* v = p.attribute(id)) out << "  " << id << " " << describe(*v) << "\n";
      }
    } else if (generate_cmd->parsed()) {
      const auto model = parse_bpmn_file(bpmn_path);
      auto in = load_inputs(kb_path, reqs_path, model);
      for (const auto& w : in.warnings) err << "warning: " << w << "\n";
      const auto result = checked_evaluate(in);
      if (result.ranked.empty()) {
        throw ValidationError("no platform survives the strict requirements; nothing to generate");
      }
      const auto* winner = in.kb.find_profile(result.ranked.front().alternative_id);
      const ChainParams params =
          params_path.empty() ? ChainParams{} : chain_params_from_json(read_json_file(params_path));
      const auto profile = build_profile(model, rate);
      const auto stub = generate_stubs(model, profile, *winner, params, result.ranked);
      write_stub(stub, out_path);
      out << "generated stubs for '" << winner->id << "' in " << out_path << "\n";
      for (const auto& [path, content] : stub.files) out << "  " << path << "\n";
    } else if (serve_cmd->parsed()) {
      auto options = parse_bind_address(bind);
      if (!ui_dir.empty()) options.ui_dir = ui_dir;
      serve(kb_path, options);
    } else if (validate_cmd->parsed()) {
      const auto kb = load_knowledge_base_file(kb_path);
      out << "knowledge base ok: " << kb.criteria.size() << " criteria, " << kb.profiles.size()
          << " profiles, kb_version " << kb.kb_version << "\n";
      if (!reqs_path.empty()) {
        const auto findings = validate_against(parse_requirements_file(reqs_path), kb);
        if (has_errors(findings)) {
          err << "requirements do not validate:\n";
          print_findings(findings, err);
          return ExitCode::validation;
        }
        print_findings(findings, err);
        out << "requirements ok\n";
      }
    }
  } catch (const ValidationError& e) {
    err << "blade: " << e.what() << "\n";
    print_findings(e.findings(), err);
    return ExitCode::validation;
  } catch (const NotFoundError& e) {
    err << "blade: " << e.what() << "\n";
    return ExitCode::validation;
  } catch (const FormatError& e) {
    err << "blade: " << e.what() << "\n";
    return ExitCode::io_or_format;
  } catch (const std::exception& e) {
    err << "blade: internal error: " << e.what() << "\n";
    return ExitCode::internal;
  }
  return ExitCode::success;
}

}  // namespace blade
