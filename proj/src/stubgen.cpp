#include "blade/stubgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "blade/error.hpp"

namespace blade {

namespace {

constexpr int kServiceBasePort = 8080;
constexpr int kP2pBasePort = 30303;
constexpr int kRpcBasePort = 8545;

std::string yaml_string(const std::string& s) { return json(s).dump(); }
std::string yaml_number(double x) { return json(x).dump(); }

struct TaskRef {
  const ProcessNode* node;
  std::string label;
};

}  // namespace

std::string sanitize_identifier(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (unsigned char c : name) {
    out += std::isalnum(c) && c < 0x80 ? static_cast<char>(std::tolower(c)) : '_';
  }
  return out;
}

std::vector<std::string> unique_identifiers(std::span<const std::string> names) {
  std::vector<std::string> out;
  std::set<std::string> used;
  for (const auto& n : names) {
    const auto base = sanitize_identifier(n);
    auto candidate = base;
    for (int k = 2; used.count(candidate); ++k) candidate = base + "_" + std::to_string(k);
    used.insert(candidate);
    out.push_back(std::move(candidate));
  }
  return out;
}

ArchitectureStub generate_stubs(const ProcessModel& model, const ProcessProfile& profile,
                                const BlockchainProfile& winner, const ChainParams& params,
                                std::span<const RankedAlternative> survivors) {
  params.check();
  if (std::none_of(survivors.begin(), survivors.end(),
                   [&](const RankedAlternative& r) { return r.alternative_id == winner.id; })) {
    throw ValidationError("platform '" + winner.id + "' is not among the ranked survivors");
  }
  if (profile.process_id != model.process_id) {
    throw ValidationError("process profile '" + profile.process_id + "' was not derived from model '" +
                          model.process_id + "'");
  }

  const std::set<std::string> onchain(profile.onchain_tasks.begin(), profile.onchain_tasks.end());
  std::vector<TaskRef> contract_tasks;
  std::vector<TaskRef> service_tasks;
  for (const auto& n : model.nodes) {
    if (n.kind != NodeKind::task) continue;
    TaskRef ref{&n, n.name.empty() ? n.id : n.name};
    (onchain.count(n.id) ? contract_tasks : service_tasks).push_back(ref);
  }
  if (contract_tasks.empty() && service_tasks.empty()) {
    throw ValidationError("empty process model: no tasks to generate from");
  }

  auto labels = [](const std::vector<TaskRef>& tasks) {
    std::vector<std::string> out;
    for (const auto& t : tasks) out.push_back(t.label);
    return out;
  };
  const auto function_names = unique_identifiers(labels(contract_tasks));
  const auto service_names = unique_identifiers(labels(service_tasks));
  const auto contract_name = sanitize_identifier(model.process_id) + "_contract";

  json functions = json::array();
  for (std::size_t i = 0; i < contract_tasks.size(); ++i) {
    const auto& id = contract_tasks[i].node->id;
    const auto visits = profile.task_visits.count(id) ? profile.task_visits.at(id) : 0.0;
    functions.push_back({{"name", function_names[i]},
                         {"source_task", id},
                         {"calls_per_instance", visits}});
  }
  json services = json::array();
  for (std::size_t i = 0; i < service_tasks.size(); ++i) {
    services.push_back({{"name", service_names[i]},
                        {"source_task", service_tasks[i].node->id},
                        {"operations", json::array({service_names[i]})},
                        {"port", kServiceBasePort + static_cast<int>(i)}});
  }

  ArchitectureStub stub;
  stub.descriptor = {
      {"platform", {{"id", winner.id}, {"name", winner.name}}},
      {"process", model.process_id},
      {"tx_rate", profile.tx_rate},
      {"services", services},
      {"contract", {{"name", contract_name}, {"functions", functions}}},
      {"network",
       {{"node_count", params.node_count},
        {"block_time", params.block_time},
        {"block_capacity", params.block_capacity},
        {"finality_blocks", params.finality_blocks},
        {"protocol", "tcp"},
        {"ports", {{"p2p", kP2pBasePort}, {"rpc", kRpcBasePort}, {"service_base", kServiceBasePort}}}}}};

  json contract = {{"name", contract_name},
                   {"platform", winner.id},
                   {"process", model.process_id},
                   {"functions", functions}};

  std::ostringstream yaml;
  yaml << "# Deployment manifest generated by blade\n"
       << "platform: " << yaml_string(winner.id) << "\n"
       << "process: " << yaml_string(model.process_id) << "\n";
  if (service_tasks.empty()) {
    yaml << "services: []\n";
  } else {
    yaml << "services:\n";
    for (std::size_t i = 0; i < service_tasks.size(); ++i) {
      yaml << "  - name: " << yaml_string(service_names[i]) << "\n"
           << "    source_task: " << yaml_string(service_tasks[i].node->id) << "\n"
           << "    port: " << kServiceBasePort + static_cast<int>(i) << "\n";
    }
  }
  yaml << "nodes:\n";
  for (int i = 0; i < params.node_count; ++i) {
    yaml << "  - name: \"node-" << i + 1 << "\"\n"
         << "    block_time: " << yaml_number(params.block_time) << "\n"
         << "    p2p_port: " << kP2pBasePort + i << "\n"
         << "    rpc_port: " << kRpcBasePort + i << "\n";
  }
  yaml << "network:\n"
       << "  protocol: \"tcp\"\n"
       << "  block_capacity: " << yaml_number(params.block_capacity) << "\n"
       << "  finality_blocks: " << params.finality_blocks << "\n";

  stub.files["architecture.json"] = stub.descriptor.dump(2) + "\n";
  stub.files["contract.json"] = contract.dump(2) + "\n";
  stub.files["deploy.yaml"] = yaml.str();
  return stub;
}

void write_stub(const ArchitectureStub& stub, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [rel, content] : stub.files) {
    const auto path = dir / std::filesystem::path(rel).lexically_normal();
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << content;
  }
}

}  // namespace blade
