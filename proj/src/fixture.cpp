#include "blade/kb.hpp"

namespace blade {

namespace {

using C = Iso25010Category;

CriterionDef criterion(std::string id, std::string name, C category, Direction direction,
                       CriterionKind kind, std::string unit, std::vector<std::string> levels,
                       std::string description) {
  return {std::move(id),   std::move(name),   category,
          direction,       kind,              std::move(unit),
          std::move(levels), std::move(description)};
}

std::vector<CriterionDef> fixture_criteria() {
  const auto B = Direction::benefit;
  const auto K = Direction::cost;
  return {
      criterion("smart-contracts", "Smart-contract support beyond scripts", C::functional_suitability,
                B, CriterionKind::boolean, "", {},
                "General-purpose programmable contracts, not only a restricted locking script."),
      criterion("throughput-tps", "Sustained throughput", C::performance_efficiency, B,
                CriterionKind::numeric_interval, "tx/s", {},
                "Committed transactions per second reported across deployments."),
      criterion("latency-s", "Time to finality", C::performance_efficiency, K,
                CriterionKind::numeric_interval, "s", {},
                "Seconds from submission until a transaction is considered irreversible."),
      criterion("tx-fee-usd", "Transaction fee", C::performance_efficiency, K,
                CriterionKind::numeric_interval, "USD/tx", {},
                "Fee paid per transaction by the submitting party."),
      criterion("contract-languages", "Contract languages", C::compatibility, B,
                CriterionKind::categorical, "", {},
                "Languages in which on-chain logic can be written."),
      criterion("interoperability", "Interoperability", C::compatibility, B, CriterionKind::ordinal,
                "", {"low", "medium", "high"},
                "Availability of standard bridges, token standards and cross-network tooling."),
      criterion("tooling-maturity", "Developer tooling maturity", C::usability, B,
                CriterionKind::ordinal, "", {"limited", "adequate", "extensive"},
                "SDKs, test frameworks, documentation and operator tooling."),
      criterion("deterministic-finality", "Deterministic finality", C::reliability, B,
                CriterionKind::boolean, "", {},
                "Committed blocks cannot be reverted, as opposed to probabilistic finality."),
      criterion("fault-tolerance", "Consensus fault model", C::reliability, B,
                CriterionKind::ordinal, "", {"crash", "byzantine"},
                "Strongest failure class the default consensus tolerates."),
      criterion("permissioning", "Network access model", C::security, B,
                CriterionKind::categorical, "", {},
                "Whether participation requires an identity granted by a membership service."),
      criterion("confidentiality", "Transaction confidentiality", C::security, B,
                CriterionKind::ordinal, "", {"none", "partial", "full"},
                "Native ability to restrict transaction data to the involved parties."),
      criterion("pluggable-consensus", "Pluggable consensus", C::maintainability, B,
                CriterionKind::boolean, "", {},
                "Consensus can be swapped or reconfigured without forking the platform."),
      criterion("deployment-targets", "Deployment targets", C::portability, B,
                CriterionKind::categorical, "", {},
                "Supported ways of running nodes."),
  };
}

BlockchainProfile fabric() {
  return {"fabric",
          "Hyperledger Fabric",
          {{"smart-contracts", true},
           {"throughput-tps", Interval{1000, 3500}},
           {"latency-s", Interval{0.5, 2}},
           {"tx-fee-usd", Interval{0, 0}},
           {"contract-languages", LabelSet{"go", "java", "javascript", "typescript"}},
           {"interoperability", OrdinalLevel{"medium"}},
           {"tooling-maturity", OrdinalLevel{"extensive"}},
           {"deterministic-finality", true},
           {"fault-tolerance", OrdinalLevel{"crash"}},
           {"permissioning", LabelSet{"permissioned"}},
           {"confidentiality", OrdinalLevel{"full"}},
           {"pluggable-consensus", true},
           {"deployment-targets", LabelSet{"bare-metal", "docker", "kubernetes", "managed-cloud"}}},
          {"couchdb", "docker", "go", "java", "javascript", "kubernetes", "typescript"},
          {{"https://hyperledger-fabric.readthedocs.io/en/latest/", "2026-10-01"},
           {"Androulaki et al., Hyperledger Fabric: A Distributed Operating System for "
            "Permissioned Blockchains, EuroSys 2018",
            "2026-10-01"}}};
}

BlockchainProfile ethereum() {
  return {"ethereum",
          "Ethereum (enterprise deployment)",
          {{"smart-contracts", true},
           {"throughput-tps", Interval{20, 400}},
           {"latency-s", Interval{2, 15}},
           {"tx-fee-usd", Interval{0, 0.1}},
           {"contract-languages", LabelSet{"solidity", "vyper"}},
           {"interoperability", OrdinalLevel{"high"}},
           {"tooling-maturity", OrdinalLevel{"extensive"}},
           {"deterministic-finality", false},
           {"fault-tolerance", OrdinalLevel{"byzantine"}},
           {"permissioning", LabelSet{"permissioned", "permissionless"}},
           {"confidentiality", OrdinalLevel{"none"}},
           {"pluggable-consensus", true},
           {"deployment-targets", LabelSet{"bare-metal", "docker", "kubernetes", "managed-cloud"}}},
          {"docker", "evm", "go", "java", "javascript", "kubernetes", "solidity"},
          {{"https://ethereum.org/en/developers/docs/", "2026-10-01"},
           {"https://entethalliance.org/technical-specifications/", "2026-10-01"}}};
}

BlockchainProfile corda() {
  return {"corda",
          "R3 Corda",
          {{"smart-contracts", true},
           {"throughput-tps", Interval{20, 600}},
           {"latency-s", Interval{1, 5}},
           {"tx-fee-usd", Interval{0, 0}},
           {"contract-languages", LabelSet{"java", "kotlin"}},
           {"interoperability", OrdinalLevel{"medium"}},
           {"tooling-maturity", OrdinalLevel{"adequate"}},
           {"deterministic-finality", true},
           {"fault-tolerance", OrdinalLevel{"crash"}},
           {"permissioning", LabelSet{"permissioned"}},
           {"confidentiality", OrdinalLevel{"full"}},
           {"pluggable-consensus", true},
           {"deployment-targets", LabelSet{"bare-metal", "docker", "kubernetes"}}},
          {"docker", "java", "jvm", "kotlin", "postgresql"},
          {{"https://docs.r3.com/", "2026-10-01"},
           {"Hearn and Brown, Corda: A distributed ledger, R3 technical whitepaper", "2026-10-01"}}};
}

BlockchainProfile quorum() {
  return {"quorum",
          "ConsenSys Quorum",
          {{"smart-contracts", true},
           {"throughput-tps", Interval{100, 2000}},
           {"latency-s", Interval{0.05, 5}},
           {"tx-fee-usd", Interval{0, 0}},
           {"contract-languages", LabelSet{"solidity"}},
           {"interoperability", OrdinalLevel{"high"}},
           {"tooling-maturity", OrdinalLevel{"adequate"}},
           {"deterministic-finality", true},
           {"fault-tolerance", OrdinalLevel{"byzantine"}},
           {"permissioning", LabelSet{"permissioned"}},
           {"confidentiality", OrdinalLevel{"partial"}},
           {"pluggable-consensus", true},
           {"deployment-targets", LabelSet{"bare-metal", "docker", "kubernetes", "managed-cloud"}}},
          {"docker", "evm", "go", "java", "javascript", "kubernetes", "solidity"},
          {{"https://docs.goquorum.consensys.io/", "2026-10-01"},
           {"Baliga et al., Performance Evaluation of the Quorum Blockchain Platform, "
            "arXiv:1809.03421",
            "2026-10-01"}}};
}

BlockchainProfile bitcoin() {
  return {"bitcoin",
          "Bitcoin",
          {{"smart-contracts", false},
           {"throughput-tps", Interval{3, 7}},
           {"latency-s", Interval{600, 3600}},
           {"tx-fee-usd", Interval{0.5, 30}},
           {"contract-languages", LabelSet{"script"}},
           {"interoperability", OrdinalLevel{"low"}},
           {"tooling-maturity", OrdinalLevel{"adequate"}},
           {"deterministic-finality", false},
           {"fault-tolerance", OrdinalLevel{"byzantine"}},
           {"permissioning", LabelSet{"permissionless"}},
           {"confidentiality", OrdinalLevel{"none"}},
           {"pluggable-consensus", false},
           {"deployment-targets", LabelSet{"bare-metal", "docker"}}},
          {"c++", "docker", "script"},
          {{"Nakamoto, Bitcoin: A Peer-to-Peer Electronic Cash System, 2008", "2026-10-01"},
           {"https://developer.bitcoin.org/devguide/", "2026-10-01"}}};
}

}  // namespace

KnowledgeBase fixture_knowledge_base() {
  KnowledgeBase kb;
  kb.schema_version = kSchemaVersion;
  kb.kb_version = 1;
  kb.criteria = fixture_criteria();
  kb.profiles = {fabric(), ethereum(), corda(), quorum(), bitcoin()};
  return kb;
}

}  // namespace blade
