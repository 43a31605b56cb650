#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blade/bpmn.hpp"
#include "blade/kb.hpp"
#include "blade/mcdm.hpp"
#include "blade/perfsim.hpp"

namespace blade {

struct ArchitectureStub {
  json descriptor;
  std::map<std::string, std::string> files;  // relative path -> content
};

/// Lowercases and maps every non-alphanumeric character to '_'.
std::string sanitize_identifier(std::string_view name);

/// Sanitizes each name and suffixes repeats with _2, _3, ... in order.
std::vector<std::string> unique_identifiers(std::span<const std::string> names);

/// On-chain tasks become contract functions, all other tasks become services.
/// `survivors` is the ranked list the winner was taken from. Output is a pure
/// function of the inputs, byte for byte.
ArchitectureStub generate_stubs(const ProcessModel& model, const ProcessProfile& profile,
                                const BlockchainProfile& winner, const ChainParams& params,
                                std::span<const RankedAlternative> survivors);

/// Writes every file under `dir`, creating directories as needed.
void write_stub(const ArchitectureStub& stub, const std::filesystem::path& dir);

}  // namespace blade
