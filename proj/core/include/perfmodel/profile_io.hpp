#pragma once

#include <filesystem>
#include <iosfwd>

#include "perfmodel/profile.hpp"

namespace perfmodel {

/// Parses a profile from JSON text and validates it. Throws ParseError on
/// malformed input (with line/field context) and ValidationError listing
/// every violated invariant.
MachineProfile load_profile(std::istream& in);
MachineProfile load_profile_file(const std::filesystem::path& path);

/// Emits the JSON schema accepted by load_profile, keys in canonical order,
/// samples sorted, numbers at full round-trip precision.
void write_profile(const MachineProfile& profile, std::ostream& out);
void write_profile_file(const MachineProfile& profile, const std::filesystem::path& path);

}  // namespace perfmodel
