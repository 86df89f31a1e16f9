#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace kpsb {

// Flat "key = value" file; '#' starts a comment, blank lines are ignored.
// Keys use the long CLI option names without the leading dashes.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

ConfigEntries parse_config(const std::string& text);
ConfigEntries read_config(const std::filesystem::path& path);

// Appends "--key=value" for every entry whose option is not already given
// in `args` (either "--key value" or "--key=value"). Command-line values win.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const ConfigEntries& entries);

// Renders entries back into the file format.
std::string format_config(const ConfigEntries& entries);

} // namespace kpsb
