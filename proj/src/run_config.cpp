#include "kpsb/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kpsb/error.hpp"

namespace kpsb {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool option_given(const std::vector<std::string>& args, const std::string& key)
{
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
}

} // namespace

ConfigEntries parse_config(const std::string& text)
{
    ConfigEntries out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.starts_with("--"))
            key.erase(0, 2);
        if (key.empty() || key.find_first_of(" \t") != std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
        const auto dup = std::find_if(out.begin(), out.end(), [&](const auto& kv) { return kv.first == key; });
        if (dup != out.end())
            dup->second = std::move(value);
        else
            out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

ConfigEntries read_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::string> merge_config(const std::vector<std::string>& args, const ConfigEntries& entries)
{
    std::vector<std::string> out = args;
    for (const auto& [key, value] : entries)
        if (!option_given(args, key))
            out.push_back("--" + key + "=" + value);
    return out;
}

std::string format_config(const ConfigEntries& entries)
{
    std::string out;
    for (const auto& [key, value] : entries)
        out += key + " = " + value + "\n";
    return out;
}

} // namespace kpsb
