#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "riesznet/common.hpp"

namespace riesznet::cfg {

using json = nlohmann::json;

/// Loads a JSON run configuration. Unknown keys anywhere in the document are
/// rejected, naming the offending path.
json load_config(const std::string& path);

/// Applies one "key.path=value" override; the value text is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(json& config, const std::string& assignment);

/// Validates the whole document against the known schema.
void validate(const json& config);

/// Writes the fully resolved configuration next to a run's outputs.
void write_resolved(const json& config, const std::string& path);

// typed getters with defaults; missing section -> defaults, wrong type -> error
double get_num(const json& section, const std::string& key, double fallback);
int get_int(const json& section, const std::string& key, int fallback);
std::string get_str(const json& section, const std::string& key, const std::string& fallback);
bool get_bool(const json& section, const std::string& key, bool fallback);
std::vector<int> get_int_list(const json& section, const std::string& key,
                              const std::vector<int>& fallback);
std::vector<double> get_num_list(const json& section, const std::string& key,
                                 const std::vector<double>& fallback);

} // namespace riesznet::cfg
