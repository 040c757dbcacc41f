#include "aomd/config.hpp"

#include <functional>
#include <map>

#include <json.hpp>

#include "aomd/error.hpp"
#include "aomd/format.hpp"

namespace aomd {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Field {
  std::string key;
  std::function<ordered_json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

[[noreturn]] void type_error(const std::string& key, const char* expected, const json& v) {
  throw ConfigError("config key '" + key + "' expects " + expected + ", got " + v.dump());
}

std::size_t as_size(const std::string& key, const json& v) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    type_error(key, "a non-negative integer", v);
  }
  return v.get<std::size_t>();
}

std::uint64_t as_u64(const std::string& key, const json& v) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
    type_error(key, "a non-negative integer", v);
  }
  return v.get<std::uint64_t>();
}

double as_double(const std::string& key, const json& v) {
  if (!v.is_number()) type_error(key, "a number", v);
  return v.get<double>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) type_error(key, "a string", v);
  return v.get<std::string>();
}

template <typename Access>
Field size_field(std::string key, Access access) {
  return {key, [access](const RunConfig& c) { return ordered_json(access(const_cast<RunConfig&>(c))); },
          [access, key](RunConfig& c, const json& v) { access(c) = as_size(key, v); }};
}

template <typename Access>
Field u64_field(std::string key, Access access) {
  return {key, [access](const RunConfig& c) { return ordered_json(access(const_cast<RunConfig&>(c))); },
          [access, key](RunConfig& c, const json& v) { access(c) = as_u64(key, v); }};
}

template <typename Access>
Field double_field(std::string key, Access access) {
  return {key, [access](const RunConfig& c) { return ordered_json(access(const_cast<RunConfig&>(c))); },
          [access, key](RunConfig& c, const json& v) { access(c) = as_double(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(size_field("data.max_objects", [](RunConfig& c) -> auto& { return c.data.max_objects; }));

    f.push_back(size_field("model.dim", [](RunConfig& c) -> auto& { return c.model.dim; }));
    f.push_back(size_field("model.hidden", [](RunConfig& c) -> auto& { return c.model.hidden; }));
    f.push_back(size_field("model.embedding_dim", [](RunConfig& c) -> auto& { return c.model.embedding_dim; }));
    f.push_back(size_field("model.global_dim", [](RunConfig& c) -> auto& { return c.model.global_dim; }));
    f.push_back(size_field("model.object_dim", [](RunConfig& c) -> auto& { return c.model.object_dim; }));
    f.push_back(size_field("model.mlp_hidden", [](RunConfig& c) -> auto& { return c.model.mlp_hidden; }));
    f.push_back(size_field("model.max_context_tokens",
                           [](RunConfig& c) -> auto& { return c.model.max_context_tokens; }));
    f.push_back({"model.separator", [](const RunConfig& c) { return ordered_json(c.model.separator); },
                 [](RunConfig& c, const json& v) { c.model.separator = as_string("model.separator", v); }});
    f.push_back({"model.ablation",
                 [](const RunConfig& c) { return ordered_json(std::string(to_string(c.model.ablation))); },
                 [](RunConfig& c, const json& v) {
                   c.model.ablation = parse_ablation(as_string("model.ablation", v));
                 }});

    f.push_back(double_field("cluster.pad_factor", [](RunConfig& c) -> auto& { return c.model.cluster.pad_factor; }));
    f.push_back(size_field("cluster.max_clusters", [](RunConfig& c) -> auto& { return c.model.cluster.max_clusters; }));
    f.push_back(double_field("cluster.line_factor", [](RunConfig& c) -> auto& { return c.model.cluster.line_factor; }));

    f.push_back(size_field("train.epochs", [](RunConfig& c) -> auto& { return c.train.epochs; }));
    f.push_back(size_field("train.patience", [](RunConfig& c) -> auto& { return c.train.patience; }));
    f.push_back(u64_field("train.seed", [](RunConfig& c) -> auto& { return c.train.seed; }));
    f.push_back(double_field("train.threshold", [](RunConfig& c) -> auto& { return c.train.threshold; }));

    f.push_back(double_field("optim.learning_rate", [](RunConfig& c) -> auto& { return c.train.optim.learning_rate; }));
    f.push_back(double_field("optim.eps", [](RunConfig& c) -> auto& { return c.train.optim.eps; }));
    f.push_back(double_field("optim.beta1", [](RunConfig& c) -> auto& { return c.train.optim.beta1; }));
    f.push_back(double_field("optim.beta2", [](RunConfig& c) -> auto& { return c.train.optim.beta2; }));
    f.push_back(double_field("optim.weight_decay", [](RunConfig& c) -> auto& { return c.train.optim.weight_decay; }));
    f.push_back(size_field("optim.batch_size", [](RunConfig& c) -> auto& { return c.train.optim.batch_size; }));
    f.push_back(double_field("optim.clip_norm", [](RunConfig& c) -> auto& { return c.train.optim.clip_norm; }));

    f.push_back(size_field("synthetic.n_posts", [](RunConfig& c) -> auto& { return c.synthetic.n_posts; }));
    f.push_back(u64_field("synthetic.seed", [](RunConfig& c) -> auto& { return c.synthetic.seed; }));
    f.push_back(size_field("synthetic.d", [](RunConfig& c) -> auto& { return c.synthetic.d; }));
    f.push_back(size_field("synthetic.d_g", [](RunConfig& c) -> auto& { return c.synthetic.d_g; }));
    f.push_back(size_field("synthetic.vocab_size", [](RunConfig& c) -> auto& { return c.synthetic.vocab_size; }));
    f.push_back(size_field("synthetic.embedding_dim", [](RunConfig& c) -> auto& { return c.synthetic.embedding_dim; }));
    f.push_back(double_field("synthetic.analogy_rate", [](RunConfig& c) -> auto& { return c.synthetic.analogy_rate; }));
    f.push_back(double_field("synthetic.noise_rate", [](RunConfig& c) -> auto& { return c.synthetic.noise_rate; }));
    f.push_back(double_field("synthetic.miss_rate", [](RunConfig& c) -> auto& { return c.synthetic.miss_rate; }));
    f.push_back(double_field("synthetic.positive_rate", [](RunConfig& c) -> auto& { return c.synthetic.positive_rate; }));

    f.push_back({"ablation.variants",
                 [](const RunConfig& c) {
                   ordered_json out = ordered_json::array();
                   for (Ablation a : c.ablation.variants) out.push_back(std::string(to_string(a)));
                   return out;
                 },
                 [](RunConfig& c, const json& v) {
                   if (!v.is_array()) type_error("ablation.variants", "a list of variant names", v);
                   std::vector<Ablation> out;
                   for (const json& item : v) out.push_back(parse_ablation(as_string("ablation.variants", item)));
                   c.ablation.variants = std::move(out);
                 }});
    f.push_back({"ablation.seeds", [](const RunConfig& c) { return ordered_json(c.ablation.seeds); },
                 [](RunConfig& c, const json& v) {
                   if (!v.is_array()) type_error("ablation.seeds", "a list of seeds", v);
                   std::vector<std::uint64_t> out;
                   for (const json& item : v) out.push_back(as_u64("ablation.seeds", item));
                   c.ablation.seeds = std::move(out);
                 }});
    f.push_back(size_field("ablation.threads", [](RunConfig& c) -> auto& { return c.ablation.threads; }));
    return f;
  }();
  return table;
}

const Field& find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

bool is_list_key(std::string_view key) { return key == "ablation.seeds" || key == "ablation.variants"; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

json parse_scalar(std::string_view text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(std::string(text));
  return v;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

void apply_json(RunConfig& config, std::string_view json_text) {
  const json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("config is not valid JSON");
  if (!root.is_object()) throw ConfigError("config must be a JSON object of sections");
  for (const auto& [section, body] : root.items()) {
    if (!body.is_object()) {
      throw ConfigError("config section '" + section + "' must be an object");
    }
    for (const auto& [name, value] : body.items()) {
      const std::string key = section + "." + name;
      find_field(key).set(config, value);
    }
  }
}

void set_value(RunConfig& config, std::string_view key, std::string_view value) {
  const Field& field = find_field(key);
  const std::string text = trim(value);
  json v = parse_scalar(text);
  if (is_list_key(key) && !v.is_array()) {
    json list = json::array();
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = std::min(text.find(',', start), text.size());
      const std::string item = trim(std::string_view(text).substr(start, comma - start));
      if (!item.empty()) list.push_back(parse_scalar(item));
      start = comma + 1;
    }
    v = std::move(list);
  }
  field.set(config, v);
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  set_value(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string to_json(const RunConfig& config) {
  ordered_json root = ordered_json::object();
  for (const Field& f : fields()) {
    const std::size_t dot = f.key.find('.');
    root[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.get(config);
  }
  return root.dump(2) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig config;
  const std::string text = read_text_file(path);
  try {
    apply_json(config, text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config;
}

void write_run_config(const RunConfig& config, const std::filesystem::path& path) {
  write_text_file(path, to_json(config));
}

}  // namespace aomd
