#pragma once

// Subset of JSON Schema used by the OpenAPI document: type (string or list),
// required, properties, additionalProperties, items, enum, minimum, maximum,
// exclusiveMinimum, exclusiveMaximum and local $ref.

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

namespace textscape::testing {

class SchemaChecker {
 public:
  explicit SchemaChecker(nlohmann::json root) : root_(std::move(root)) {}

  /// Empty when `value` conforms; otherwise one message per violation.
  std::vector<std::string> check(const nlohmann::json& value, const nlohmann::json& schema) const {
    std::vector<std::string> errors;
    visit(value, schema, "$", errors);
    return errors;
  }

  std::vector<std::string> check_named(const nlohmann::json& value, const std::string& schema_name) const {
    return check(value, root_.at("components").at("schemas").at(schema_name));
  }

 private:
  const nlohmann::json& resolve(const nlohmann::json& schema) const {
    if (!schema.contains("$ref")) return schema;
    const auto ref = schema.at("$ref").get<std::string>();
    return resolve(root_.at(nlohmann::json::json_pointer(ref.substr(1))));
  }

  static bool has_type(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
  }

  void visit(const nlohmann::json& value, const nlohmann::json& raw, const std::string& at,
             std::vector<std::string>& errors) const {
    const auto& schema = resolve(raw);
    if (auto t = schema.find("type"); t != schema.end()) {
      bool ok = false;
      if (t->is_string()) {
        ok = has_type(value, t->get<std::string>());
      } else {
        for (const auto& alt : *t) ok = ok || has_type(value, alt.get<std::string>());
      }
      if (!ok) {
        errors.push_back(at + ": expected type " + t->dump() + ", got " + value.type_name());
        return;
      }
    }
    if (auto e = schema.find("enum"); e != schema.end()) {
      if (std::find(e->begin(), e->end(), value) == e->end()) errors.push_back(at + ": value not in enum");
    }
    if (value.is_number()) {
      const double v = value.get<double>();
      if (schema.contains("minimum") && v < schema["minimum"].get<double>()) errors.push_back(at + ": below minimum");
      if (schema.contains("maximum") && v > schema["maximum"].get<double>()) errors.push_back(at + ": above maximum");
      if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>()) {
        errors.push_back(at + ": not above exclusiveMinimum");
      }
      if (schema.contains("exclusiveMaximum") && v >= schema["exclusiveMaximum"].get<double>()) {
        errors.push_back(at + ": not below exclusiveMaximum");
      }
    }
    if (value.is_object()) {
      if (auto r = schema.find("required"); r != schema.end()) {
        for (const auto& key : *r) {
          if (!value.contains(key.get<std::string>())) errors.push_back(at + ": missing " + key.get<std::string>());
        }
      }
      const auto props = schema.find("properties");
      const auto extra = schema.find("additionalProperties");
      for (const auto& [key, child] : value.items()) {
        if (props != schema.end() && props->contains(key)) {
          visit(child, props->at(key), at + "." + key, errors);
        } else if (extra != schema.end() && extra->is_object()) {
          visit(child, *extra, at + "." + key, errors);
        } else if (props != schema.end()) {
          errors.push_back(at + ": unexpected property " + key);
        }
      }
    }
    if (value.is_array()) {
      if (auto items = schema.find("items"); items != schema.end()) {
        for (std::size_t i = 0; i < value.size(); ++i) visit(value[i], *items, at + "[" + std::to_string(i) + "]", errors);
      }
    }
  }

  nlohmann::json root_;
};

}  // namespace textscape::testing
