#ifndef ETS_CONFIG_HPP
#define ETS_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "ets/errors.hpp"

// Sectioned key/value configuration text:
//   [section]
//   key = value
// Keys keep insertion order inside a section so that parse -> serialize ->
// parse is the identity.

namespace ets::config {

struct Section {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  void set(const std::string& key, const std::string& value);
};

struct Document {
  std::vector<Section> sections;

  Section* find(const std::string& name);
  const Section* find(const std::string& name) const;
  const Section& require(const std::string& name) const;
  Section& obtain(const std::string& name);  // creates when absent
};

Document parse(const std::string& text, const std::string& origin = "<memory>");
Document read_file(const std::string& path);
std::string serialize(const Document& doc);
void write_file(const Document& doc, const std::string& path);

std::string format_number(double v);

}  // namespace ets::config

#endif
