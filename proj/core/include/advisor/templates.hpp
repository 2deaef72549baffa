// Copyright 2026 The Advisor Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVISOR_TEMPLATES_HPP_
#define ADVISOR_TEMPLATES_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace advisor {

// Text asset compiled into the library (core/assets/<name>); empty if
// unknown.
std::string_view embedded_asset(std::string_view name);

using TemplateVars = std::map<std::string, std::string, std::less<>>;

// Keyed text templates with {named} placeholders.
//
// Asset format, one entry per line:
//
//   # comment
//   @locale en
//   @version 3
//   note.params_missing = Missing {missing}.
//
// "\n" inside a value is a newline; "{{" and "}}" are literal braces.
class TemplateSet {
 public:
  // Throws ParseError naming the 1-based line.
  static TemplateSet parse(std::string_view text);
  static TemplateSet load(const std::filesystem::path& path);
  // English set built from core/assets/templates_en.txt.
  static const TemplateSet& builtin();

  const std::string& locale() const { return locale_; }
  int version() const { return version_; }

  bool contains(std::string_view key) const;
  std::vector<std::string> keys(std::string_view prefix = {}) const;
  std::vector<std::string> placeholders(std::string_view key) const;

  // Throws InternalError for an unknown key or a placeholder without a value.
  std::string render(std::string_view key, const TemplateVars& vars = {}) const;
  const std::string& raw(std::string_view key) const;

 private:
  std::string locale_ = "en";
  int version_ = 0;
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace advisor

#endif  // ADVISOR_TEMPLATES_HPP_
