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

#include "advisor/templates.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "advisor/errors.hpp"

namespace advisor {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unescape(std::string_view v) {
  std::string out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size() && v[i + 1] == 'n') {
      out.push_back('\n');
      ++i;
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

// Calls on_text for literal runs and on_field for {placeholder} names.
template <typename Text, typename Field>
void scan(std::string_view tpl, Text on_text, Field on_field) {
  std::size_t i = 0;
  while (i < tpl.size()) {
    const char c = tpl[i];
    if ((c == '{' || c == '}') && i + 1 < tpl.size() && tpl[i + 1] == c) {
      on_text(std::string_view(&tpl[i], 1));
      i += 2;
    } else if (c == '{') {
      const auto close = tpl.find('}', i);
      if (close == std::string_view::npos) throw InternalError(fmt::format("unterminated placeholder in '{}'", tpl));
      on_field(tpl.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      const auto next = tpl.find_first_of("{}", i + 1);
      const auto end = next == std::string_view::npos ? tpl.size() : next;
      on_text(tpl.substr(i, end - i));
      i = end;
    }
  }
}

}  // namespace

TemplateSet TemplateSet::parse(std::string_view text) {
  TemplateSet set;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '@') {
      const auto sp = line.find(' ');
      const auto directive = line.substr(1, sp == std::string_view::npos ? line.size() : sp - 1);
      const auto value = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
      if (directive == "locale") {
        set.locale_ = std::string(value);
      } else if (directive == "version") {
        set.version_ = std::stoi(std::string(value));
      } else {
        throw ParseError(fmt::format("line {}: unknown directive '@{}'", line_no, directive), line_no, "");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(fmt::format("line {}: expected 'key = text'", line_no), line_no, "");
    }
    const auto key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(fmt::format("line {}: empty key", line_no), line_no, "");
    if (!set.entries_.emplace(key, unescape(trim(line.substr(eq + 1)))).second) {
      throw ParseError(fmt::format("line {}: duplicate key '{}'", line_no, key), line_no, key);
    }
  }
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = parse(embedded_asset("templates_en.txt"));
  return set;
}

bool TemplateSet::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::vector<std::string> TemplateSet::keys(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, _] : entries_) {
    if (k.starts_with(prefix)) out.push_back(k);
  }
  return out;
}

const std::string& TemplateSet::raw(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw InternalError(fmt::format("no template '{}'", key));
  return it->second;
}

std::vector<std::string> TemplateSet::placeholders(std::string_view key) const {
  std::vector<std::string> out;
  scan(raw(key), [](std::string_view) {}, [&](std::string_view f) { out.emplace_back(f); });
  return out;
}

std::string TemplateSet::render(std::string_view key, const TemplateVars& vars) const {
  std::string out;
  scan(
      raw(key), [&](std::string_view t) { out.append(t); },
      [&](std::string_view f) {
        const auto it = vars.find(f);
        if (it == vars.end()) throw InternalError(fmt::format("template '{}' needs '{}'", key, f));
        out.append(it->second);
      });
  return out;
}

}  // namespace advisor
