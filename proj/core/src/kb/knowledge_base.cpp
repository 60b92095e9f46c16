// Copyright 2026 The refmail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "refmail/kb/knowledge_base.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refmail/util/text.hpp"

namespace refmail::kb {

namespace {

using ordered_json = nlohmann::ordered_json;

KbEntry internal_default(const std::unordered_map<std::string, std::size_t>& taken) {
  KbEntry e;
  e.id = std::string(kInternalId);
  e.name = std::string(kInternalName);
  e.internal = true;
  for (const auto& a : default_internal_aliases())
    if (!taken.count(text::fold_key(a))) e.aliases.push_back(a);
  return e;
}

}  // namespace

std::string KbDiagnostic::to_string() const {
  std::string s = severity == Severity::kError ? "error" : "warning";
  if (!entry_id.empty()) s += " [" + entry_id + "]";
  s += ": " + message;
  if (!suggestion.empty()) s += " (suggest \"" + suggestion + "\")";
  return s;
}

const std::vector<std::string>& default_internal_aliases() {
  static const std::vector<std::string> v = {
      "Internal", "Colleague", "Colleagues", "IT Department", "IT Helpdesk", "IT Help Desk",
      "IT Support", "IT Service Desk", "IT Team", "Help Desk", "Helpdesk", "Service Desk",
      "HR Department", "Human Resources", "HR Team", "Payroll", "Payroll Department",
      "Finance Department", "Accounts Payable", "System Administrator", "Systems Administrator",
      "Mail Administrator", "Email Administrator", "Webmail Administrator", "Mailbox Administrator",
      "Network Administrator", "Postmaster", "Webmaster", "Security Team", "IT Security Team",
      "Management", "Your Manager", "Office of the President", "Office of the CEO"};
  return v;
}

KbEntry canonicalize(KbEntry e) {
  e.id = std::string(text::trim(e.id));
  e.name = std::string(text::trim(e.name));
  if (e.name.empty()) e.name = e.id;
  std::vector<std::string> aliases;
  std::vector<std::string> seen;
  for (const auto& raw : e.aliases) {
    std::string a(text::trim(raw));
    if (a.empty()) continue;
    auto key = text::fold_key(a);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    aliases.push_back(std::move(a));
  }
  if (aliases.empty() && !e.name.empty()) aliases.push_back(e.name);
  e.aliases = std::move(aliases);
  std::set<std::string> domains;
  for (const auto& d : e.domains) {
    auto t = text::ascii_lower(text::trim(d));
    while (!t.empty() && t.back() == '.') t.pop_back();
    if (!t.empty()) domains.insert(std::move(t));
  }
  e.domains = std::move(domains);
  return e;
}

KnowledgeBase KnowledgeBase::build(std::vector<KbEntry> entries) {
  std::vector<std::string> problems;
  for (auto& e : entries) e = canonicalize(std::move(e));

  std::size_t internal_count = 0;
  bool internal_id_used = false;
  for (const auto& e : entries) {
    internal_count += e.internal ? 1 : 0;
    internal_id_used |= e.id == kInternalId;
    if (e.id.empty()) problems.push_back("entry with empty id");
    if (e.internal && !e.domains.empty())
      problems.push_back("internal entry '" + e.id + "' must not list domains");
  }
  if (internal_count > 1) problems.push_back("more than one internal entry");
  if (internal_count == 0 && internal_id_used)
    problems.push_back("id 'internal' is reserved for the internal identity");

  KnowledgeBase kb;
  std::sort(entries.begin(), entries.end(),
            [](const KbEntry& a, const KbEntry& b) { return a.id < b.id; });
  for (std::size_t i = 0; i + 1 < entries.size(); ++i)
    if (entries[i].id == entries[i + 1].id) problems.push_back("duplicate id '" + entries[i].id + "'");

  std::unordered_map<std::string, std::size_t> owner;
  std::map<std::string, std::set<std::string>> collisions;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (const auto& a : entries[i].aliases) {
      const auto key = text::fold_key(a);
      auto [it, inserted] = owner.emplace(key, i);
      if (!inserted && entries[it->second].id != entries[i].id) {
        collisions[a].insert(entries[it->second].id);
        collisions[a].insert(entries[i].id);
      }
    }
  }
  for (const auto& [alias, ids] : collisions) {
    std::string msg = "alias \"" + alias + "\" shared by";
    for (const auto& id : ids) msg += " " + id;
    problems.push_back(msg);
  }
  if (!problems.empty()) {
    std::string what = "knowledge base invalid: " + problems.front();
    if (problems.size() > 1) what += " (+" + std::to_string(problems.size() - 1) + " more)";
    throw KbError(what, problems);
  }

  if (internal_count == 0) {
    KbEntry in = internal_default(owner);
    auto pos = std::lower_bound(entries.begin(), entries.end(), in.id,
                                [](const KbEntry& e, const std::string& id) { return e.id < id; });
    entries.insert(pos, std::move(in));
  }

  kb.entries_ = std::move(entries);
  for (std::size_t i = 0; i < kb.entries_.size(); ++i) {
    const auto& e = kb.entries_[i];
    kb.id_index_.emplace(e.id, i);
    if (e.internal) kb.internal_index_ = i;
    for (const auto& a : e.aliases) kb.alias_index_.emplace(text::fold_key(a), i);
  }
  return kb;
}

const KbEntry* KnowledgeBase::find(std::string_view id) const {
  auto it = id_index_.find(std::string(id));
  return it == id_index_.end() ? nullptr : &entries_[it->second];
}

const KbEntry* KnowledgeBase::resolve_alias(std::string_view alias) const {
  auto it = alias_index_.find(text::fold_key(alias));
  return it == alias_index_.end() ? nullptr : &entries_[it->second];
}

std::vector<KbEntry> parse_kb_entries(std::istream& in, std::string_view source) {
  std::vector<KbEntry> out;
  std::vector<std::string> problems;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::runtime_error("not a JSON object");
      KbEntry e;
      e.id = j.at("id").get<std::string>();
      e.name = j.value("name", std::string());
      if (j.contains("aliases")) e.aliases = j.at("aliases").get<std::vector<std::string>>();
      if (j.contains("domains"))
        for (const auto& d : j.at("domains")) e.domains.insert(d.get<std::string>());
      e.internal = j.value("internal", false);
      out.push_back(std::move(e));
    } catch (const std::exception& e) {
      problems.push_back(where + ": " + e.what());
    }
  }
  if (!problems.empty()) throw KbError("malformed knowledge base line " + problems.front(), problems);
  return out;
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KbError("cannot open knowledge base " + path.string(), {});
  return KnowledgeBase::build(parse_kb_entries(in, path.string()));
}

std::string serialize_entry(const KbEntry& e) {
  ordered_json j;
  j["id"] = e.id;
  j["name"] = e.name;
  j["aliases"] = e.aliases;
  j["domains"] = std::vector<std::string>(e.domains.begin(), e.domains.end());
  j["internal"] = e.internal;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string serialize_kb(const KnowledgeBase& kb) {
  std::string out;
  for (const auto& e : kb.entries()) out += serialize_entry(e) + '\n';
  return out;
}

void save_kb(const KnowledgeBase& kb, std::ostream& out) { out << serialize_kb(kb); }

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_kb(kb, out);
}

DomainLookup lookup_domains(const KnowledgeBase& kb, std::string_view identity_id) {
  const auto* e = kb.find(identity_id);
  if (!e) throw std::out_of_range("unknown identity '" + std::string(identity_id) + "'");
  return {e->domains, e->internal};
}

std::vector<KbDiagnostic> validate_entries(const std::vector<KbEntry>& entries,
                                           const ingest::PublicSuffixList& psl) {
  std::vector<KbDiagnostic> diags;
  auto add = [&](Severity s, const std::string& id, std::string msg, std::string sugg = {}) {
    diags.push_back({s, id, std::move(msg), std::move(sugg)});
  };
  std::map<std::string, std::size_t> id_count;
  std::map<std::string, std::set<std::string>> alias_owners;
  for (const auto& e : entries) {
    ++id_count[e.id];
    if (e.id.empty()) add(Severity::kError, e.id, "empty id");
    if (!e.internal && e.domains.empty()) add(Severity::kError, e.id, "non-internal entry has no domains");
    if (e.internal && !e.domains.empty()) add(Severity::kError, e.id, "internal entry lists domains");
    if (e.aliases.empty() && text::trim(e.name).empty()) add(Severity::kError, e.id, "no aliases");
    std::set<std::string> own;
    for (const auto& a : e.aliases) {
      const auto key = text::fold_key(a);
      if (key.empty()) {
        add(Severity::kWarning, e.id, "empty alias");
        continue;
      }
      if (!own.insert(key).second) add(Severity::kWarning, e.id, "duplicate alias \"" + a + "\"");
      alias_owners[key].insert(e.id);
    }
    for (const auto& d : e.domains) {
      const auto lower = text::ascii_lower(d);
      const auto reg = psl.registrable_domain(lower);
      if (!reg)
        add(Severity::kError, e.id, "domain \"" + d + "\" has no registrable form");
      else if (*reg != lower)
        add(Severity::kWarning, e.id, "domain \"" + d + "\" is not in registrable form", *reg);
    }
  }
  for (const auto& [id, n] : id_count)
    if (n > 1) add(Severity::kError, id, "duplicate entry id");
  for (const auto& [alias, ids] : alias_owners) {
    if (ids.size() < 2) continue;
    std::string who;
    for (const auto& id : ids) who += (who.empty() ? "" : ", ") + id;
    add(Severity::kError, *ids.begin(), "alias \"" + alias + "\" collides across " + who);
  }
  return diags;
}

std::vector<KbDiagnostic> validate_kb(const KnowledgeBase& kb, const ingest::PublicSuffixList& psl) {
  return validate_entries(kb.entries(), psl);
}

bool has_errors(const std::vector<KbDiagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const KbDiagnostic& d) { return d.severity == Severity::kError; });
}

KnowledgeBase add_entry(const KnowledgeBase& kb, KbEntry entry) {
  std::vector<KbEntry> entries = kb.entries();
  entries.push_back(std::move(entry));
  return KnowledgeBase::build(std::move(entries));
}

}  // namespace refmail::kb
