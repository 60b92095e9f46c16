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

#include "refmail/spearmail/prompts.hpp"

namespace refmail::spearmail {

std::string fill_slots(std::string_view tmpl, std::initializer_list<Slot> slots) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl[pos] == '{') {
      const auto close = tmpl.find('}', pos);
      if (close != std::string_view::npos) {
        const auto name = tmpl.substr(pos + 1, close - pos - 1);
        const Slot* hit = nullptr;
        for (const auto& s : slots)
          if (s.name == name) hit = &s;
        if (hit) {
          out.append(hit->value);
          pos = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[pos++]);
  }
  return out;
}

std::string interest_prompt(std::string_view profile, std::size_t m) {
  const auto count = std::to_string(m);
  return fill_slots(kInterestTemplate, {{"profile", profile}, {"m", count}});
}

std::string activity_prompt(std::string_view interest, std::size_t n) {
  const auto count = std::to_string(n);
  return fill_slots(kActivityTemplate, {{"interest", interest}, {"n", count}});
}

std::string format_pair(std::string_view activity, std::string_view organization) {
  return "Activity: " + std::string(activity) + "; Organization: " + std::string(organization);
}

std::string email_prompt(std::string_view profile, std::string_view interest,
                         std::string_view activity, std::string_view organization) {
  const auto pair = format_pair(activity, organization);
  return fill_slots(kEmailTemplate,
                    {{"profile", profile}, {"interest", interest}, {"activity-organization pair", pair}});
}

}  // namespace refmail::spearmail
