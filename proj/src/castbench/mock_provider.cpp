// Copyright 2026 The castbench Authors.
//
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

#include "castbench/mock_provider.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <fmt/format.h>

#include "castbench/assets.hpp"
#include "castbench/error.hpp"
#include "castbench/matcher.hpp"
#include "castbench/prompts.hpp"
#include "castbench/rng.hpp"
#include "castbench/text.hpp"

namespace castbench {

std::string_view to_string(MockScenario s) {
  switch (s) {
    case MockScenario::kUnconstrained: return "unconstrained";
    case MockScenario::kRelevantIntermediate: return "relevant_intermediate";
    case MockScenario::kIrrelevantIntermediate: return "irrelevant_intermediate";
    case MockScenario::kCastLike: return "cast_like";
  }
  return "cast_like";
}

MockScenario parse_mock_scenario(std::string_view s) {
  for (auto v : {MockScenario::kUnconstrained, MockScenario::kRelevantIntermediate,
                 MockScenario::kIrrelevantIntermediate, MockScenario::kCastLike}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::kConfig, fmt::format("unknown mock scenario '{}'", s));
}

void MockConfig::validate() const {
  for (double p : {p_reorder, p_paraphrase, p_topic_jitter, p_malformed}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kConfig, fmt::format("mock probability {} outside [0, 1]", p));
    }
  }
}

std::shared_ptr<const MockFixtures> MockFixtures::builtin() {
  static const auto fixtures = from_json(Json::parse(assets::get("mock_answer_bank.json")),
                                         Json::parse(assets::get("mock_synonyms.json")));
  return fixtures;
}

std::shared_ptr<const MockFixtures> MockFixtures::from_json(const Json& answer_bank,
                                                            const Json& synonyms) {
  auto f = std::make_shared<MockFixtures>();
  f->answer_bank = answer_bank;
  f->synonyms = synonyms;
  f->version = answer_bank.value("version", "0") + "/" + synonyms.value("version", "0");
  return f;
}

namespace {

// Relative strength of each perturbation per scenario.
struct Profile {
  double reorder;
  double paraphrase;
  double jitter;
  double verbosity;
};

Profile profile(MockScenario s) {
  switch (s) {
    case MockScenario::kCastLike: return {0.0, 0.25, 0.0, 0.1};
    case MockScenario::kRelevantIntermediate: return {0.5, 0.5, 0.5, 0.5};
    case MockScenario::kUnconstrained: return {1.0, 1.0, 1.0, 1.0};
    case MockScenario::kIrrelevantIntermediate: return {1.0, 1.0, 1.0, 1.5};
  }
  return {1.0, 1.0, 1.0, 1.0};
}

struct CanonicalBullet {
  std::string title;
  std::string description;
  std::vector<std::string> topic_words;
  std::vector<std::size_t> items;
};

struct Canonical {
  std::string domain;
  std::vector<std::string> top_words;
  std::vector<CanonicalBullet> bullets;
  std::vector<std::string> tags;
};

struct Request {
  std::string query;
  std::string language;
  std::string column;
  std::vector<std::string> items;
};

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a", "an", "the", "and", "or", "but", "if", "of", "to", "in", "on", "at", "for", "with",
      "by", "from", "is", "are", "was", "were", "be", "been", "it", "its", "this", "that", "these",
      "those", "i", "me", "my", "we", "our", "you", "your", "they", "their", "he", "she", "his",
      "her", "them", "as", "so", "too", "very", "not", "no", "do", "does", "did", "have", "has",
      "had", "will", "would", "can", "could", "should", "just", "all", "any", "some", "more",
      "most", "when", "what", "which", "who", "how", "there", "here", "than", "then", "out", "up",
      "about", "into", "over", "after", "before", "again", "every", "each", "also", "only", "still",
      "am", "s", "t", "get", "got", "one", "two"};
  return words;
}

const std::map<std::string, int>& sentiment_lexicon() {
  static const std::map<std::string, int> words = {
      {"great", 1},  {"love", 1},     {"excellent", 1}, {"good", 1},      {"friendly", 1},
      {"nice", 1},   {"beautiful", 1}, {"relaxing", 1}, {"reasonable", 1}, {"helpful", 1},
      {"fast", 1},   {"easy", 1},     {"amazing", 1},   {"perfect", 1},    {"value", 1},
      {"bad", -1},   {"cold", -1},    {"lukewarm", -1}, {"overcooked", -1}, {"slow", -1},
      {"crash", -1}, {"crashes", -1}, {"failed", -1},   {"charged", -1},   {"broken", -1},
      {"high", -1},  {"waited", -1},  {"terrible", -1}, {"poor", -1},      {"hurt", -1},
      {"inconsistent", -1}, {"annoying", -1}, {"bug", -1}, {"bugs", -1}};
  return words;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string strip_index(const std::string& item) {
  if (item.size() > 2 && item[0] == '[') {
    const auto close = item.find("] ");
    if (close != std::string::npos) return item.substr(close + 2);
  }
  return item;
}

Request read_request(const PromptSpec& prompt) {
  Request r;
  const Json& p = prompt.input_payload;
  if (!p.is_object()) return r;
  r.query = p.value("UserQuery", "");
  r.language = p.value("QueryLanguage", "en_US");
  r.column = p.value("ColumnName", "");
  if (p.contains("TextItems") && p["TextItems"].is_array()) {
    for (const auto& i : p["TextItems"]) {
      r.items.push_back(strip_index(i.is_string() ? i.get<std::string>() : i.dump()));
    }
  }
  return r;
}

std::string query_key(std::string_view query) {
  std::string q = text::normalize(query);
  while (!q.empty() && (q.back() == '.' || q.back() == '?' || q.back() == '!')) q.pop_back();
  return text::trim(q);
}

// Content words ranked by how many items mention them, ties alphabetically.
std::vector<std::pair<std::string, std::vector<std::size_t>>> keywords(
    const std::vector<std::string>& items) {
  std::map<std::string, std::vector<std::size_t>> where;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::set<std::string> seen;
    for (const auto& t : text::tokens(items[i])) {
      if (t.size() < 3 || stopwords().count(t) ||
          std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
        continue;
      }
      if (seen.insert(t).second) where[t].push_back(i + 1);
    }
  }
  std::vector<std::pair<std::string, std::vector<std::size_t>>> ranked(where.begin(), where.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second.size() > b.second.size();
  });
  return ranked;
}

std::string first_words(const std::string& s, std::size_t n) {
  const auto toks = text::tokens(s);
  std::vector<std::string> head(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(std::min(n, toks.size())));
  return text::join(head, " ");
}

bool mentions_sentiment(std::string_view query) {
  return query.find("sentiment") != std::string_view::npos || query.find("Sentiment") != std::string_view::npos;
}

Canonical synthesize(const Request& r, const std::string& dataset_id) {
  Canonical c;
  c.domain = r.column.empty() ? capitalize(dataset_id) : capitalize(r.column) + " Analysis";
  const auto ranked = keywords(r.items);
  std::set<std::size_t> covered;
  for (const auto& [word, items] : ranked) {
    if (c.bullets.size() == 4) break;
    if (items.size() < 2 && !c.bullets.empty()) break;
    CanonicalBullet b;
    b.title = capitalize(word) + " Related Feedback";
    b.description = fmt::format("{} items mention {}, for example: {}.", items.size(), word,
                                first_words(r.items[items.front() - 1], 8));
    b.topic_words = {word};
    b.items = items;
    covered.insert(items.begin(), items.end());
    c.top_words.push_back(word);
    c.bullets.push_back(std::move(b));
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 1; i <= r.items.size(); ++i) {
    if (!covered.count(i)) rest.push_back(i);
  }
  if (!rest.empty()) {
    CanonicalBullet others;
    others.title = "Others";
    others.description = fmt::format("{} further items raise individual points.", rest.size());
    others.items = rest;
    c.bullets.push_back(std::move(others));
  }

  const bool sentiment = mentions_sentiment(r.query);
  for (const auto& item : r.items) {
    if (sentiment) {
      int score = 0;
      for (const auto& t : text::tokens(item)) {
        if (auto it = sentiment_lexicon().find(t); it != sentiment_lexicon().end()) score += it->second;
      }
      c.tags.push_back(score > 0 ? "Positive" : score < 0 ? "Negative" : "Neutral");
    } else {
      std::string tag = "Others";
      const auto toks = text::tokens(item);
      for (const auto& kw : c.top_words) {
        if (std::find(toks.begin(), toks.end(), kw) != toks.end()) {
          tag = capitalize(kw);
          break;
        }
      }
      c.tags.push_back(tag);
    }
  }
  return c;
}

Canonical canonical_answer(const PromptSpec& prompt, const Request& r, const MockFixtures& fx) {
  Canonical c = synthesize(r, prompt.dataset_id);
  if (!fx.answer_bank.is_object() || !fx.answer_bank.contains("entries")) return c;
  const Json& entries = fx.answer_bank["entries"];
  const Json* entry = nullptr;
  bool wildcard = false;
  for (const auto& key : {prompt.dataset_id + "|" + query_key(r.query), prompt.dataset_id + "|*"}) {
    if (entries.contains(key)) {
      entry = &entries[key];
      wildcard = key.back() == '*';
      break;
    }
  }
  if (entry == nullptr) return c;
  if (entry->contains("domain")) c.domain = (*entry)["domain"].get<std::string>();
  if (entry->contains("summary")) {
    c.bullets.clear();
    for (const auto& b : (*entry)["summary"]) {
      c.bullets.push_back({b.value("Title", ""), b.value("Description", ""),
                           b.value("TopicWords", std::vector<std::string>{}),
                           b.value("Items", std::vector<std::size_t>{})});
    }
    if (entry->contains("top_words")) {
      c.top_words = (*entry)["top_words"].get<std::vector<std::string>>();
    }
  }
  // Dataset-wide topic tags do not answer a sentiment query.
  const bool use_tags = !(wildcard && mentions_sentiment(r.query));
  if (use_tags && entry->contains("tags") && (*entry)["tags"].size() == r.items.size()) {
    c.tags = (*entry)["tags"].get<std::vector<std::string>>();
  }
  return c;
}

std::uint32_t prompt_hash(const PromptSpec& prompt) {
  return static_cast<std::uint32_t>(std::stoul(text::sha256_hex(prompt.rendered_text).substr(0, 8), nullptr, 16));
}

Rng make_rng(const MockConfig& cfg, std::size_t run_index, const PromptSpec& prompt,
             std::uint32_t stream) {
  return Rng{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
             static_cast<std::uint32_t>(run_index), prompt_hash(prompt), stream};
}

std::string paraphrase(const std::string& s, const Json& words) {
  std::string out;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    std::string lower = word;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (words.contains(lower)) {
      std::string repl = words[lower].get<std::string>();
      if (std::isupper(static_cast<unsigned char>(word[0]))) repl = capitalize(repl);
      out += repl;
    } else {
      out += word;
    }
    word.clear();
  };
  for (char ch : s) {
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      word.push_back(ch);
    } else {
      flush();
      out.push_back(ch);
    }
  }
  flush();
  return out;
}

std::string lookup_or(const Json& table, const std::string& key, const std::string& fallback) {
  if (table.is_object() && table.contains(key) && table[key].is_string()) {
    return table[key].get<std::string>();
  }
  return fallback;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.below(v.size())];
}

std::string malformed(Rng& rng, const Json& doc) {
  if (rng.bernoulli(0.5)) {
    return "Here is my analysis of the items. The main themes are listed below, but I could not "
           "finish formatting them as requested.";
  }
  const std::string full = doc.dump();
  const auto cut = full.find('}');
  return full.substr(0, std::min(cut, full.size() / 2));
}

const std::vector<std::string>& unconstrained_fields() {
  static const std::vector<std::string> fields = {"Reasoning", "Domain",       "Perspective",
                                                  "Plan",      "Observations", "Themes"};
  return fields;
}

const std::vector<std::string>& irrelevant_fields() {
  static const std::vector<std::string> fields = {"Mood", "WritingStyle", "ReaderProfile",
                                                  "Weather", "Audience"};
  return fields;
}

std::vector<std::string> irrelevant_values() {
  return {"cheerful", "formal", "curious", "sunny", "casual", "neutral", "playful"};
}

std::vector<std::string> topic_subset(Rng& rng, const std::vector<std::string>& topics) {
  std::vector<std::string> out;
  for (const auto& t : topics) {
    if (rng.bernoulli(0.6)) out.push_back(t);
  }
  if (out.empty() && !topics.empty()) out.push_back(pick(rng, topics));
  return out;
}

std::string tagging_mode_for(const PromptSpec& prompt, const Request& r) {
  if (prompt.task == Task::kTagJoint) return "Joint";
  if (prompt.task == Task::kTagIndependent) return "Independent";
  const std::string q = text::normalize(r.query);
  for (const char* cue : {"rank", "compare", "consistent", "relative"}) {
    if (q.find(cue) != std::string::npos) return "Joint";
  }
  return "Independent";
}

std::vector<std::string> schema_of(const std::vector<std::string>& tags) {
  std::set<std::string> unique(tags.begin(), tags.end());
  return {unique.begin(), unique.end()};
}

void add_free_fields(Json& doc, Rng& rng, const std::vector<std::string>& pool, const Canonical& c,
                     const MockFixtures& fx, const Request& r, const std::string& mode) {
  std::vector<std::string> fields = pool;
  rng.shuffle(std::span<std::string>(fields));
  fields.resize(1 + rng.below(std::min<std::size_t>(4, fields.size())));
  std::vector<std::string> titles;
  for (const auto& b : c.bullets) titles.push_back(b.title);
  for (const auto& f : fields) {
    if (f == "Reasoning") {
      doc[f] = "I read every item and looked for recurring themes.";
    } else if (f == "Domain") {
      const std::vector<std::string> options = {
          c.domain, lookup_or(fx.synonyms.value("domains", Json::object()), c.domain, c.domain),
          "General Feedback"};
      doc[f] = pick(rng, options);
    } else if (f == "Perspective") {
      const auto topics = topic_subset(rng, c.top_words);
      doc[f] = Json{{"NumTopics", topics.size()}, {"TopWords", topics}};
    } else if (f == "Plan") {
      doc[f] = "Group similar items, then describe each group.";
    } else if (f == "Observations") {
      Json obs = Json::array();
      for (int k = 0; k < 2 && !r.items.empty(); ++k) obs.push_back(first_words(pick(rng, r.items), 6));
      doc[f] = std::move(obs);
    } else if (f == "Themes") {
      doc[f] = topic_subset(rng, titles);
    } else if (f == "TaggingMode") {
      doc[f] = rng.bernoulli(0.5) ? mode : std::string(mode == "Joint" ? "Independent" : "Joint");
    } else if (f == "TagSchema") {
      doc[f] = topic_subset(rng, schema_of(c.tags));
    }
  }
}

void add_irrelevant_field(Json& doc, Rng& rng) {
  doc[pick(rng, irrelevant_fields())] = pick(rng, irrelevant_values());
}

std::string generate_summary(const PromptSpec& prompt, const MockConfig& cfg, std::size_t run,
                             const MockFixtures& fx) {
  const Request r = read_request(prompt);
  const Canonical c = canonical_answer(prompt, r, fx);
  const Profile pf = profile(cfg.scenario);
  Rng rng = make_rng(cfg, run, prompt, 1);
  const bool broken = rng.bernoulli(cfg.p_malformed);
  const QueryConstraints qc = decompose_query(r.query);

  std::vector<CanonicalBullet> bullets = c.bullets;
  const bool respect_limit = cfg.scenario == MockScenario::kCastLike || rng.bernoulli(0.5);
  if (respect_limit && qc.max_bullets && bullets.size() > *qc.max_bullets) {
    std::vector<CanonicalBullet> kept;
    std::optional<CanonicalBullet> others;
    for (auto& b : bullets) {
      if (is_others_title(b.title)) {
        others = b;
      } else {
        kept.push_back(b);
      }
    }
    const std::size_t limit = std::max<std::size_t>(1, *qc.max_bullets);
    kept.resize(std::min(kept.size(), others ? limit - 1 : limit));
    if (others && kept.size() < limit) kept.push_back(*others);
    bullets = std::move(kept);
  }

  if (rng.bernoulli(cfg.p_topic_jitter * pf.jitter)) {
    const bool drop = rng.bernoulli(0.5);
    auto last_regular = std::find_if(bullets.rbegin(), bullets.rend(),
                                     [](const CanonicalBullet& b) { return !is_others_title(b.title); });
    if (drop && bullets.size() > 1 && last_regular != bullets.rend()) {
      bullets.erase(std::next(last_regular).base());
    } else if (!r.items.empty()) {
      const std::size_t item = rng.below(r.items.size());
      CanonicalBullet extra;
      extra.title = "Additional Remarks";
      extra.description = "Some items add remarks such as: " + first_words(r.items[item], 8) + ".";
      const auto toks = text::tokens(r.items[item]);
      if (!toks.empty()) extra.topic_words = {toks.front()};
      extra.items = {item + 1};
      auto others = std::find_if(bullets.begin(), bullets.end(),
                                 [](const CanonicalBullet& b) { return is_others_title(b.title); });
      bullets.insert(others, std::move(extra));
    }
  }

  const Json words = fx.synonyms.value("words", Json::object());
  for (auto& b : bullets) {
    if (rng.bernoulli(cfg.p_paraphrase * pf.paraphrase)) {
      b.description = paraphrase(b.description, words);
      if (cfg.scenario != MockScenario::kCastLike) {
        b.title = paraphrase(b.title, words);
        for (auto& w : b.topic_words) w = paraphrase(w, words);
      }
    }
    if (!r.items.empty() && rng.bernoulli(std::min(1.0, cfg.p_paraphrase * 0.5 * pf.verbosity))) {
      b.description += " For instance: \"" + first_words(pick(rng, r.items), 10) + "\".";
    }
  }

  if (rng.bernoulli(cfg.p_reorder * pf.reorder)) {
    rng.shuffle(std::span<CanonicalBullet>(bullets));
  }

  Json doc;
  doc["TaskType"] = "Summary";
  doc["OutputLanguage"] = qc.output_language.value_or(r.language);
  doc["ColumnName"] = r.column;
  switch (cfg.scenario) {
    case MockScenario::kCastLike:
      doc["Domain"] = c.domain;
      doc["Perspective"] = Json{{"NumTopics", c.top_words.size()}, {"TopWords", c.top_words}};
      break;
    case MockScenario::kRelevantIntermediate: {
      doc["Domain"] = rng.bernoulli(0.3)
                          ? lookup_or(fx.synonyms.value("domains", Json::object()), c.domain, c.domain)
                          : c.domain;
      const auto topics = rng.bernoulli(0.5) ? topic_subset(rng, c.top_words) : c.top_words;
      doc["Perspective"] = Json{{"NumTopics", topics.size()}, {"TopWords", topics}};
      break;
    }
    case MockScenario::kIrrelevantIntermediate:
      add_irrelevant_field(doc, rng);
      break;
    case MockScenario::kUnconstrained:
      add_free_fields(doc, rng, unconstrained_fields(), c, fx, r, "");
      break;
  }
  Json results = Json::array();
  for (const auto& b : bullets) {
    results.push_back(
        Json{{"Title", b.title}, {"Description", b.description}, {"TopicWords", b.topic_words}});
  }
  doc["Results"] = std::move(results);
  if (broken) return malformed(rng, doc);
  return doc.dump(2, ' ', false, Json::error_handler_t::replace);
}

std::string generate_tags(const PromptSpec& prompt, const MockConfig& cfg, std::size_t run,
                          const MockFixtures& fx) {
  const Request r = read_request(prompt);
  const Canonical c = canonical_answer(prompt, r, fx);
  const Profile pf = profile(cfg.scenario);
  Rng rng = make_rng(cfg, run, prompt, 2);
  const bool broken = rng.bernoulli(cfg.p_malformed);
  const std::string mode = tagging_mode_for(prompt, r);
  const auto schema = schema_of(c.tags);

  std::vector<std::string> tags = c.tags;
  const Json tag_synonyms = fx.synonyms.value("tags", Json::object());
  for (auto& t : tags) {
    if (rng.bernoulli(cfg.p_paraphrase * pf.paraphrase)) t = lookup_or(tag_synonyms, t, t);
  }
  if (!tags.empty() && schema.size() >= 2 && rng.bernoulli(cfg.p_topic_jitter * pf.jitter)) {
    const std::size_t i = rng.below(tags.size());
    std::vector<std::string> others;
    for (const auto& s : schema) {
      if (s != c.tags[i]) others.push_back(s);
    }
    tags[i] = pick(rng, others);
  }
  Json entries = Json::array();
  for (std::size_t i = 0; i < tags.size(); ++i) entries.push_back(Json{{"Index", i + 1}, {"Tag", tags[i]}});
  if (rng.bernoulli(cfg.p_reorder * pf.reorder)) {
    std::vector<Json> shuffled(entries.begin(), entries.end());
    rng.shuffle(std::span<Json>(shuffled));
    entries = Json(shuffled);
  }

  Json doc;
  doc["TaskType"] = "Tagging";
  switch (cfg.scenario) {
    case MockScenario::kCastLike:
      doc["TaggingMode"] = mode;
      doc["Domain"] = c.domain;
      doc["TagSchema"] = schema;
      break;
    case MockScenario::kRelevantIntermediate:
      doc["TaggingMode"] = mode;
      doc["Domain"] = rng.bernoulli(0.3) ? lookup_or(fx.synonyms.value("domains", Json::object()),
                                                     c.domain, c.domain)
                                         : c.domain;
      doc["TagSchema"] = rng.bernoulli(0.5) ? topic_subset(rng, schema) : schema;
      break;
    case MockScenario::kIrrelevantIntermediate:
      add_irrelevant_field(doc, rng);
      break;
    case MockScenario::kUnconstrained:
      add_free_fields(doc, rng, {"Reasoning", "Domain", "TaggingMode", "TagSchema", "Plan"}, c, fx, r,
                      mode);
      break;
  }
  doc["Tags"] = std::move(entries);
  if (broken) return malformed(rng, doc);
  return doc.dump(2, ' ', false, Json::error_handler_t::replace);
}

BulletItem bullet_from(const Json& j) {
  BulletItem b;
  if (!j.is_object()) return b;
  b.title = j.value("Title", "");
  b.description = j.value("Description", "");
  b.topic_words = j.value("TopicWords", std::vector<std::string>{});
  return b;
}

std::string judge_clusters(const PromptSpec& prompt) {
  const auto tags = prompt.input_payload.value("Tags", std::vector<std::string>{});
  std::vector<RunTag> run_tags;
  for (std::size_t i = 0; i < tags.size(); ++i) run_tags.push_back({i, tags[i]});
  const auto result = LexicalClusterer().cluster(run_tags);
  Json clusters = Json::array();
  for (const auto& c : result.clusters) {
    Json members = Json::array();
    for (const auto& m : c.members) members.push_back(m.run_index);
    clusters.push_back(std::move(members));
  }
  return Json{{"Clusters", std::move(clusters)}}.dump();
}

}  // namespace

std::string mock_generate(const PromptSpec& prompt, const MockConfig& cfg, std::size_t run_index,
                          const MockFixtures& fixtures) {
  cfg.validate();
  switch (prompt.task) {
    case Task::kJudgeSimilarity: {
      const Json& p = prompt.input_payload;
      const double s = LexicalJudge().score(bullet_from(p.value("Left", Json())),
                                            bullet_from(p.value("Right", Json())));
      return fmt::format("{:.4f}", s);
    }
    case Task::kJudgeClusters:
      return judge_clusters(prompt);
    case Task::kRepair:
      return prompt.input_payload.value("Document", Json::object())
          .dump(2, ' ', false, Json::error_handler_t::replace);
    case Task::kSummarize:
      return generate_summary(prompt, cfg, run_index, fixtures);
    case Task::kTag:
    case Task::kTagIndependent:
    case Task::kTagJoint:
      return generate_tags(prompt, cfg, run_index, fixtures);
  }
  return {};
}

double mock_latency(const PromptSpec& prompt, const MockConfig& cfg, std::size_t run_index,
                    std::string_view response) {
  Rng rng = make_rng(cfg, run_index, prompt, 7);
  return 0.5 + 0.002 * static_cast<double>(text::word_count(response)) + 0.5 * rng.uniform();
}

MockProvider::MockProvider(MockConfig cfg, std::shared_ptr<const MockFixtures> fixtures, std::string id)
    : cfg_(cfg), fixtures_(std::move(fixtures)), id_(std::move(id)) {
  cfg_.validate();
  require(fixtures_ != nullptr, "MockProvider: fixtures are required");
}

CompletionResult MockProvider::complete(const PromptSpec& prompt, const DecodeParams& /*params*/,
                                        std::size_t sample_index) {
  CompletionResult out;
  out.text = mock_generate(prompt, cfg_, sample_index, *fixtures_);
  out.latency_s = mock_latency(prompt, cfg_, sample_index, out.text);
  out.provider = id_;
  out.attempt_count = 1;
  return out;
}

}  // namespace castbench
