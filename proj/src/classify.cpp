#include "abma/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "abma/error.hpp"
#include "abma/random.hpp"

namespace abma::classify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_token_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

double sigmoid(double m) {
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  double e = std::exp(m);
  return e / (1.0 + e);
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

struct Instance {
  std::vector<std::uint32_t> features;
  int label = -1;  // +1 or -1
};

/// NB-weighted L2-regularized L2-loss linear SVM solved by dual coordinate
/// descent, followed by interpolation towards the mean weight magnitude.
LinearHead train_head(const std::vector<Instance>& data, std::size_t vocab, const BaselineConfig& cfg,
                      std::uint64_t seed) {
  LinearHead head;
  std::size_t positives = 0;
  for (const auto& d : data) positives += d.label > 0;
  if (positives == 0 || positives == data.size()) {
    head.constant_score = data.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(data.size());
    return head;
  }

  std::vector<double> p(vocab, cfg.alpha);
  std::vector<double> q(vocab, cfg.alpha);
  for (const auto& d : data)
    for (auto f : d.features) (d.label > 0 ? p : q)[f] += 1.0;
  const double p_norm = std::accumulate(p.begin(), p.end(), 0.0);
  const double q_norm = std::accumulate(q.begin(), q.end(), 0.0);
  std::vector<double> ratio(vocab);
  for (std::size_t j = 0; j < vocab; ++j) ratio[j] = std::log((p[j] / p_norm) / (q[j] / q_norm));

  const double diag = 0.5 / cfg.c;
  std::vector<double> w(vocab, 0.0);
  double bias = 0.0;
  std::vector<double> alpha(data.size(), 0.0);
  std::vector<double> qd(data.size(), diag + 1.0);  // bias feature contributes 1
  for (std::size_t i = 0; i < data.size(); ++i)
    for (auto f : data[i].features) qd[i] += ratio[f] * ratio[f];

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double pg_max = -kInf;
    double pg_min = kInf;
    for (auto i : order) {
      const auto& d = data[i];
      double wx = bias;
      for (auto f : d.features) wx += w[f] * ratio[f];
      const double y = d.label;
      const double g = y * wx - 1.0 + diag * alpha[i];
      const double pg = alpha[i] == 0.0 ? std::min(g, 0.0) : g;
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::max(alpha[i] - g / qd[i], 0.0);
        const double step = (alpha[i] - old) * y;
        for (auto f : d.features) w[f] += step * ratio[f];
        bias += step;
      }
    }
    if (pg_max - pg_min <= cfg.tolerance) break;
  }

  double mean_abs = 0.0;
  for (double v : w) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(vocab);
  head.weights.resize(vocab);
  for (std::size_t j = 0; j < vocab; ++j) head.weights[j] = ((1.0 - cfg.beta) * mean_abs + cfg.beta * w[j]) * ratio[j];
  head.bias = cfg.beta * bias;  // scaled with the weights so the margin stays a blend of SVM and NB terms
  return head;
}

/// Softmax over head margins; constant heads contribute logit(prior).
std::array<double, kMaturityCount> maturity_distribution(const std::array<double, kMaturityCount>& margins) {
  std::array<double, kMaturityCount> dist{};
  std::size_t infinite = 0;
  for (double m : margins) infinite += (m == kInf);
  if (infinite > 0) {
    for (std::size_t k = 0; k < kMaturityCount; ++k) dist[k] = margins[k] == kInf ? 1.0 / infinite : 0.0;
    return dist;
  }
  double top = -kInf;
  for (double m : margins) top = std::max(top, m);
  double total = 0.0;
  for (std::size_t k = 0; k < kMaturityCount; ++k) {
    dist[k] = margins[k] == -kInf ? 0.0 : std::exp(margins[k] - top);
    total += dist[k];
  }
  for (auto& v : dist) v /= total;
  return dist;
}

double logit(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return std::log(p / (1.0 - p));
}

void compute_rates(LabelMetrics& m) {
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  m.precision = ratio(m.true_positives, m.true_positives + m.false_positives);
  m.recall = ratio(m.true_positives, m.true_positives + m.false_negatives);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
}

void weight(TaskMetrics& t) {
  double total = 0.0;
  double p = 0.0, r = 0.0, f = 0.0;
  for (const auto& l : t.labels) {
    const auto s = static_cast<double>(l.support);
    total += s;
    p += s * l.precision;
    r += s * l.recall;
    f += s * l.f1;
  }
  if (total > 0.0) {
    t.precision = p / total;
    t.recall = r / total;
    t.f1 = f / total;
  }
}

io::json task_json(const TaskMetrics& t) {
  io::json labels = io::json::array();
  for (const auto& l : t.labels)
    labels.push_back({{"label", l.label},
                      {"support", l.support},
                      {"precision", l.precision},
                      {"recall", l.recall},
                      {"f1", l.f1}});
  return {{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1}, {"labels", labels}};
}

io::json head_json(const LinearHead& h) {
  io::json j;
  if (h.constant_score) {
    j["constant_score"] = *h.constant_score;
  } else {
    j["bias"] = h.bias;
    j["weights"] = h.weights;
  }
  return j;
}

LinearHead head_from_json(const io::json& j) {
  LinearHead h;
  if (j.contains("constant_score")) {
    h.constant_score = j.at("constant_score").get<double>();
  } else {
    h.bias = j.at("bias").get<double>();
    h.weights = j.at("weights").get<std::vector<double>>();
  }
  return h;
}

}  // namespace

std::vector<LabeledExample> parse_labeled(std::string_view jsonl) {
  std::vector<LabeledExample> out;
  std::set<std::string> seen;
  for (const auto& [line, j] : io::parse_jsonl(jsonl)) {
    auto where = line_prefix(line);
    LabeledExample ex;
    try {
      ex.doc_id = j.at("doc_id").get<std::string>();
      ex.text = j.at("text").get<std::string>();
      bool negative = j.contains("negative") && j.at("negative").get<bool>();
      if (j.contains("aspects")) {
        for (const auto& a : j.at("aspects")) {
          auto aspect = parse_aspect(a.get<std::string>());
          if (!aspect) throw DataError(where + "unknown label '" + a.get<std::string>() + "'");
          ex.aspects.insert(*aspect);
        }
      }
      if (negative) {
        if (!ex.aspects.empty() || (j.contains("maturity") && !j.at("maturity").is_null()))
          throw DataError(where + "negative record must not carry aspects or maturity");
      } else {
        if (ex.aspects.empty()) throw DataError(where + "labelled record needs at least one aspect");
        auto m = maturity_from_value(j.at("maturity").get<long long>());
        if (!m) throw DataError(where + "maturity must be 1..4");
        ex.maturity = *m;
      }
    } catch (const io::json::exception& e) {
      throw DataError(where + "malformed labelled record: " + e.what());
    }
    if (!seen.insert(ex.doc_id).second) throw DataError(where + "duplicate doc_id " + ex.doc_id);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<LabeledExample> load_labeled(const std::filesystem::path& path) { return parse_labeled(io::read_file(path)); }

io::json to_json(const LabeledExample& ex) {
  io::json j = {{"doc_id", ex.doc_id}, {"text", ex.text}};
  if (ex.is_negative()) {
    j["negative"] = true;
  } else {
    io::json aspects = io::json::array();
    for (auto a : ex.aspects) aspects.push_back(std::string(name_of(a)));
    j["aspects"] = aspects;
    j["maturity"] = value_of(*ex.maturity);
  }
  return j;
}

DatasetSplit split_dataset(const std::vector<LabeledExample>& examples, std::uint64_t seed) {
  const std::size_t n = examples.size();
  if (n < 10) throw DataError("split_dataset needs at least 10 examples, got " + std::to_string(n));
  const std::size_t held = n / 10;
  DatasetSplit split;

  auto stratum = [&](std::size_t i) { return examples[i].maturity ? value_of(*examples[i].maturity) : 0; };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::set<int> strata;
  for (auto i : order) strata.insert(stratum(i));
  if (strata.size() > held) {
    split.warnings.push_back("fewer held-out examples (" + std::to_string(held) + ") than classes (" +
                             std::to_string(strata.size()) + "); split is unstratified");
  } else {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return stratum(a) < stratum(b); });
  }

  // Evenly spaced picks over the class-sorted order give each stratum its
  // proportional share of the held-out partition.
  auto take = [held](std::vector<std::size_t>& pool) {
    std::vector<std::size_t> picked;
    std::vector<bool> chosen(pool.size(), false);
    for (std::size_t i = 0; i < held; ++i) chosen[((2 * i + 1) * pool.size()) / (2 * held)] = true;
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < pool.size(); ++k) (chosen[k] ? picked : rest).push_back(pool[k]);
    pool = std::move(rest);
    std::sort(picked.begin(), picked.end());
    return picked;
  };
  auto test = take(order);
  auto validation = take(order);
  std::sort(order.begin(), order.end());
  for (auto i : order) split.train.push_back(examples[i]);
  for (auto i : validation) split.validation.push_back(examples[i]);
  for (auto i : test) split.test.push_back(examples[i]);
  return split;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_token_char(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

namespace {

std::vector<std::string> features_of(std::string_view text, bool bigrams) {
  auto words = tokenize(text);
  std::vector<std::string> out = words;
  if (bigrams)
    for (std::size_t i = 0; i + 1 < words.size(); ++i) out.push_back(words[i] + ' ' + words[i + 1]);
  return out;
}

}  // namespace

double LinearHead::margin(const std::vector<std::uint32_t>& features) const {
  if (constant_score) return logit(*constant_score);
  double m = bias;
  for (auto f : features) m += weights[f];
  return m;
}

std::vector<std::uint32_t> BaselineModel::featurize(std::string_view text) const {
  std::vector<std::uint32_t> ids;
  for (const auto& tok : features_of(text, config.bigrams)) {
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), tok);
    if (it != vocabulary.end() && *it == tok) ids.push_back(static_cast<std::uint32_t>(it - vocabulary.begin()));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

io::json BaselineModel::to_json() const {
  io::json aspects = io::json::object();
  for (std::size_t a = 0; a < kAspectCount; ++a) aspects[std::string(kAspectNames[a])] = head_json(aspect_heads[a]);
  io::json maturity = io::json::object();
  for (std::size_t k = 0; k < kMaturityCount; ++k) maturity[std::string(kMaturityNames[k])] = head_json(maturity_heads[k]);
  return {{"kind", "nbsvm"},
          {"config",
           {{"c", config.c},
            {"alpha", config.alpha},
            {"beta", config.beta},
            {"tolerance", config.tolerance},
            {"max_epochs", config.max_epochs},
            {"seed", config.seed},
            {"bigrams", config.bigrams}}},
          {"vocabulary", vocabulary},
          {"aspect_heads", aspects},
          {"maturity_heads", maturity},
          {"warnings", warnings}};
}

BaselineModel BaselineModel::from_json(const io::json& j) {
  try {
    BaselineModel m;
    const auto& c = j.at("config");
    m.config.c = c.at("c").get<double>();
    m.config.alpha = c.at("alpha").get<double>();
    m.config.beta = c.at("beta").get<double>();
    m.config.tolerance = c.at("tolerance").get<double>();
    m.config.max_epochs = c.at("max_epochs").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.bigrams = c.at("bigrams").get<bool>();
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    for (std::size_t a = 0; a < kAspectCount; ++a)
      m.aspect_heads[a] = head_from_json(j.at("aspect_heads").at(std::string(kAspectNames[a])));
    for (std::size_t k = 0; k < kMaturityCount; ++k)
      m.maturity_heads[k] = head_from_json(j.at("maturity_heads").at(std::string(kMaturityNames[k])));
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& h : m.aspect_heads)
      if (!h.constant_score && h.weights.size() != m.vocabulary.size()) throw DataError("model weight size mismatch");
    return m;
  } catch (const io::json::exception& e) {
    throw DataError(std::string("malformed baseline model: ") + e.what());
  }
}

BaselineModel train_baseline(const std::vector<LabeledExample>& train, const BaselineConfig& config) {
  if (train.empty()) throw DataError("training set is empty");
  BaselineModel model;
  model.config = config;

  std::set<std::string> vocab;
  std::vector<std::vector<std::string>> toks;
  toks.reserve(train.size());
  for (const auto& ex : train) {
    toks.push_back(features_of(ex.text, config.bigrams));
    vocab.insert(toks.back().begin(), toks.back().end());
  }
  model.vocabulary.assign(vocab.begin(), vocab.end());
  if (model.vocabulary.empty()) throw DataError("training texts contain no tokens");

  std::vector<std::vector<std::uint32_t>> feats;
  feats.reserve(train.size());
  for (const auto& ex : train) feats.push_back(model.featurize(ex.text));

  // Heads get independent seeds so training order does not couple them.
  for (std::size_t a = 0; a < kAspectCount; ++a) {
    std::vector<Instance> data;
    data.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
      data.push_back({feats[i], train[i].aspects.count(aspect_at(a)) ? 1 : -1});
    model.aspect_heads[a] = train_head(data, model.vocabulary.size(), config, config.seed * 131 + a);
    if (const auto& h = model.aspect_heads[a]; h.constant_score)
      model.warnings.push_back("aspect head '" + std::string(kAspectNames[a]) +
                               "' saw a single class in training; predicting prior " +
                               io::format_double(*h.constant_score));
  }

  std::size_t labelled = 0;
  for (const auto& ex : train) labelled += !ex.is_negative();
  if (labelled == 0) throw DataError("training set has no labelled (non-negative) examples for the maturity head");
  for (std::size_t k = 0; k < kMaturityCount; ++k) {
    std::vector<Instance> data;
    for (std::size_t i = 0; i < train.size(); ++i)
      if (!train[i].is_negative()) data.push_back({feats[i], index_of(*train[i].maturity) == k ? 1 : -1});
    model.maturity_heads[k] = train_head(data, model.vocabulary.size(), config, config.seed * 131 + 100 + k);
    if (const auto& h = model.maturity_heads[k]; h.constant_score && *h.constant_score == 0.0)
      model.warnings.push_back("maturity class '" + std::string(kMaturityNames[k]) + "' absent from training data");
  }
  return model;
}

std::string_view name_of(Source s) { return s == Source::Baseline ? "baseline" : "imported"; }

Maturity Prediction::maturity() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kMaturityCount; ++k)
    if (maturity_scores[k] > maturity_scores[best]) best = k;
  return maturity_at(best);
}

std::set<Aspect> Prediction::aspect_set() const {
  std::set<Aspect> out;
  for (const auto& [a, s] : aspects) out.insert(a);
  return out;
}

double Thresholds::for_label(Aspect a) const {
  auto it = per_label.find(a);
  return it == per_label.end() ? default_threshold : it->second;
}

std::vector<TextItem> items_of(const std::vector<docbuild::Document>& docs) {
  std::vector<TextItem> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back({d.doc_id, d.text});
  return out;
}

std::vector<TextItem> items_of(const std::vector<LabeledExample>& examples) {
  std::vector<TextItem> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back({e.doc_id, e.text});
  return out;
}

std::vector<Prediction> predict(const BaselineModel& model, const std::vector<TextItem>& items,
                                const Thresholds& thresholds) {
  std::vector<Prediction> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    auto feats = model.featurize(item.text);
    Prediction p;
    p.doc_id = item.doc_id;
    p.source = Source::Baseline;
    for (std::size_t a = 0; a < kAspectCount; ++a) {
      const auto& head = model.aspect_heads[a];
      double score = head.constant_score ? *head.constant_score : sigmoid(head.margin(feats));
      if (score >= thresholds.for_label(aspect_at(a))) p.aspects.emplace_back(aspect_at(a), score);
    }
    std::array<double, kMaturityCount> margins{};
    for (std::size_t k = 0; k < kMaturityCount; ++k) margins[k] = model.maturity_heads[k].margin(feats);
    p.maturity_scores = maturity_distribution(margins);
    out.push_back(std::move(p));
  }
  return out;
}

io::json to_json(const Prediction& p) {
  io::json aspects = io::json::array();
  for (const auto& [a, s] : p.aspects) aspects.push_back({{"label", std::string(name_of(a))}, {"score", s}});
  io::json maturity = io::json::object();
  for (std::size_t k = 0; k < kMaturityCount; ++k) maturity[std::string(kMaturityNames[k])] = p.maturity_scores[k];
  return {{"doc_id", p.doc_id}, {"aspects", aspects}, {"maturity", maturity}, {"source", std::string(name_of(p.source))}};
}

std::string export_predictions(const std::vector<Prediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    out += to_json(p).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<Prediction> import_predictions(std::string_view jsonl, const std::set<std::string>& known_doc_ids) {
  std::vector<Prediction> out;
  std::set<std::string> seen;
  for (const auto& [line, j] : io::parse_jsonl(jsonl)) {
    auto where = line_prefix(line);
    Prediction p;
    p.source = Source::Imported;
    try {
      p.doc_id = j.at("doc_id").get<std::string>();
      if (!known_doc_ids.count(p.doc_id)) throw DataError(where + "unknown doc_id '" + p.doc_id + "'");
      if (!seen.insert(p.doc_id).second) throw DataError(where + "duplicate doc_id '" + p.doc_id + "'");
      std::set<Aspect> labels;
      for (const auto& entry : j.at("aspects")) {
        auto name = entry.at("label").get<std::string>();
        auto aspect = parse_aspect(name);
        if (!aspect) throw DataError(where + "unknown label '" + name + "'");
        if (!labels.insert(*aspect).second) throw DataError(where + "label '" + name + "' listed twice");
        double score = entry.at("score").get<double>();
        if (!(score >= 0.0 && score <= 1.0))
          throw DataError(where + "score " + io::format_double(score) + " for '" + name + "' outside [0, 1]");
        p.aspects.emplace_back(*aspect, score);
      }
      std::sort(p.aspects.begin(), p.aspects.end());
      const auto& m = j.at("maturity");
      if (!m.is_object() || m.size() != kMaturityCount)
        throw DataError(where + "maturity must be an object with keys plan, pilot, release, pioneer");
      double total = 0.0;
      for (std::size_t k = 0; k < kMaturityCount; ++k) {
        double v = m.at(std::string(kMaturityNames[k])).get<double>();
        if (!(v >= 0.0 && v <= 1.0))
          throw DataError(where + "maturity score for '" + std::string(kMaturityNames[k]) + "' outside [0, 1]");
        p.maturity_scores[k] = v;
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-6)
        throw DataError(where + "maturity distribution sums to " + io::format_double(total) + ", expected 1 +/- 1e-6");
      if (j.contains("source")) {
        auto src = j.at("source").get<std::string>();
        if (src != "baseline" && src != "imported") throw DataError(where + "unknown source '" + src + "'");
      }
    } catch (const io::json::exception& e) {
      throw DataError(where + "malformed prediction record: " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Prediction> import_predictions(const std::filesystem::path& path,
                                           const std::vector<docbuild::Document>& docs) {
  std::set<std::string> ids;
  for (const auto& d : docs) ids.insert(d.doc_id);
  return import_predictions(io::read_file(path), ids);
}

EvalReport evaluate(const std::vector<Prediction>& predictions, const std::vector<LabeledExample>& gold) {
  EvalReport report;
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.doc_id] = &p;

  std::array<LabelMetrics, kAspectCount> aspect{};
  std::array<LabelMetrics, kMaturityCount> maturity{};
  std::set<std::string> matched;
  for (const auto& g : gold) {
    auto it = by_id.find(g.doc_id);
    const Prediction* p = it == by_id.end() ? nullptr : it->second;
    if (p) {
      matched.insert(g.doc_id);
    } else {
      ++report.missing_predictions;
    }
    auto predicted = p ? p->aspect_set() : std::set<Aspect>{};
    for (std::size_t a = 0; a < kAspectCount; ++a) {
      bool in_gold = g.aspects.count(aspect_at(a)) > 0;
      bool in_pred = predicted.count(aspect_at(a)) > 0;
      aspect[a].support += in_gold;
      aspect[a].true_positives += in_gold && in_pred;
      aspect[a].false_positives += !in_gold && in_pred;
      aspect[a].false_negatives += in_gold && !in_pred;
    }
    if (g.is_negative()) continue;
    const auto gi = index_of(*g.maturity);
    maturity[gi].support += 1;
    if (!p) {
      report.confusion[gi][kMaturityCount] += 1;
      maturity[gi].false_negatives += 1;
      continue;
    }
    const auto pi = index_of(p->maturity());
    report.confusion[gi][pi] += 1;
    if (pi == gi) {
      maturity[gi].true_positives += 1;
    } else {
      maturity[gi].false_negatives += 1;
      maturity[pi].false_positives += 1;
    }
  }
  report.unmatched_predictions = by_id.size() - matched.size();
  for (std::size_t a = 0; a < kAspectCount; ++a) {
    aspect[a].label = std::string(kAspectNames[a]);
    compute_rates(aspect[a]);
    report.aspect.labels.push_back(aspect[a]);
  }
  for (std::size_t k = 0; k < kMaturityCount; ++k) {
    maturity[k].label = std::string(kMaturityNames[k]);
    compute_rates(maturity[k]);
    report.maturity.labels.push_back(maturity[k]);
  }
  weight(report.aspect);
  weight(report.maturity);
  return report;
}

io::json to_json(const EvalReport& report) {
  io::json confusion = io::json::array();
  for (const auto& row : report.confusion) confusion.push_back(row);
  io::json columns = io::json::array();
  for (auto n : kMaturityNames) columns.push_back(std::string(n));
  columns.push_back("abstain");
  return {{"aspect", task_json(report.aspect)},
          {"maturity", task_json(report.maturity)},
          {"maturity_confusion", {{"rows", "gold"}, {"columns", columns}, {"counts", confusion}}},
          {"missing_predictions", report.missing_predictions},
          {"unmatched_predictions", report.unmatched_predictions}};
}

}  // namespace abma::classify
