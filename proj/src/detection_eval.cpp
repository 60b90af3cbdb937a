#include "camgeom/detection_eval.hpp"

#include "camgeom/error.hpp"
#include "camgeom/format.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

namespace camgeom {

std::string normalize_label(std::string_view label) {
  std::size_t b = 0;
  std::size_t e = label.size();
  while (b < e && std::isspace(static_cast<unsigned char>(label[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(label[e - 1]))) --e;
  std::string out(label.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

namespace {

// Body of the first ``` fence (language tag dropped), or the whole text.
std::string_view strip_fence(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body_start = text.find('\n', open);
  if (body_start == std::string_view::npos) return text.substr(open + 3);
  ++body_start;
  const auto close = text.find("```", body_start);
  return text.substr(body_start, close == std::string_view::npos ? std::string_view::npos
                                                                  : close - body_start);
}

// Balanced top-level {...} spans, string-aware.
std::vector<std::pair<std::size_t, std::string_view>> object_spans(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> spans;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      if (depth++ == 0) start = i;
    } else if (c == '}' && depth > 0) {
      if (--depth == 0) spans.emplace_back(start, text.substr(start, i - start + 1));
    }
  }
  return spans;
}

std::optional<Detection> to_detection(const nlohmann::json& entry, std::size_t index,
                                      std::vector<std::string>& warnings) {
  const std::string where = "entry " + std::to_string(index) + ": ";
  if (!entry.is_object()) {
    warnings.push_back(where + "not an object");
    return std::nullopt;
  }
  if (!entry.contains("label") || !entry.at("label").is_string()) {
    warnings.push_back(where + "missing string \"label\"");
    return std::nullopt;
  }
  const nlohmann::json* box = nullptr;
  if (entry.contains("bbox_3d")) {
    box = &entry.at("bbox_3d");
  } else if (entry.contains("box_3d")) {
    box = &entry.at("box_3d");
  }
  if (box == nullptr || !box->is_array()) {
    warnings.push_back(where + "missing \"bbox_3d\"/\"box_3d\" array");
    return std::nullopt;
  }
  if (box->size() != 9) {
    warnings.push_back(where + "box has " + std::to_string(box->size()) + " values, expected 9");
    return std::nullopt;
  }
  std::array<double, 9> values{};
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& v = (*box)[i];
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      warnings.push_back(where + "box value " + std::to_string(i) + " is not a finite number");
      return std::nullopt;
    }
    values[i] = v.get<double>();
  }
  Detection d{normalize_label(entry.at("label").get<std::string>()), OrientedBox3::from_array(values)};
  if (d.label.empty()) {
    warnings.push_back(where + "empty label");
    return std::nullopt;
  }
  if ((d.box.size.array() <= 0.0).any()) {
    warnings.push_back(where + "non-positive box size");
    return std::nullopt;
  }
  return d;
}

}  // namespace

ParseResult parse_detections(std::string_view text) {
  const std::string_view body = strip_fence(text);
  ParseResult result;
  std::vector<nlohmann::json> entries;

  const auto whole = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!whole.is_discarded()) {
    if (whole.is_array()) {
      entries.assign(whole.begin(), whole.end());
    } else if (whole.is_object()) {
      entries.push_back(whole);
    } else {
      throw Error(ErrorCode::kNoParsableJson, "top-level JSON is neither a list nor an object");
    }
  } else {
    for (const auto& [offset, span] : object_spans(body)) {
      auto obj = nlohmann::json::parse(span, nullptr, false);
      if (obj.is_discarded()) {
        result.warnings.push_back("skipped malformed object at offset " + std::to_string(offset));
        continue;
      }
      entries.push_back(std::move(obj));
    }
    if (entries.empty()) throw Error(ErrorCode::kNoParsableJson, "no JSON list or object found");
    result.warnings.insert(result.warnings.begin(), "list is not valid JSON; recovered objects individually");
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (auto d = to_detection(entries[i], i, result.warnings)) result.detections.push_back(std::move(*d));
  }
  if (!entries.empty() && result.detections.empty()) {
    throw Error(ErrorCode::kNoParsableJson, "none of the " + std::to_string(entries.size()) +
                                                " entries is a well-formed detection");
  }
  return result;
}

nlohmann::json to_json(const Detection& d) {
  return nlohmann::json{{"label", d.label}, {"bbox_3d", d.box.to_array()}};
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

namespace {

void finish_score(ClassScore& s) {
  s.precision = s.predictions ? 100.0 * static_cast<double>(s.matched) / s.predictions : 0.0;
  s.recall = s.truths ? 100.0 * static_cast<double>(s.matched) / s.truths : 0.0;
  s.f1 = f1_score(s.precision, s.recall);
}

void finish_aggregates(EvalReport& report) {
  report.micro = ClassScore{.label = "micro"};
  report.macro = ClassScore{.label = "macro"};
  for (const auto& c : report.classes) {
    report.micro.predictions += c.predictions;
    report.micro.truths += c.truths;
    report.micro.matched += c.matched;
    report.macro.precision += c.precision;
    report.macro.recall += c.recall;
  }
  finish_score(report.micro);
  report.macro.predictions = report.micro.predictions;
  report.macro.truths = report.micro.truths;
  report.macro.matched = report.micro.matched;
  if (!report.classes.empty()) {
    report.macro.precision /= static_cast<double>(report.classes.size());
    report.macro.recall /= static_cast<double>(report.classes.size());
  }
  report.macro.f1 = f1_score(report.macro.precision, report.macro.recall);
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kBadThreshold, "IoU threshold must lie in (0, 1], got " + format_number(threshold));
  }
}

}  // namespace

EvalReport match_and_score(const std::vector<Detection>& predictions,
                           const std::vector<Detection>& truths, const MatchOptions& options) {
  check_threshold(options.threshold);
  auto included = [&](const std::string& label) {
    return !options.classes || options.classes->count(label) > 0;
  };

  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> by_class;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (included(predictions[i].label)) by_class[predictions[i].label].first.push_back(i);
  }
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (included(truths[i].label)) by_class[truths[i].label].second.push_back(i);
  }

  EvalReport report;
  report.threshold = options.threshold;
  for (const auto& [label, members] : by_class) {
    const auto& [pred_idx, truth_idx] = members;
    std::vector<MatchedPair> candidates;
    for (std::size_t p : pred_idx) {
      for (std::size_t t : truth_idx) {
        const double iou = iou3d(predictions[p].box, truths[t].box, options.mode, options.order);
        if (iou >= options.threshold) candidates.push_back({p, t, iou});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const MatchedPair& a, const MatchedPair& b) {
      if (a.iou != b.iou) return a.iou > b.iou;
      if (a.prediction != b.prediction) return a.prediction < b.prediction;
      return a.truth < b.truth;
    });
    std::vector<bool> pred_used(predictions.size(), false);
    std::vector<bool> truth_used(truths.size(), false);
    ClassScore score{.label = label, .predictions = pred_idx.size(), .truths = truth_idx.size()};
    for (const auto& c : candidates) {
      if (pred_used[c.prediction] || truth_used[c.truth]) continue;
      pred_used[c.prediction] = truth_used[c.truth] = true;
      report.matches.push_back(c);
      ++score.matched;
    }
    finish_score(score);
    report.classes.push_back(std::move(score));
  }
  finish_aggregates(report);
  return report;
}

EvalReport evaluate_scenes(const std::vector<SceneDetections>& scenes, const MatchOptions& options,
                           int workers) {
  check_threshold(options.threshold);
  std::vector<EvalReport> per_scene(scenes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < scenes.size(); i = next.fetch_add(1)) {
      per_scene[i] = match_and_score(scenes[i].predictions, scenes[i].truths, options);
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), scenes.size());
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  std::vector<std::size_t> order(scenes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scenes[a].id < scenes[b].id; });

  std::map<std::string, ClassScore> merged;
  for (std::size_t i : order) {
    for (const auto& c : per_scene[i].classes) {
      auto& m = merged[c.label];
      m.label = c.label;
      m.predictions += c.predictions;
      m.truths += c.truths;
      m.matched += c.matched;
    }
  }
  EvalReport report;
  report.threshold = options.threshold;
  for (auto& [label, score] : merged) {
    finish_score(score);
    report.classes.push_back(score);
  }
  finish_aggregates(report);
  return report;
}

namespace {

nlohmann::json score_json(const ClassScore& s) {
  return nlohmann::json{{"label", s.label},       {"predictions", s.predictions},
                        {"truths", s.truths},     {"matched", s.matched},
                        {"precision", s.precision}, {"recall", s.recall},
                        {"f1", s.f1}};
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json classes_json = nlohmann::json::array();
  for (const auto& c : classes) classes_json.push_back(score_json(c));
  nlohmann::json matches_json = nlohmann::json::array();
  for (const auto& m : matches) {
    matches_json.push_back({{"prediction", m.prediction}, {"truth", m.truth}, {"iou", m.iou}});
  }
  return nlohmann::json{{"iou_threshold", threshold},
                        {"micro", score_json(micro)},
                        {"macro", score_json(macro)},
                        {"classes", std::move(classes_json)},
                        {"matches", std::move(matches_json)}};
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "label,predictions,truths,matched,precision,recall,f1\n";
  auto row = [&](const ClassScore& s) {
    out << s.label << ',' << s.predictions << ',' << s.truths << ',' << s.matched << ','
        << format_number(s.precision) << ',' << format_number(s.recall) << ',' << format_number(s.f1)
        << '\n';
  };
  for (const auto& c : classes) row(c);
  row(micro);
  row(macro);
  return out.str();
}

}  // namespace camgeom
