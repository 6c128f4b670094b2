#include "oracles.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "goalforge/error.hpp"
#include "goalforge/kg.hpp"

namespace gftest {

using goalforge::KgDoc;
using goalforge::KgLink;
using goalforge::KgNode;

std::vector<std::set<int>> random_tag_db(std::mt19937_64& rng, std::size_t max_talks) {
  std::uniform_int_distribution<std::size_t> talks(1, max_talks);
  std::uniform_int_distribution<int> width(1, 5), goal(1, 17);
  std::vector<std::set<int>> db(talks(rng));
  for (auto& tags : db) {
    const int n = width(rng);
    while (static_cast<int>(tags.size()) < n) tags.insert(goal(rng));
  }
  return db;
}

CountMatrix naive_cooccurrence(const std::vector<std::set<int>>& tag_sets) {
  CountMatrix m{};
  for (int i = 1; i <= 17; ++i) {
    for (int j = 1; j <= 17; ++j) {
      m[i - 1][j - 1] = static_cast<std::size_t>(std::count_if(
          tag_sets.begin(), tag_sets.end(), [&](const auto& s) { return s.contains(i) && s.contains(j); }));
    }
  }
  return m;
}

KgDoc random_corrupted_kg(std::mt19937_64& rng) {
  auto roll = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  static const char* const kPads[] = {"", " ", "  ", "\t", "\n"};
  KgDoc doc;
  const int distinct = 1 + roll(12);
  std::vector<std::string> ids;
  for (int i = 0; i < distinct; ++i) ids.push_back("Concept " + std::to_string(i));
  for (int i = 0; i < distinct; ++i) {
    doc.nodes.push_back({kPads[roll(5)] + ids[i] + kPads[roll(5)], 1 + roll(distinct + 3), "detail " + std::to_string(i)});
  }
  const int dupes = roll(4);
  for (int i = 0; i < dupes; ++i) {
    doc.nodes.push_back({ids[roll(distinct)] + kPads[roll(5)], roll(distinct + 3), roll(2) ? "extra" : ""});
  }
  const int blanks = roll(3);
  for (int i = 0; i < blanks; ++i) doc.nodes.push_back({kPads[roll(5)], roll(5), "blank"});
  std::shuffle(doc.nodes.begin(), doc.nodes.end(), rng);

  const int links = roll(2 * distinct + 2);
  for (int i = 0; i < links; ++i) {
    auto endpoint = [&] { return roll(6) == 0 ? "Ghost " + std::to_string(roll(3)) : kPads[roll(3)] + ids[roll(distinct)]; };
    doc.links.push_back({endpoint(), endpoint(), "relates to"});
  }
  return doc;
}

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

std::vector<std::string> repair_property_failures(const KgDoc& input) {
  std::vector<std::string> fail;
  goalforge::RepairResult r;
  try {
    r = goalforge::validate_and_repair(input);
  } catch (const std::exception& e) {
    return {std::string("repair threw: ") + e.what()};
  }
  const auto& out = r.doc;

  // Expected node sequence: distinct stripped ids ordered by (min order, first index).
  struct Expect {
    long long order;
    std::size_t first;
  };
  std::map<std::string, Expect> expect;
  for (std::size_t i = 0; i < input.nodes.size(); ++i) {
    const auto id = strip(input.nodes[i].id);
    if (id.empty()) continue;
    auto [it, fresh] = expect.try_emplace(id, Expect{input.nodes[i].order, i});
    if (!fresh) it->second.order = std::min(it->second.order, input.nodes[i].order);
  }
  std::vector<std::string> seq;
  for (const auto& [id, _] : expect) seq.push_back(id);
  std::sort(seq.begin(), seq.end(), [&](const auto& a, const auto& b) {
    const auto &x = expect.at(a), &y = expect.at(b);
    return x.order != y.order ? x.order < y.order : x.first < y.first;
  });
  std::vector<std::string> got;
  for (const auto& n : out.nodes) got.push_back(n.id);
  if (got != seq) fail.push_back("node ids or their sequence differ from the oracle");

  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    if (out.nodes[i].order != static_cast<long long>(i + 1)) fail.push_back("orders are not 1..N");
  }

  std::vector<KgLink> want_links;
  for (const auto& l : input.links) {
    const auto s = strip(l.source), t = strip(l.target);
    if (expect.contains(s) && expect.contains(t)) want_links.push_back({s, t, l.relation});
  }
  if (out.links != want_links) fail.push_back("surviving links differ from the oracle");

  if (!goalforge::integrity_problems(out).empty()) fail.push_back("repaired doc still has integrity problems");

  const auto again = goalforge::validate_and_repair(out);
  if (!(again.doc == out)) fail.push_back("repair is not idempotent");
  if (!again.report.empty()) fail.push_back("second repair reported actions");

  if (goalforge::integrity_problems(input).empty() && (!r.report.empty() || !(out == input))) {
    fail.push_back("repair changed an already clean doc");
  }
  return fail;
}

RefLevene reference_levene(const std::vector<std::vector<double>>& groups) {
  const double k = static_cast<double>(groups.size());
  std::vector<std::vector<double>> z;
  double n = 0;
  for (const auto& g : groups) {
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    auto& zg = z.emplace_back();
    for (double x : g) zg.push_back(std::fabs(x - mean));
    n += static_cast<double>(g.size());
  }
  double grand = 0;
  for (const auto& zg : z) grand += std::accumulate(zg.begin(), zg.end(), 0.0);
  grand /= n;
  double between = 0, within = 0;
  for (const auto& zg : z) {
    const double m = std::accumulate(zg.begin(), zg.end(), 0.0) / static_cast<double>(zg.size());
    between += static_cast<double>(zg.size()) * (m - grand) * (m - grand);
    for (double v : zg) within += (v - m) * (v - m);
  }
  const double w = ((n - k) / (k - 1)) * between / within;
  boost::math::fisher_f dist(k - 1, n - k);
  return {w, boost::math::cdf(boost::math::complement(dist, w))};
}

RefWelch reference_welch(const std::vector<double>& a, const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::array<double, 3>{n, m, ss / (n - 1)};
  };
  const auto [na, ma, va] = moments(a);
  const auto [nb, mb, vb] = moments(b);
  const double sa = va / na, sb = vb / nb;
  const double t = (ma - mb) / std::sqrt(sa + sb);
  const double df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
  boost::math::students_t dist(df);
  return {t, df, 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)))};
}

}  // namespace gftest
