#include "plateau/homfly.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace plateau {

namespace {

HomflyPolynomial make(std::initializer_list<std::pair<std::pair<int, int>, int>> t) {
  HomflyPolynomial p;
  for (const auto& [k, c] : t) p.terms.emplace(k, c);
  return p;
}

const std::map<std::string, HomflyPolynomial>& table() {
  static const std::map<std::string, HomflyPolynomial> t = [] {
    std::map<std::string, HomflyPolynomial> m;
    m["unknot"] = make({{{0, 0}, 1}});
    m["3_1"] = make({{{0, 1}, 2}, {{0, 2}, -1}, {{1, 0}, 1}});
    m["4_1"] = make({{{0, -1}, 1}, {{0, 0}, -1}, {{0, 1}, 1}, {{1, -1}, -1}});
    // 5_1 and 10_124 carry their g = 0 slice only.
    m["5_1"] = make({{{0, 2}, 3}, {{0, 3}, -2}});
    m["5_2"] = make({{{0, 1}, 1}, {{0, 2}, 1}, {{0, 3}, -1}, {{1, 0}, 1}, {{1, 1}, 1}});
    m["6_1"] = make({{{0, -1}, 1}, {{0, 1}, -1}, {{0, 2}, 1}, {{1, -1}, -1}, {{1, 0}, -1}});
    m["8_19"] = make({{{0, 3}, 5},
                      {{0, 4}, -5},
                      {{0, 5}, 1},
                      {{1, 2}, 10},
                      {{1, 3}, -5},
                      {{2, 1}, 6},
                      {{2, 2}, -1},
                      {{3, 0}, 1}});
    m["10_124"] = make({{{0, 4}, 7}, {{0, 5}, -8}, {{0, 6}, 2}});
    // The square knot is the connected sum 3_1 # 3_1*, so its polynomial is
    // the product of the two; stored expanded.
    m["square"] = make({{{0, -1}, -2},
                        {{0, 0}, 5},
                        {{0, 1}, -2},
                        {{1, -2}, -1},
                        {{1, -1}, 4},
                        {{1, 0}, -1},
                        {{2, -2}, 1}});
    for (const char* base : {"3_1", "5_1", "5_2", "6_1", "8_19", "10_124"})
      m[std::string(base) + "*"] = mirror_poly(m.at(base));
    return m;
  }();
  return t;
}

}  // namespace

const std::vector<std::string>& homfly_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, poly] : table()) v.push_back(name);
    return v;
  }();
  return names;
}

bool homfly_has(const std::string& name) { return table().count(name) != 0; }

HomflyPolynomial homfly_table(const std::string& name) {
  const auto it = table().find(name);
  if (it == table().end())
    throw std::invalid_argument("no HOMFLY table entry for knot '" + name + "'");
  return it->second;
}

HomflyPolynomial mirror_poly(const HomflyPolynomial& p) {
  HomflyPolynomial q;
  for (const auto& [gd, c] : p.terms) {
    const auto [g, d] = gd;
    q.terms[{g, -d - 2 * g}] = c;
  }
  return q;
}

std::map<int, int> disc_predictions(const HomflyPolynomial& p) {
  std::map<int, int> out;
  for (const auto& [gd, c] : p.terms)
    if (gd.first == 0 && c != 0) out[gd.second] = c;
  return out;
}

std::string monomial(int g, int d, int c) {
  const int za = 2 * g;           // z exponent
  const int aa = 2 * (g + d);     // a exponent
  std::string s;
  if (c < 0) s += "-";
  const int ac = std::abs(c);
  if (ac != 1 || (za == 0 && aa == 0)) s += std::to_string(ac);
  if (za != 0) {
    s += "z^" + std::to_string(za);
    if (aa != 0) s += " ";
  }
  if (aa != 0) s += "a^" + std::to_string(aa);
  return s;
}

std::string to_string(const HomflyPolynomial& p) {
  if (p.terms.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [gd, c] : p.terms) {
    if (c == 0) continue;
    const auto& [g, d] = gd;
    if (first) {
      s = monomial(g, d, c);
      first = false;
      continue;
    }
    if (c < 0)
      s += " - " + monomial(g, d, -c);
    else
      s += " + " + monomial(g, d, c);
  }
  return first ? "0" : s;
}

ConsistencyReport consistency_check(int d_computed, const HomflyPolynomial& p,
                                    bool multiplicity_unresolved) {
  ConsistencyReport r;
  r.d = d_computed;
  if (multiplicity_unresolved) {
    r.verdict = "INDETERMINATE";
    return r;
  }
  r.coeff = p.coeff(0, d_computed);
  if (r.coeff != 0) {
    r.verdict = "CONSISTENT";
    r.term = monomial(0, d_computed, r.coeff);
  } else {
    r.verdict = "NOT PREDICTED";
  }
  return r;
}

}  // namespace plateau
