#pragma once

// HOMFLY polynomials for the knots under study, indexed the way the disc
// predictions read them: P = sum c_{g,d} z^{2g} a^{2(g+d)}, keyed by
// (g, d). The coefficient c_{0,d} != 0 predicts a minimal immersed disc
// with self-intersection number d; mirroring a knot negates the a-exponent,
// i.e. (g, d) -> (g, -d - 2g).
//
// Polynomials are stored data, not computed from diagrams. A handful are
// kept exactly as printed in the source material, which for 5_1 and 10_124
// means the disc-relevant g = 0 slice only.

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace plateau {

struct HomflyPolynomial {
  std::map<std::pair<int, int>, int> terms;  // (g, d) -> c_{g,d}, nonzero

  int coeff(int g, int d) const {
    const auto it = terms.find({g, d});
    return it == terms.end() ? 0 : it->second;
  }
  bool operator==(const HomflyPolynomial&) const = default;
};

// unknot, 3_1, 3_1*, 4_1, 5_1, 5_1*, 5_2, 5_2*, 6_1, 6_1*, 8_19, 8_19*,
// 10_124, 10_124*, square.
const std::vector<std::string>& homfly_names();
bool homfly_has(const std::string& name);
HomflyPolynomial homfly_table(const std::string& name);  // throws on unknown

HomflyPolynomial mirror_poly(const HomflyPolynomial& p);

// The g = 0 slice: d -> c_{0,d}, nonzero entries only.
std::map<int, int> disc_predictions(const HomflyPolynomial& p);

// One term in the (a, z) notation, e.g. "2a^2", "-a^6", "5", "z^2 a^-2".
std::string monomial(int g, int d, int c);
std::string to_string(const HomflyPolynomial& p);

struct ConsistencyReport {
  // CONSISTENT (nonzero c_{0,d}), NOT PREDICTED (zero), or INDETERMINATE
  // (unresolved multiplicity, no defined d).
  std::string verdict;
  std::string term;  // the matching monomial when consistent
  int d = 0;
  int coeff = 0;
};

ConsistencyReport consistency_check(int d_computed, const HomflyPolynomial& p,
                                    bool multiplicity_unresolved = false);

}  // namespace plateau
