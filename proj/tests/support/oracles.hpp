#pragma once

// Independent reference evaluations used to check the implementation. They
// deliberately share no code with the library beyond plain data types.

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace earl::prop {

struct OracleItem {
  std::string category;
  std::string source; // face, language_voice, movement_kinematic, movement_kinetic
  double p = 1.0;
  double i = 1.0;
};

/// Capture-convenience weights written out by hand: good 1.0, middle 0.6,
/// bad 0.2.
inline double oracle_weight(const std::string &source) {
  if (source == "face" || source == "language_voice")
    return 1.0;
  if (source == "movement_kinematic")
    return 0.6;
  return 0.2;
}

/// score(c) = sum_{m: cat=c} w p i / sum_m w, evaluated term by term.
inline std::map<std::string, double>
oracle_fused_scores(const std::vector<OracleItem> &items) {
  std::map<std::string, double> numerator;
  double denominator = 0.0;
  for (const auto &it : items) {
    double w = oracle_weight(it.source);
    denominator += w;
    numerator[it.category] += w * it.p * it.i;
  }
  std::map<std::string, double> scores;
  for (const auto &[c, n] : numerator)
    scores[c] = n / denominator;
  return scores;
}

inline double oracle_decay(double p, double lambda, double elapsed) {
  return p * std::exp(-lambda * elapsed);
}

} // namespace earl::prop
