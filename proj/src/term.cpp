#include "narx/term.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace narx {
namespace {

/// Factors are ranked output-before-input, then by lag; combinations with
/// repetition over this ranking yield the canonical within-degree order.
struct Factor {
  bool is_input;
  int lag;
};

void emit_combinations(const std::vector<Factor>& alphabet, int degree,
                       std::size_t first, TermSpec& scratch,
                       std::vector<TermSpec>& out) {
  if (degree == 0) {
    out.push_back(scratch);
    return;
  }
  for (std::size_t f = first; f < alphabet.size(); ++f) {
    auto& lags = alphabet[f].is_input ? scratch.u_lags : scratch.y_lags;
    lags.push_back(alphabet[f].lag);
    emit_combinations(alphabet, degree - 1, f, scratch, out);
    lags.pop_back();
  }
}

}  // namespace

std::size_t cardinality(const StructureMask& mask) noexcept {
  return static_cast<std::size_t>(
      std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

long long count_terms(int n_u, int n_y, int n_l) {
  if (n_u < 1 || n_y < 1 || n_l < 1) {
    throw std::invalid_argument("count_terms: n_u, n_y and n_l must be >= 1");
  }
  long long total = 1;  // n_0: the constant term
  long long n_i = 1;
  for (int i = 1; i <= n_l; ++i) {
    n_i = n_i * (n_y + n_u + i - 1) / i;  // exact: multiset coefficient
    total += n_i;
  }
  return total;
}

ModelSet generate_model_set(int n_u, int n_y, int n_l) {
  const long long expected = count_terms(n_u, n_y, n_l);

  std::vector<Factor> alphabet;
  alphabet.reserve(static_cast<std::size_t>(n_y + n_u));
  for (int lag = 1; lag <= n_y; ++lag) alphabet.push_back({false, lag});
  for (int lag = 1; lag <= n_u; ++lag) alphabet.push_back({true, lag});

  ModelSet set{n_u, n_y, n_l, {}};
  set.terms.reserve(static_cast<std::size_t>(expected));
  TermSpec scratch;
  for (int degree = 0; degree <= n_l; ++degree) {
    emit_combinations(alphabet, degree, 0, scratch, set.terms);
  }
  if (static_cast<long long>(set.terms.size()) != expected) {
    throw std::logic_error("generate_model_set: enumeration/count mismatch");
  }
  return set;
}

double evaluate_term(const TermSpec& term, std::span<const double> u,
                     std::span<const double> y, std::size_t k) {
  double value = 1.0;
  for (int lag : term.y_lags) value *= y[k - static_cast<std::size_t>(lag)];
  for (int lag : term.u_lags) value *= u[k - static_cast<std::size_t>(lag)];
  return value;
}

std::vector<TermSpec> decode_structure(const StructureMask& mask,
                                       const ModelSet& model_set) {
  if (mask.size() != model_set.size()) {
    throw std::invalid_argument(
        "decode_structure: mask length does not match model set size");
  }
  std::vector<TermSpec> selected;
  selected.reserve(cardinality(mask));
  for (std::size_t m = 0; m < mask.size(); ++m) {
    if (mask[m]) selected.push_back(model_set.terms[m]);
  }
  return selected;
}

std::string term_to_string(const TermSpec& term) {
  if (term.degree() == 0) return "1";

  std::string out;
  auto append = [&out](char name, int lag, int power) {
    if (!out.empty()) out += '*';
    out += name;
    out += "(k-" + std::to_string(lag) + ")";
    if (power > 1) out += "^" + std::to_string(power);
  };
  auto append_run = [&append](char name, const std::vector<int>& lags) {
    for (std::size_t i = 0; i < lags.size();) {
      std::size_t j = i;
      while (j < lags.size() && lags[j] == lags[i]) ++j;
      append(name, lags[i], static_cast<int>(j - i));
      i = j;
    }
  };
  append_run('y', term.y_lags);
  append_run('u', term.u_lags);
  return out;
}

long long find_term(const ModelSet& model_set, const TermSpec& term) {
  TermSpec canonical = term;
  std::sort(canonical.y_lags.begin(), canonical.y_lags.end());
  std::sort(canonical.u_lags.begin(), canonical.u_lags.end());
  for (std::size_t m = 0; m < model_set.size(); ++m) {
    if (model_set.terms[m] == canonical) return static_cast<long long>(m);
  }
  return -1;
}

StructureMask mask_from_terms(const ModelSet& model_set,
                              std::span<const TermSpec> terms) {
  StructureMask mask(model_set.size(), 0);
  for (const TermSpec& term : terms) {
    const long long index = find_term(model_set, term);
    if (index < 0) {
      throw std::invalid_argument("mask_from_terms: term " +
                                  term_to_string(term) +
                                  " is not in the model set");
    }
    mask[static_cast<std::size_t>(index)] = 1;
  }
  return mask;
}

}  // namespace narx
