#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace narx {

/// One polynomial NARX regressor: a product of lagged outputs and lagged
/// inputs.  Lags are stored ascending; a repeated lag means a repeated factor
/// (so y_lags = {1,1} is y(k-1)^2).  Both lists empty encodes the constant
/// term "1".
struct TermSpec {
  std::vector<int> y_lags;  ///< output-factor lags, each >= 1, ascending
  std::vector<int> u_lags;  ///< input-factor lags, each >= 1, ascending

  [[nodiscard]] int degree() const noexcept {
    return static_cast<int>(y_lags.size() + u_lags.size());
  }
  [[nodiscard]] bool operator==(const TermSpec&) const = default;
};

/// The full candidate term dictionary for given maximum lags and degree.
/// terms[0] is always the constant; the rest are sorted degree-ascending and
/// lexicographically within a degree (output factors order before input
/// factors, lower lags first), so a structure mask index is portable across
/// processes for identical (n_u, n_y, n_l).
struct ModelSet {
  int n_u = 0;  ///< maximum input lag
  int n_y = 0;  ///< maximum output lag
  int n_l = 0;  ///< maximum polynomial degree
  std::vector<TermSpec> terms;

  [[nodiscard]] std::size_t size() const noexcept { return terms.size(); }
};

/// Binary inclusion vector over a ModelSet (1 = term selected).
using StructureMask = std::vector<std::uint8_t>;

/// Number of selected terms.
[[nodiscard]] std::size_t cardinality(const StructureMask& mask) noexcept;

/// Closed-form size of the candidate dictionary:
///   n_0 = 1,  n_i = n_{i-1} * (n_y + n_u + i - 1) / i,  total = sum n_i.
/// Throws std::invalid_argument unless n_u >= 1, n_y >= 1, n_l >= 1.
[[nodiscard]] long long count_terms(int n_u, int n_y, int n_l);

/// Enumerates the dictionary in canonical order.  Postcondition:
/// terms.size() == count_terms(n_u, n_y, n_l), no duplicates.
[[nodiscard]] ModelSet generate_model_set(int n_u, int n_y, int n_l);

/// Value of one regressor at time k: product over y[k - l] and u[k - l].
/// Precondition: k >= every lag referenced by the term.
[[nodiscard]] double evaluate_term(const TermSpec& term,
                                   std::span<const double> u,
                                   std::span<const double> y, std::size_t k);

/// Terms selected by a mask, in dictionary order.
/// Throws std::invalid_argument on mask/dictionary size mismatch.
[[nodiscard]] std::vector<TermSpec> decode_structure(const StructureMask& mask,
                                                     const ModelSet& model_set);

/// Human-readable form, e.g. "y(k-2)*u(k-1)^2"; the constant term is "1".
[[nodiscard]] std::string term_to_string(const TermSpec& term);

/// Index of `term` in the model set, or -1 when absent.
[[nodiscard]] long long find_term(const ModelSet& model_set, const TermSpec& term);

/// Mask with exactly the given terms set.  Throws std::invalid_argument when
/// a term is not part of the model set.
[[nodiscard]] StructureMask mask_from_terms(const ModelSet& model_set,
                                            std::span<const TermSpec> terms);

}  // namespace narx
