#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "legalir/error.hpp"

namespace legalir {

/// -log softmax of the positive among {positive} + negatives, with dot
/// similarity scaled by 1/temperature. `negatives` holds one candidate per
/// row and may be empty. Evaluated with max-subtraction.
template <typename DerivedQ, typename DerivedP, typename DerivedN>
typename DerivedQ::Scalar infonce_loss(const Eigen::MatrixBase<DerivedQ>& query, const Eigen::MatrixBase<DerivedP>& positive,
                                       const Eigen::MatrixBase<DerivedN>& negatives,
                                       typename DerivedQ::Scalar temperature) {
    using Scalar = typename DerivedQ::Scalar;
    if (!(temperature > Scalar(0))) throw UsageError("InfoNCE temperature must be > 0");

    const Scalar positive_logit = query.dot(positive) / temperature;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> logits = (negatives * query) / temperature;
    Scalar max_logit = positive_logit;
    if (logits.size() > 0) max_logit = std::max(max_logit, logits.maxCoeff());

    Scalar sum = std::exp(positive_logit - max_logit);
    if (logits.size() > 0) sum += (logits.array() - max_logit).exp().sum();
    // Mathematically >= 0; clamp away a last-bit negative.
    return std::max(Scalar(0), std::log(sum) + max_logit - positive_logit);
}

}  // namespace legalir
