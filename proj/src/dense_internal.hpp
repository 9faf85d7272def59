#pragma once

#include <span>
#include <vector>

#include "convsearch/dense.hpp"
#include "convsearch/text.hpp"

namespace convsearch::detail {

// out[0..dim) += sum over feature entries of weight * weights[idx*dim ..].
void scatter_features(std::span<const double> weights, const SparseVector& features,
                      std::uint32_t dim, double* out);

std::vector<double> encode_features(const EncoderParams& params, EncoderSide side,
                                    const SparseVector& features);

// Loss core writing gradients into caller-owned zeroed buffers of the same
// shape as the weights. Returns the mean loss.
double batch_loss_and_grads_into(const EncoderParams& params,
                                 const std::vector<BatchItem>& batch,
                                 const Collection& collection,
                                 double* grad_query, double* grad_passage);

}  // namespace convsearch::detail
