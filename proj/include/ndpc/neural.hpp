#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ndpc/constellation.hpp"
#include "ndpc/mlp.hpp"

namespace ndpc {

/// Learned encoder/decoder pair.
///
/// The encoder sees one_hot(v) concatenated with s and emits x in R^k; the
/// decoder maps y in R^k to |V| logits.
struct NeuralDpcModel {
  MlpParams encoder;
  MlpParams decoder;
  Constellation constellation;
  double lambda = 0.0;

  int dim() const { return constellation.dim(); }
  std::size_t num_messages() const { return constellation.size(); }
  /// Throws std::invalid_argument when the networks do not chain with k and |V|.
  void validate() const;
};

/// Encoder/decoder dimension lists for the given hidden widths.
std::vector<int> encoder_dims(const Constellation& c, std::span<const int> hidden);
std::vector<int> decoder_dims(const Constellation& c, std::span<const int> hidden);

/// Column-per-example encoder input [one_hot(v); s].
Eigen::MatrixXd encoder_input(std::size_t num_messages, std::span<const std::size_t> messages,
                              const Eigen::MatrixXd& s);

Point encode(const NeuralDpcModel& model, std::size_t v_index, const Point& s);
Eigen::MatrixXd encode_batch(const NeuralDpcModel& model, std::span<const std::size_t> messages,
                             const Eigen::MatrixXd& s);

/// Softmax of the decoder logits.
Eigen::VectorXd decode_probs(const NeuralDpcModel& model, const Point& y);
Eigen::MatrixXd decode_logits_batch(const NeuralDpcModel& model, const Eigen::MatrixXd& y);

/// Column-wise numerically stable softmax.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

/// Argmax; ties go to the smallest index.
std::size_t hard_decision(const Eigen::Ref<const Eigen::VectorXd>& scores);

/// Per-example channel realizations for one gradient step.
struct TrainingBatch {
  std::vector<std::size_t> messages;
  Eigen::MatrixXd interference;  // k x B
  Eigen::MatrixXd noise;         // k x B
};

struct LossAndGrads {
  double loss = 0.0;           // lambda * cross_entropy + power
  double cross_entropy = 0.0;  // mean -log p(v | y)
  double power = 0.0;          // mean ||x||^2
  MlpGrads encoder;
  MlpGrads decoder;
};

/// Batch objective lambda * E[-log p(v | y)] + E[||x||^2] with
/// y = e(v, s) + s + n, and its exact gradients. s and n are constants of
/// the batch; the channel passes gradients to x unchanged.
LossAndGrads loss_and_grads(const NeuralDpcModel& model, const TrainingBatch& batch, double lambda);

}  // namespace ndpc
