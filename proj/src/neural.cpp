#include "ndpc/neural.hpp"

#include <cmath>
#include <stdexcept>

namespace ndpc {

void NeuralDpcModel::validate() const {
  const auto k = dim();
  const auto m = static_cast<int>(num_messages());
  if (encoder.layers.empty() || decoder.layers.empty()) throw std::invalid_argument("NeuralDpcModel: empty network");
  if (encoder.input_dim() != m + k) throw std::invalid_argument("NeuralDpcModel: encoder input must be |V| + k");
  if (encoder.output_dim() != k || decoder.input_dim() != k)
    throw std::invalid_argument("NeuralDpcModel: encoder output / decoder input must equal k");
  if (decoder.output_dim() != m) throw std::invalid_argument("NeuralDpcModel: decoder output must be |V|");
  if (!(lambda >= 0.0)) throw std::invalid_argument("NeuralDpcModel: lambda must be nonnegative");
}

std::vector<int> encoder_dims(const Constellation& c, std::span<const int> hidden) {
  std::vector<int> d{static_cast<int>(c.size()) + c.dim()};
  d.insert(d.end(), hidden.begin(), hidden.end());
  d.push_back(c.dim());
  return d;
}

std::vector<int> decoder_dims(const Constellation& c, std::span<const int> hidden) {
  std::vector<int> d{c.dim()};
  d.insert(d.end(), hidden.begin(), hidden.end());
  d.push_back(static_cast<int>(c.size()));
  return d;
}

Eigen::MatrixXd encoder_input(std::size_t num_messages, std::span<const std::size_t> messages,
                              const Eigen::MatrixXd& s) {
  const auto batch = static_cast<Eigen::Index>(messages.size());
  if (s.cols() != batch) throw std::invalid_argument("encoder_input: batch size mismatch");
  const auto m = static_cast<Eigen::Index>(num_messages);
  Eigen::MatrixXd in = Eigen::MatrixXd::Zero(m + s.rows(), batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const auto v = messages[static_cast<std::size_t>(j)];
    if (v >= num_messages) throw std::out_of_range("encoder_input: message index out of range");
    in(static_cast<Eigen::Index>(v), j) = 1.0;
  }
  in.bottomRows(s.rows()) = s;
  return in;
}

Eigen::MatrixXd encode_batch(const NeuralDpcModel& model, std::span<const std::size_t> messages,
                             const Eigen::MatrixXd& s) {
  if (s.rows() != model.dim()) throw std::invalid_argument("encode: interference dimension mismatch");
  return mlp_forward(model.encoder, encoder_input(model.num_messages(), messages, s));
}

Point encode(const NeuralDpcModel& model, std::size_t v_index, const Point& s) {
  if (v_index >= model.num_messages()) throw std::out_of_range("encode: message index out of range");
  const std::size_t msg[] = {v_index};
  const Eigen::MatrixXd x = encode_batch(model, msg, Eigen::MatrixXd(s));
  return x.col(0);
}

Eigen::MatrixXd decode_logits_batch(const NeuralDpcModel& model, const Eigen::MatrixXd& y) {
  if (y.rows() != model.dim()) throw std::invalid_argument("decode: observation dimension mismatch");
  return mlp_forward(model.decoder, y);
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    auto col = p.col(j);
    col.array() -= col.maxCoeff();
    col = col.array().exp().matrix();
    col /= col.sum();
  }
  return p;
}

Eigen::VectorXd decode_probs(const NeuralDpcModel& model, const Point& y) {
  return softmax_columns(decode_logits_batch(model, Eigen::MatrixXd(y))).col(0);
}

std::size_t hard_decision(const Eigen::Ref<const Eigen::VectorXd>& scores) {
  if (scores.size() == 0) throw std::invalid_argument("hard_decision: empty score vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i)
    if (scores(i) > scores(best)) best = i;
  return static_cast<std::size_t>(best);
}

LossAndGrads loss_and_grads(const NeuralDpcModel& model, const TrainingBatch& batch, double lambda) {
  const auto b = static_cast<Eigen::Index>(batch.messages.size());
  if (b == 0) throw std::invalid_argument("loss_and_grads: empty batch");
  if (batch.interference.cols() != b || batch.noise.cols() != b || batch.interference.rows() != model.dim() ||
      batch.noise.rows() != model.dim())
    throw std::invalid_argument("loss_and_grads: batch shape mismatch");

  MlpCache enc_cache, dec_cache;
  const Eigen::MatrixXd x =
      mlp_forward(model.encoder, encoder_input(model.num_messages(), batch.messages, batch.interference), &enc_cache);
  const Eigen::MatrixXd y = x + batch.interference + batch.noise;
  const Eigen::MatrixXd logits = mlp_forward(model.decoder, y, &dec_cache);

  // Cross-entropy via log-sum-exp; the softmax gradient reuses the same shift.
  Eigen::MatrixXd grad_logits(logits.rows(), b);
  double ce = 0.0;
  for (Eigen::Index j = 0; j < b; ++j) {
    const double mx = logits.col(j).maxCoeff();
    const Eigen::VectorXd e = (logits.col(j).array() - mx).exp().matrix();
    const double z = e.sum();
    const auto v = static_cast<Eigen::Index>(batch.messages[static_cast<std::size_t>(j)]);
    ce += std::log(z) + mx - logits(v, j);
    grad_logits.col(j) = e / z;
    grad_logits(v, j) -= 1.0;
  }
  const double inv_b = 1.0 / static_cast<double>(b);
  ce *= inv_b;
  const double power = x.squaredNorm() * inv_b;

  LossAndGrads out;
  out.cross_entropy = ce;
  out.power = power;
  out.loss = lambda * ce + power;

  grad_logits *= lambda * inv_b;
  const Eigen::MatrixXd grad_y = mlp_backward(model.decoder, dec_cache, grad_logits, out.decoder);
  const Eigen::MatrixXd grad_x = grad_y + (2.0 * inv_b) * x;
  mlp_backward(model.encoder, enc_cache, grad_x, out.encoder);
  return out;
}

}  // namespace ndpc
