/*
 * Copyright 2026 The callprobe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "callprobe/probe/model.h"

#include <cmath>
#include <numbers>
#include <string>

#include "callprobe/common/error.h"
#include "callprobe/store/aggregate.h"

namespace callprobe::probe {
namespace {

int GateCount(ProbeFamily family) {
  switch (family) {
    case ProbeFamily::kGru:
      return 3;
    case ProbeFamily::kLstm:
      return 4;
    default:
      return 1;
  }
}

Eigen::MatrixXd Sigmoid(const Eigen::MatrixXd& a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

double Gelu(double z) {
  return 0.5 * z * (1.0 + std::erf(z / std::numbers::sqrt2));
}

double GeluDerivative(double z) {
  const double cdf = 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2));
  const double pdf =
      std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + z * pdf;
}

// Inverted dropout: kept units are scaled by 1/(1-p).
Eigen::MatrixXd DropoutMask(Eigen::Index rows, Eigen::Index cols, double p,
                            bool train_mode, std::mt19937_64* rng) {
  if (!train_mode || p <= 0.0) return Eigen::MatrixXd::Ones(rows, cols);
  if (rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "dropout in train mode needs a random generator");
  }
  std::bernoulli_distribution keep(1.0 - p);
  Eigen::MatrixXd mask(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      mask(i, j) = keep(*rng) ? scale : 0.0;
    }
  }
  return mask;
}

}  // namespace

Eigen::Index ModelParams::ScalarCount() const {
  Eigen::Index n = 0;
  for (const Tensor& t : tensors_) n += t.value.size();
  return n;
}

ModelParams ModelParams::ZerosLike() const {
  ModelParams z = *this;
  z.SetZero();
  return z;
}

void ModelParams::SetZero() {
  for (Tensor& t : tensors_) t.value.setZero();
}

bool ModelParams::AllFinite() const {
  for (const Tensor& t : tensors_) {
    if (!t.value.allFinite()) return false;
  }
  return true;
}

Eigen::VectorXd ModelParams::Flatten() const {
  Eigen::VectorXd flat(ScalarCount());
  Eigen::Index offset = 0;
  for (const Tensor& t : tensors_) {
    flat.segment(offset, t.value.size()) =
        Eigen::Map<const Eigen::VectorXd>(t.value.data(), t.value.size());
    offset += t.value.size();
  }
  return flat;
}

void ModelParams::Unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != ScalarCount()) {
    throw Error(ErrorCode::kShapeMismatch, "flat parameter vector has wrong size");
  }
  Eigen::Index offset = 0;
  for (Tensor& t : tensors_) {
    Eigen::Map<Eigen::VectorXd>(t.value.data(), t.value.size()) =
        flat.segment(offset, t.value.size());
    offset += t.value.size();
  }
}

ProbeModel::ProbeModel(const ProbeConfig& config, int input_dim,
                       int num_classes)
    : config_(config), input_dim_(input_dim), num_classes_(num_classes) {
  config_.Validate();
  if (input_dim < 1 || num_classes < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "need input_dim >= 1 and at least two classes");
  }
  std::vector<Tensor> tensors;
  auto add = [&tensors](std::string name, Eigen::Index rows, Eigen::Index cols) {
    tensors.push_back({std::move(name), Eigen::MatrixXd::Zero(rows, cols)});
    return static_cast<int>(tensors.size()) - 1;
  };

  int readout_dim = input_dim;
  const std::string family(FamilyName(config_.family));
  if (config_.family == ProbeFamily::kMlp) {
    add("mlp.w1", input_dim, input_dim);
    add("mlp.b1", input_dim, 1);
    add("mlp.w2", input_dim, input_dim);
    add("mlp.b2", input_dim, 1);
  } else if (IsRecurrent(config_.family)) {
    const int gh = GateCount(config_.family) * config_.hidden;
    int in_dim = input_dim;
    for (int l = 0; l < config_.num_layers; ++l) {
      const std::string prefix = family + ".l" + std::to_string(l) + ".";
      LayerSlots slots;
      slots.in_dim = in_dim;
      slots.w_ih = add(prefix + "w_ih", gh, in_dim);
      slots.w_hh = add(prefix + "w_hh", gh, config_.hidden);
      slots.b_ih = add(prefix + "b_ih", gh, 1);
      if (config_.family == ProbeFamily::kGru) {
        slots.b_hh = add(prefix + "b_hh", gh, 1);
      }
      layers_.push_back(slots);
      in_dim = config_.hidden;
    }
    readout_dim = config_.hidden;
  }
  out_w_ = add("out.w", num_classes, readout_dim);
  out_b_ = add("out.b", num_classes, 1);
  params_ = ModelParams(std::move(tensors));
}

void ProbeModel::Initialize(std::mt19937_64& rng) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& t = params_[i];
    if (t.value.cols() == 1 && t.name.find(".b") != std::string::npos) {
      t.value.setZero();
      continue;
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.value.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < t.value.cols(); ++j) {
      for (Eigen::Index r = 0; r < t.value.rows(); ++r) t.value(r, j) = u(rng);
    }
  }
  if (config_.family == ProbeFamily::kLstm) {
    const int h = config_.hidden;
    for (const LayerSlots& slots : layers_) {
      params_[slots.b_ih].value.block(h, 0, h, 1).setOnes();
    }
  }
}

Eigen::VectorXd ProbeModel::Forward(const Eigen::MatrixXd& x, bool train_mode,
                                    std::mt19937_64* rng,
                                    ForwardCache* cache) const {
  if (x.cols() != input_dim_ || x.rows() < 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "input is " + std::to_string(x.rows()) + " x " +
                    std::to_string(x.cols()) + ", expected T x " +
                    std::to_string(input_dim_));
  }
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  c = ForwardCache{};
  c.input = x;

  if (config_.family == ProbeFamily::kLogistic ||
      config_.family == ProbeFamily::kMlp) {
    if (x.rows() != 1) {
      throw Error(ErrorCode::kShapeMismatch,
                  "flat probes take one pooled row, got " +
                      std::to_string(x.rows()));
    }
    if (config_.family == ProbeFamily::kMlp) {
      return ForwardMlp(x.row(0).transpose(), train_mode, rng, &c);
    }
    c.readout = x.row(0).transpose();
  } else {
    Eigen::MatrixXd in = x.transpose();  // D x T
    for (int l = 0; l < static_cast<int>(layers_.size()); ++l) {
      if (l > 0) {
        Eigen::MatrixXd mask = DropoutMask(in.rows(), in.cols(),
                                           config_.dropout, train_mode, rng);
        in = in.cwiseProduct(mask);
        c.masks.push_back(std::move(mask));
      } else {
        c.masks.emplace_back();
      }
      ForwardLayer(l, in, &c);
      in = c.hidden[l].rightCols(x.rows());
    }
    c.readout = c.hidden.back().col(x.rows());
  }
  return params_[out_w_].value * c.readout + params_[out_b_].value.col(0);
}

Eigen::VectorXd ProbeModel::ForwardMlp(const Eigen::VectorXd& x,
                                       bool train_mode, std::mt19937_64* rng,
                                       ForwardCache* c) const {
  Eigen::VectorXd h = x;
  for (int k = 0; k < 2; ++k) {
    const Eigen::MatrixXd& w = params_[2 * k].value;
    const Eigen::MatrixXd& b = params_[2 * k + 1].value;
    c->mlp_pre[k] = w * h + b.col(0);
    c->mlp_act[k] = c->mlp_pre[k].unaryExpr(&Gelu);
    c->mlp_mask[k] =
        DropoutMask(input_dim_, 1, config_.dropout, train_mode, rng).col(0);
    h = c->mlp_act[k].cwiseProduct(c->mlp_mask[k]);
  }
  c->readout = h;
  return params_[out_w_].value * h + params_[out_b_].value.col(0);
}

void ProbeModel::ForwardLayer(int layer, const Eigen::MatrixXd& in,
                              ForwardCache* c) const {
  const LayerSlots& s = layers_[layer];
  const int h = config_.hidden;
  const Eigen::Index steps = in.cols();
  const Eigen::MatrixXd& w_hh = params_[s.w_hh].value;
  // Input contribution for every step at once.
  const Eigen::MatrixXd input_part =
      (params_[s.w_ih].value * in).colwise() + params_[s.b_ih].value.col(0);

  Eigen::MatrixXd hidden = Eigen::MatrixXd::Zero(h, steps + 1);
  Eigen::MatrixXd gates(input_part.rows(), steps);

  switch (config_.family) {
    case ProbeFamily::kElman:
      for (Eigen::Index t = 0; t < steps; ++t) {
        hidden.col(t + 1) =
            (input_part.col(t) + w_hh * hidden.col(t)).array().tanh().matrix();
        gates.col(t) = hidden.col(t + 1);
      }
      break;
    case ProbeFamily::kGru: {
      const Eigen::VectorXd b_hh = params_[s.b_hh].value.col(0);
      Eigen::MatrixXd candidate(h, steps);
      for (Eigen::Index t = 0; t < steps; ++t) {
        const Eigen::VectorXd hp = hidden.col(t);
        const Eigen::VectorXd rec = w_hh * hp + b_hh;
        const Eigen::VectorXd r =
            Sigmoid(input_part.col(t).segment(0, h) + rec.segment(0, h));
        const Eigen::VectorXd z =
            Sigmoid(input_part.col(t).segment(h, h) + rec.segment(h, h));
        const Eigen::VectorXd rec_n = rec.segment(2 * h, h);
        const Eigen::VectorXd n =
            (input_part.col(t).segment(2 * h, h) + r.cwiseProduct(rec_n))
                .array()
                .tanh()
                .matrix();
        hidden.col(t + 1) =
            (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(hp);
        gates.col(t) << r, z, n;
        candidate.col(t) = rec_n;
      }
      c->recurrent_candidate.push_back(std::move(candidate));
      break;
    }
    case ProbeFamily::kLstm: {
      Eigen::MatrixXd cell = Eigen::MatrixXd::Zero(h, steps + 1);
      for (Eigen::Index t = 0; t < steps; ++t) {
        const Eigen::VectorXd a = input_part.col(t) + w_hh * hidden.col(t);
        const Eigen::VectorXd i = Sigmoid(a.segment(0, h));
        const Eigen::VectorXd f = Sigmoid(a.segment(h, h));
        const Eigen::VectorXd g = a.segment(2 * h, h).array().tanh().matrix();
        const Eigen::VectorXd o = Sigmoid(a.segment(3 * h, h));
        cell.col(t + 1) = f.cwiseProduct(cell.col(t)) + i.cwiseProduct(g);
        hidden.col(t + 1) =
            o.cwiseProduct(cell.col(t + 1).array().tanh().matrix());
        gates.col(t) << i, f, g, o;
      }
      c->cell.push_back(std::move(cell));
      break;
    }
    default:
      throw Error(ErrorCode::kInvalidArgument, "not a recurrent family");
  }
  c->layer_in.push_back(in);
  c->hidden.push_back(std::move(hidden));
  c->gates.push_back(std::move(gates));
}

void ProbeModel::Backward(const ForwardCache& c, const Eigen::VectorXd& dlogits,
                          ModelParams* grads) const {
  if (dlogits.size() != num_classes_ || grads == nullptr ||
      grads->size() != params_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "backward called with bad shapes");
  }
  (*grads)[out_w_].value += dlogits * c.readout.transpose();
  (*grads)[out_b_].value.col(0) += dlogits;
  Eigen::VectorXd dreadout = params_[out_w_].value.transpose() * dlogits;

  if (config_.family == ProbeFamily::kLogistic) return;

  if (config_.family == ProbeFamily::kMlp) {
    Eigen::VectorXd dh = dreadout;
    for (int k = 1; k >= 0; --k) {
      const Eigen::VectorXd dpre =
          dh.cwiseProduct(c.mlp_mask[k])
              .cwiseProduct(c.mlp_pre[k].unaryExpr(&GeluDerivative));
      const Eigen::VectorXd prev =
          k == 0 ? Eigen::VectorXd(c.input.row(0).transpose())
                 : Eigen::VectorXd(c.mlp_act[0].cwiseProduct(c.mlp_mask[0]));
      (*grads)[2 * k].value += dpre * prev.transpose();
      (*grads)[2 * k + 1].value.col(0) += dpre;
      dh = params_[2 * k].value.transpose() * dpre;
    }
    return;
  }

  const Eigen::Index steps = c.input.rows();
  Eigen::MatrixXd dh_ext = Eigen::MatrixXd::Zero(config_.hidden, steps);
  dh_ext.col(steps - 1) = dreadout;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    Eigen::MatrixXd din = BackwardLayer(l, c, dh_ext, grads);
    if (l > 0) dh_ext = din.cwiseProduct(c.masks[l]);
  }
}

Eigen::MatrixXd ProbeModel::BackwardLayer(int layer, const ForwardCache& c,
                                          const Eigen::MatrixXd& dh_ext,
                                          ModelParams* grads) const {
  const LayerSlots& s = layers_[layer];
  const int h = config_.hidden;
  const Eigen::MatrixXd& in = c.layer_in[layer];
  const Eigen::MatrixXd& hidden = c.hidden[layer];
  const Eigen::MatrixXd& gates = c.gates[layer];
  const Eigen::MatrixXd& w_ih = params_[s.w_ih].value;
  const Eigen::MatrixXd& w_hh = params_[s.w_hh].value;
  const Eigen::Index steps = in.cols();

  // Pre-activation gradients per step; weight gradients are formed from them
  // in one product at the end.
  Eigen::MatrixXd d_input_part(gates.rows(), steps);
  Eigen::MatrixXd d_rec_part;  // GRU: gradient w.r.t. W_hh h + b_hh
  if (config_.family == ProbeFamily::kGru) d_rec_part.resize(gates.rows(), steps);

  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Eigen::VectorXd dh = dh_ext.col(t) + dh_next;
    const Eigen::VectorXd hp = hidden.col(t);
    switch (config_.family) {
      case ProbeFamily::kElman: {
        const Eigen::VectorXd ht = gates.col(t);
        const Eigen::VectorXd da =
            dh.cwiseProduct((1.0 - ht.array().square()).matrix());
        d_input_part.col(t) = da;
        dh_next = w_hh.transpose() * da;
        break;
      }
      case ProbeFamily::kGru: {
        const auto r = gates.col(t).segment(0, h).array();
        const auto z = gates.col(t).segment(h, h).array();
        const auto n = gates.col(t).segment(2 * h, h).array();
        const auto rec_n = c.recurrent_candidate[layer].col(t).array();
        const Eigen::ArrayXd dn = dh.array() * (1.0 - z);
        const Eigen::ArrayXd dz = dh.array() * (hp.array() - n);
        const Eigen::ArrayXd dan = dn * (1.0 - n.square());
        const Eigen::ArrayXd dar = dan * rec_n * r * (1.0 - r);
        const Eigen::ArrayXd daz = dz * z * (1.0 - z);
        d_input_part.col(t) << dar.matrix(), daz.matrix(), dan.matrix();
        d_rec_part.col(t) << dar.matrix(), daz.matrix(), (dan * r).matrix();
        dh_next = (dh.array() * z).matrix() + w_hh.transpose() * d_rec_part.col(t);
        break;
      }
      case ProbeFamily::kLstm: {
        const auto i = gates.col(t).segment(0, h).array();
        const auto f = gates.col(t).segment(h, h).array();
        const auto g = gates.col(t).segment(2 * h, h).array();
        const auto o = gates.col(t).segment(3 * h, h).array();
        const Eigen::ArrayXd tc = c.cell[layer].col(t + 1).array().tanh();
        const Eigen::ArrayXd dc =
            dc_next.array() + dh.array() * o * (1.0 - tc.square());
        const Eigen::ArrayXd di = dc * g;
        const Eigen::ArrayXd df = dc * c.cell[layer].col(t).array();
        const Eigen::ArrayXd dg = dc * i;
        const Eigen::ArrayXd d_o = dh.array() * tc;
        d_input_part.col(t) << (di * i * (1.0 - i)).matrix(),
            (df * f * (1.0 - f)).matrix(), (dg * (1.0 - g.square())).matrix(),
            (d_o * o * (1.0 - o)).matrix();
        dc_next = (dc * f).matrix();
        dh_next = w_hh.transpose() * d_input_part.col(t);
        break;
      }
      default:
        break;
    }
  }

  (*grads)[s.w_ih].value += d_input_part * in.transpose();
  (*grads)[s.b_ih].value.col(0) += d_input_part.rowwise().sum();
  const Eigen::MatrixXd& d_rec =
      config_.family == ProbeFamily::kGru ? d_rec_part : d_input_part;
  (*grads)[s.w_hh].value += d_rec * hidden.leftCols(steps).transpose();
  if (s.b_hh >= 0) (*grads)[s.b_hh].value.col(0) += d_rec.rowwise().sum();
  return w_ih.transpose() * d_input_part;
}

Eigen::MatrixXd PrepareInput(ProbeFamily family,
                             const store::FrameMatrix& frames, bool temporal) {
  if (frames.rows() == 0) {
    throw Error(ErrorCode::kEmptySequence, "sequence has no frames");
  }
  if (!IsRecurrent(family)) {
    return store::MeanPool(frames).transpose();
  }
  if (!temporal) {
    throw Error(ErrorCode::kNonTemporalInput,
                std::string(FamilyName(family)) +
                    " needs a temporally ordered sequence");
  }
  return frames.cast<double>();
}

}  // namespace callprobe::probe
