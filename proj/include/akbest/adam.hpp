#pragma once

#include <cmath>
#include <vector>

#include "akbest/common.hpp"

namespace akbest {

struct AdamOpts {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction; one instance per parameter vector.
class Adam {
  public:
    explicit Adam(size_t n, AdamOpts opts = {})
        : opts_(opts), m_(n, 0.0), v_(n, 0.0) {}

    double lr() const { return opts_.lr; }
    void set_lr(double lr) { opts_.lr = lr; }

    void step(std::vector<double>& params, const std::vector<double>& grad) {
        if (params.size() != m_.size() || grad.size() != m_.size())
            throw DimensionError("Adam: parameter/gradient size mismatch");
        ++t_;
        const double c1 = 1.0 - std::pow(opts_.beta1, t_);
        const double c2 = 1.0 - std::pow(opts_.beta2, t_);
        for (size_t i = 0; i < params.size(); ++i) {
            if (!is_finite(grad[i])) throw NonFiniteError("Adam: non-finite gradient");
            m_[i] = opts_.beta1 * m_[i] + (1.0 - opts_.beta1) * grad[i];
            v_[i] = opts_.beta2 * v_[i] + (1.0 - opts_.beta2) * grad[i] * grad[i];
            params[i] -= opts_.lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + opts_.eps);
        }
    }

  private:
    AdamOpts opts_;
    std::vector<double> m_, v_;
    double t_ = 0;
};

}  // namespace akbest
