#pragma once

#include <cmath>
#include <vector>

#include "levyspec/common.hpp"

namespace levyspec {

/// Strictly increasing Bernstein function with f(0) = 0, used to build
/// subordinate symbols eta(u) = f(|u|^2). Power and relativistic kinds
/// are closed forms; tables interpolate monotone samples and refuse to
/// extrapolate.
class BernsteinFunction {
  public:
    enum class Kind { Power, Relativistic, Table };

    static BernsteinFunction power(double exponent) {
        if (!(exponent > 0.0 && exponent <= 1.0))
            throw BadParameter("Bernstein power exponent must lie in (0, 1]");
        BernsteinFunction f;
        f.kind_ = Kind::Power;
        f.exponent_ = exponent;
        return f;
    }

    static BernsteinFunction relativistic(double b) {
        if (!(b > 0.0)) throw BadParameter("relativistic parameter must be > 0");
        BernsteinFunction f;
        f.kind_ = Kind::Relativistic;
        f.b_ = b;
        return f;
    }

    /// Monotone piecewise-cubic (Fritsch-Carlson) interpolant of samples
    /// (s_i, f_i); requires s_0 = 0, f_0 = 0, both strictly increasing.
    static BernsteinFunction table(std::vector<double> s, std::vector<double> f) {
        if (s.size() != f.size() || s.size() < 2)
            throw BadParameter("Bernstein table needs >= 2 samples");
        if (s.front() != 0.0 || f.front() != 0.0)
            throw BadParameter("Bernstein table must start at f(0) = 0");
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i] > s[i - 1]) || !(f[i] > f[i - 1]))
                throw BadParameter("Bernstein table must be strictly increasing");
        BernsteinFunction out;
        out.kind_ = Kind::Table;
        out.s_ = std::move(s);
        out.f_ = std::move(f);
        out.build_tangents();
        return out;
    }

    double operator()(double s) const {
        switch (kind_) {
            case Kind::Power:
                return std::pow(s, exponent_);
            case Kind::Relativistic:
                // sqrt(b^2 + s) - b without cancellation near s = 0
                return s / (std::sqrt(b_ * b_ + s) + b_);
            case Kind::Table:
                return eval_table(s);
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    double exponent() const { return exponent_; }

    /// True when f(s) -> infinity is known from the closed form. Table
    /// functions only certify their sampled range.
    bool known_unbounded() const { return kind_ != Kind::Table; }

  private:
    Kind kind_ = Kind::Power;
    double exponent_ = 0.5;
    double b_ = 1.0;
    std::vector<double> s_, f_, m_;

    void build_tangents() {
        std::size_t n = s_.size();
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            delta[i] = (f_[i + 1] - f_[i]) / (s_[i + 1] - s_[i]);
        m_.assign(n, 0.0);
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = 0.5 * (delta[i - 1] + delta[i]);
        // Fritsch-Carlson monotonicity limiter
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double a = m_[i] / delta[i];
            double b = m_[i + 1] / delta[i];
            double r2 = a * a + b * b;
            if (r2 > 9.0) {
                double tau = 3.0 / std::sqrt(r2);
                m_[i] = tau * a * delta[i];
                m_[i + 1] = tau * b * delta[i];
            }
        }
    }

    double eval_table(double s) const {
        if (s < s_.front() || s > s_.back())
            throw BadParameter("Bernstein table evaluated outside sampled range");
        auto it = std::upper_bound(s_.begin(), s_.end(), s);
        std::size_t i = (it == s_.begin()) ? 0 : (it - s_.begin()) - 1;
        if (i + 1 >= s_.size()) i = s_.size() - 2;
        double h = s_[i + 1] - s_[i];
        double x = (s - s_[i]) / h;
        double h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
        double h10 = x * (1.0 - x) * (1.0 - x);
        double h01 = x * x * (3.0 - 2.0 * x);
        double h11 = x * x * (x - 1.0);
        return h00 * f_[i] + h10 * h * m_[i] + h01 * f_[i + 1] + h11 * h * m_[i + 1];
    }
};

}  // namespace levyspec
