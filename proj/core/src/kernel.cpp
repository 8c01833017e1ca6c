#include "quadfit/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "overloaded.hpp"
#include "quadfit/error.hpp"

namespace quadfit {

using detail::Overloaded;

struct Kernel::Impl {
  struct Normal {
    double h2;
  };
  struct Poisson {
    double rho;
    double lo;
    double hi;
  };
  struct Cvm {};
  struct Pearson {
    std::optional<BaselineMeasure> g;
  };
  struct Identity {};
  struct Shifted {
    Kernel base;
    std::function<double(double)> a;
    double b;
  };
  struct Custom {
    std::string name;
    Fn fn;
    double lo;
    double hi;
  };
  std::variant<Normal, Poisson, Cvm, Pearson, Identity, Shifted, Custom> v;
};

double normal_density(double d, double variance) {
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

Kernel Kernel::normal(double h2) {
  if (!(h2 > 0.0) || !std::isfinite(h2)) throw InvalidArgument("normal kernel: h2 must be positive");
  return Kernel(std::make_shared<const Impl>(Impl{Impl::Normal{h2}}));
}

Kernel Kernel::poisson(double rho, double lo, double hi) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("poisson kernel: rho must lie in (0, 1)");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument("poisson kernel: need finite lo < hi");
  return Kernel(std::make_shared<const Impl>(Impl{Impl::Poisson{rho, lo, hi}}));
}

Kernel Kernel::cvm() { return Kernel(std::make_shared<const Impl>(Impl{Impl::Cvm{}})); }

Kernel Kernel::pearson() {
  return Kernel(std::make_shared<const Impl>(Impl{Impl::Pearson{std::nullopt}}));
}

Kernel Kernel::pearson(const BaselineMeasure& pmf) {
  if (pmf.as<BaselineMeasure::Discrete>() == nullptr)
    throw DomainError("pearson kernel: reference must be a discrete pmf, got " + pmf.describe());
  return Kernel(std::make_shared<const Impl>(Impl{Impl::Pearson{pmf}}));
}

Kernel Kernel::identity() { return Kernel(std::make_shared<const Impl>(Impl{Impl::Identity{}})); }

Kernel Kernel::custom(std::string name, Fn fn, double lo, double hi) {
  if (!fn) throw InvalidArgument("custom kernel: empty function");
  if (!(lo < hi)) throw InvalidArgument("custom kernel: need lo < hi");
  Kernel k(std::make_shared<const Impl>(Impl{Impl::Custom{std::move(name), std::move(fn), lo, hi}}));

  constexpr int kPoints = 20;
  std::vector<double> pts(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double u = (i + 0.5) / kPoints;
    if (std::isfinite(lo) && std::isfinite(hi))
      pts[i] = lo + u * (hi - lo);
    else if (std::isfinite(lo))
      pts[i] = lo - std::log1p(-u) * 2.0;
    else if (std::isfinite(hi))
      pts[i] = hi + std::log(u) * 2.0;
    else
      pts[i] = 6.0 * (u - 0.5) * 2.0;
  }
  Eigen::MatrixXd gram(kPoints, kPoints);
  for (int i = 0; i < kPoints; ++i)
    for (int j = 0; j < kPoints; ++j) {
      const double a = k(pts[i], pts[j]);
      const double b = k(pts[j], pts[i]);
      if (!std::isfinite(a)) throw InvalidArgument("custom kernel: non-finite value");
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw InvalidArgument("custom kernel: not symmetric");
      gram(i, j) = a;
    }
  const double min_eig = min_centered_eigenvalue(k, pts);
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if (min_eig < -1e-8 * scale)
    throw InvalidArgument("custom kernel: conditional nonnegative definiteness spot check failed");
  return k;
}

KernelFamily Kernel::family() const noexcept {
  return std::visit(Overloaded{
                        [](const Impl::Normal&) { return KernelFamily::normal; },
                        [](const Impl::Poisson&) { return KernelFamily::poisson; },
                        [](const Impl::Cvm&) { return KernelFamily::cvm; },
                        [](const Impl::Pearson&) { return KernelFamily::pearson; },
                        [](const Impl::Identity&) { return KernelFamily::identity; },
                        [](const Impl::Shifted&) { return KernelFamily::shifted; },
                        [](const Impl::Custom&) { return KernelFamily::custom; },
                    },
                    impl_->v);
}

std::string Kernel::name() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Impl::Normal& n) { os << "normal:h2=" << n.h2; },
                 [&](const Impl::Poisson& p) {
                   os << "poisson:rho=" << p.rho;
                   if (p.lo != 0.0 || p.hi != kTwoPi) os << ",lo=" << p.lo << ",hi=" << p.hi;
                 },
                 [&](const Impl::Cvm&) { os << "cvm"; },
                 [&](const Impl::Pearson&) { os << "pearson"; },
                 [&](const Impl::Identity&) { os << "identity"; },
                 [&](const Impl::Shifted& s) { os << "shifted(" << s.base.name() << ")"; },
                 [&](const Impl::Custom& c) { os << c.name; },
             },
             impl_->v);
  return os.str();
}

bool Kernel::in_domain(double x) const noexcept {
  if (!std::isfinite(x)) return false;
  return std::visit(Overloaded{
                        [](const Impl::Normal&) { return true; },
                        [x](const Impl::Poisson& p) { return x >= p.lo && x < p.hi; },
                        [x](const Impl::Cvm&) { return x >= 0.0 && x <= 1.0; },
                        [x](const Impl::Pearson& p) { return !p.g || p.g->mass(x) > 0.0; },
                        [](const Impl::Identity&) { return true; },
                        [x](const Impl::Shifted& s) { return s.base.in_domain(x); },
                        [x](const Impl::Custom& c) { return x >= c.lo && x <= c.hi; },
                    },
                    impl_->v);
}

double Kernel::operator()(double s, double t) const {
  return std::visit(
      Overloaded{
          [&](const Impl::Normal& n) {
            if (!std::isfinite(s) || !std::isfinite(t)) throw DomainError("normal kernel: non-finite point");
            return normal_density(s - t, n.h2);
          },
          [&](const Impl::Poisson& p) {
            if (!(s >= p.lo && s < p.hi) || !(t >= p.lo && t < p.hi))
              throw DomainError("poisson kernel: point outside [lo, hi)");
            const double scale = kTwoPi / (p.hi - p.lo);
            const double d = scale * (s - t);
            return (1.0 - p.rho * p.rho) / (1.0 - 2.0 * p.rho * std::cos(d) + p.rho * p.rho);
          },
          [&](const Impl::Cvm&) {
            if (!(s >= 0.0 && s <= 1.0) || !(t >= 0.0 && t <= 1.0))
              throw DomainError("cvm kernel: point outside [0, 1]");
            return 1.0 - std::max(s, t);
          },
          [&](const Impl::Pearson& p) {
            if (!p.g) throw InvalidArgument("pearson kernel: no reference pmf bound");
            const double gs = p.g->mass(s);
            const double gt = p.g->mass(t);
            if (gs <= 0.0 || gt <= 0.0) throw DomainError("pearson kernel: undefined where g = 0");
            return s == t ? 1.0 / gs : 0.0;
          },
          [&](const Impl::Identity&) {
            if (!std::isfinite(s) || !std::isfinite(t)) throw DomainError("identity kernel: non-finite point");
            return s == t ? 1.0 : 0.0;
          },
          [&](const Impl::Shifted& sh) { return sh.base(s, t) + sh.a(s) + sh.a(t) + sh.b; },
          [&](const Impl::Custom& c) {
            if (!(s >= c.lo && s <= c.hi) || !(t >= c.lo && t <= c.hi))
              throw DomainError(c.name + ": point outside domain");
            return c.fn(s, t);
          },
      },
      impl_->v);
}

double Kernel::bandwidth2() const {
  if (const auto* n = std::get_if<Impl::Normal>(&impl_->v)) return n->h2;
  throw InvalidArgument("bandwidth2: not a normal kernel");
}

double Kernel::rho() const {
  if (const auto* p = std::get_if<Impl::Poisson>(&impl_->v)) return p->rho;
  throw InvalidArgument("rho: not a poisson kernel");
}

std::pair<double, double> Kernel::period() const {
  if (const auto* p = std::get_if<Impl::Poisson>(&impl_->v)) return {p->lo, p->hi};
  throw InvalidArgument("period: not a poisson kernel");
}

const BaselineMeasure* Kernel::reference() const noexcept {
  if (const auto* p = std::get_if<Impl::Pearson>(&impl_->v)) return p->g ? &*p->g : nullptr;
  return nullptr;
}

const Kernel* Kernel::shifted_base() const noexcept {
  if (const auto* s = std::get_if<Impl::Shifted>(&impl_->v)) return &s->base;
  return nullptr;
}

bool Kernel::bound() const noexcept {
  if (const auto* p = std::get_if<Impl::Pearson>(&impl_->v)) return p->g.has_value();
  return true;
}

Kernel Kernel::bind_reference(const BaselineMeasure& g) const {
  if (family() != KernelFamily::pearson) return *this;
  return Kernel::pearson(g);
}

Kernel convolve_normal(double h1_sq, double h2_sq) {
  if (!(h1_sq > 0.0) || !(h2_sq > 0.0)) throw InvalidArgument("convolve_normal: variances must be positive");
  return Kernel::normal(h1_sq + h2_sq);
}

Kernel sqrt_kernel(const Kernel& k) {
  if (k.family() != KernelFamily::normal)
    throw InvalidArgument("sqrt_kernel: closed form only for the normal family, got " + k.name());
  return Kernel::normal(k.bandwidth2() / 2.0);
}

Kernel gauge_shift(const Kernel& base, std::function<double(double)> a, double b) {
  if (!a) a = [](double) { return 0.0; };
  return Kernel(std::make_shared<const Kernel::Impl>(Kernel::Impl{Kernel::Impl::Shifted{base, std::move(a), b}}));
}

double min_centered_eigenvalue(const Kernel& k, std::span<const double> points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  if (m == 0) throw InvalidArgument("min_centered_eigenvalue: no points");
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = k(points[i], points[j]);
  const Eigen::VectorXd row_mean = gram.rowwise().mean();
  const double grand = row_mean.mean();
  Eigen::MatrixXd centered = gram;
  centered.colwise() -= row_mean;
  centered.rowwise() -= row_mean.transpose();
  centered.array() += grand;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("min_centered_eigenvalue: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

}  // namespace quadfit
