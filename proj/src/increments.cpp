#include "increments.hpp"

#include <cmath>
#include <stdexcept>

namespace conewalk {

IncrementLaw IncrementLaw::gaussian(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("gaussian: dimension out of range");
    return IncrementLaw(LawKind::GaussianStd, dim, std::numeric_limits<double>::infinity(), 0.0, 1.0);
}

IncrementLaw IncrementLaw::rademacher(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("rademacher: dimension out of range");
    return IncrementLaw(LawKind::RademacherProduct, dim, std::numeric_limits<double>::infinity(), 0.0, 1.0);
}

IncrementLaw IncrementLaw::sphere(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("sphere: dimension out of range");
    return IncrementLaw(LawKind::SphereScaled, dim, std::numeric_limits<double>::infinity(), 0.0, 1.0);
}

IncrementLaw IncrementLaw::student(int dim, double tail_index) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("student: dimension out of range");
    if (!(tail_index > 2.0)) throw std::invalid_argument("student: tail index must exceed 2 (unit variance requires it)");
    // |X| ~ Pareto(a) on [1, inf): E|X|^2 = a/(a-2); rescale to unit variance.
    double scale = std::sqrt((tail_index - 2.0) / tail_index);
    return IncrementLaw(LawKind::StudentLike, dim, tail_index, tail_index, scale);
}

IncrementLaw IncrementLaw::from_config(const std::string& variant, int dim, double tail_index) {
    if (variant == "gaussian") return gaussian(dim);
    if (variant == "rademacher") return rademacher(dim);
    if (variant == "sphere") return sphere(dim);
    if (variant == "student") return student(dim, tail_index);
    throw std::invalid_argument("unknown law variant '" + variant +
                                "' (expected gaussian, rademacher, sphere, student)");
}

double IncrementLaw::max_step() const {
    switch (kind_) {
        case LawKind::RademacherProduct:
            return std::sqrt(static_cast<double>(dim_));
        case LawKind::SphereScaled:
            return std::sqrt(static_cast<double>(dim_));
        default:
            return std::numeric_limits<double>::infinity();
    }
}

std::string IncrementLaw::description() const {
    switch (kind_) {
        case LawKind::GaussianStd: return "gaussian";
        case LawKind::RademacherProduct: return "rademacher";
        case LawKind::SphereScaled: return "sphere";
        case LawKind::StudentLike: return "student(a=" + std::to_string(tail_index_) + ")";
    }
    return "?";
}

void IncrementLaw::sample(Rng& rng, Vec& out) const {
    out.d = dim_;
    switch (kind_) {
        case LawKind::GaussianStd: {
            int i = 0;
            for (; i + 1 < dim_; i += 2) rng.normal_pair(out[i], out[i + 1]);
            if (i < dim_) out[i] = rng.normal();
            return;
        }
        case LawKind::RademacherProduct: {
            uint64_t bits = rng.next_u64();
            for (int i = 0; i < dim_; ++i) {
                out[i] = (bits & 1u) ? 1.0 : -1.0;
                bits >>= 1;
            }
            return;
        }
        case LawKind::SphereScaled: {
            double n2;
            do {
                n2 = 0.0;
                int i = 0;
                for (; i + 1 < dim_; i += 2) rng.normal_pair(out[i], out[i + 1]);
                if (i < dim_) out[i] = rng.normal();
                for (int j = 0; j < dim_; ++j) n2 += out[j] * out[j];
            } while (n2 == 0.0);
            double f = std::sqrt(static_cast<double>(dim_) / n2);
            for (int j = 0; j < dim_; ++j) out[j] *= f;
            return;
        }
        case LawKind::StudentLike: {
            for (int i = 0; i < dim_; ++i) {
                double mag = std::pow(rng.uniform_pos(), -1.0 / tail_index_);
                out[i] = (rng.next_u64() & 1u) ? scale_ * mag : -scale_ * mag;
            }
            return;
        }
    }
}

}  // namespace conewalk
