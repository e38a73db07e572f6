#include "ttstream/metrics.hpp"

namespace ttstream {

double compression_ratio(const TensorTrain& tt) {
    double elements = 1.0;
    for (Index n : tt.mode_sizes()) elements *= static_cast<double>(n);
    return elements / static_cast<double>(tt.param_count());
}

namespace {

double relative_error(const DenseTensor& ref, const DenseTensor& approx,
                      bool* zero_reference) {
    if (zero_reference) *zero_reference = false;
    if (ref.shape() != approx.shape()) {
        throw DimensionError("reference shape does not match reconstruction");
    }
    const double ref_norm = ref.frobenius_norm();
    if (ref_norm == 0.0) {
        if (zero_reference) *zero_reference = true;
        return 0.0;
    }
    const auto a = ref.as_matrix(ref.size(), 1);
    const auto b = approx.as_matrix(approx.size(), 1);
    return (a - b).norm() / ref_norm;
}

} // namespace

double rre(const TensorTrain& tt, const DenseTensor& x_ref, Index obs_begin,
           Index obs_end, bool* zero_reference) {
    return relative_error(x_ref, tt_reconstruct(tt, obs_begin, obs_end),
                          zero_reference);
}

double rre(const TensorTrain& tt, const DenseTensor& x_ref, bool* zero_reference) {
    return rre(tt, x_ref, 0, tt.obs_count(), zero_reference);
}

double rpe(const TensorTrain& tt, const DenseTensor& unseen, bool* zero_reference) {
    const Matrix coeffs = tt_project(tt, unseen);
    return relative_error(unseen, tt_expand(tt, coeffs), zero_reference);
}

IncrementErrors mean_rre_per_increment(const TensorTrain& tt,
                                       std::span<const DenseTensor> refs) {
    if (static_cast<Index>(refs.size()) != tt.num_increments()) {
        throw DimensionError("need one reference per stored increment");
    }
    IncrementErrors out;
    out.per_increment.reserve(refs.size());
    double sum = 0.0;
    for (Index k = 0; k < tt.num_increments(); ++k) {
        const auto [begin, end] = tt.increment_range(k);
        const auto& ref = refs[static_cast<std::size_t>(k)];
        if (ref.shape().back() != end - begin) {
            throw DimensionError("reference observation count does not match increment");
        }
        const double e = rre(tt, ref, begin, end);
        out.per_increment.push_back(e);
        sum += e;
    }
    out.mean = out.per_increment.empty()
                   ? 0.0
                   : sum / static_cast<double>(out.per_increment.size());
    return out;
}

} // namespace ttstream
