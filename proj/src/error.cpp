#include "zzsfem/error.hpp"

#include <cmath>
#include <numeric>

namespace zzsfem {

namespace {

struct NormSquares {
    double estimated = 0;
    double exact = 0;
    double recovered = 0;
};

bool touches_singularity(const Mesh& mesh, int e, const QuadratureOptions& options)
{
    if (!options.singular_point)
        return false;
    const quad::Corners x = mesh.corners(e);
    const double h = (x.col(2) - x.col(0)).norm();
    for (int i = 0; i < 4; ++i)
        if ((x.col(i) - *options.singular_point).norm() <= 1e-12 * h)
            return true;
    return false;
}

NormSquares element_norms(const DiscreteSolution& solution, const RecoveredStressField* field,
                          const StressFunction* exact, int e, const QuadratureOptions& options)
{
    const Mesh& mesh = solution.mesh();
    const quad::Corners x = mesh.corners(e);
    const Mat3 s = compliance_matrix(solution.material());
    const int order = touches_singularity(mesh, e, options) ? options.singular_order : options.regular_order;

    std::vector<std::pair<Vec2, Vec2>> regions;
    if (solution.formulation().smoothed())
        for (const SmoothingCell& c : solution.cells(e))
            regions.emplace_back(c.parent_lo, c.parent_hi);
    else
        regions.emplace_back(Vec2(-1, -1), Vec2(1, 1));

    NormSquares out;
    for (const auto& [lo, hi] : regions) {
        for (const quad::QuadraturePoint& qp : quad::tensor_rule(order, lo, hi)) {
            const double w = qp.weight * quad::jacobian(x, qp.parent).determinant();
            const Stress sh = solution.stress_at(e, qp.parent);
            Stress rec = Stress::Zero();
            if (field) {
                rec = field->at_parent(e, qp.parent);
                const Stress d = rec - sh;
                out.estimated += w * d.dot(s * d);
            }
            if (exact) {
                const Stress ex = (*exact)(quad::map(x, qp.parent));
                const Stress d = ex - sh;
                out.exact += w * d.dot(s * d);
                if (field) {
                    const Stress dr = ex - rec;
                    out.recovered += w * dr.dot(s * dr);
                }
            }
        }
    }
    return out;
}

template <typename Pick>
double accumulate(const DiscreteSolution& solution, const RecoveredStressField* field, const StressFunction* exact,
                  int element, const QuadratureOptions& options, Pick pick)
{
    if (element >= 0)
        return std::sqrt(pick(element_norms(solution, field, exact, element, options)));
    double sum = 0;
    for (int e = 0; e < solution.mesh().num_elements(); ++e)
        sum += pick(element_norms(solution, field, exact, e, options));
    return std::sqrt(sum);
}

} // namespace

double estimated_error_norm(const DiscreteSolution& solution, const RecoveredStressField& field, int element,
                            const QuadratureOptions& options)
{
    return accumulate(solution, &field, nullptr, element, options, [](const NormSquares& n) { return n.estimated; });
}

double exact_error_norm(const DiscreteSolution& solution, const StressFunction& exact, int element,
                        const QuadratureOptions& options)
{
    return accumulate(solution, nullptr, &exact, element, options, [](const NormSquares& n) { return n.exact; });
}

double recovered_error_norm(const RecoveredStressField& field, const DiscreteSolution& solution,
                            const StressFunction& exact, int element, const QuadratureOptions& options)
{
    return accumulate(solution, &field, &exact, element, options, [](const NormSquares& n) { return n.recovered; });
}

double local_effectivity(double theta_e)
{
    return theta_e >= 1 ? theta_e - 1 : 1 - 1 / theta_e;
}

EffectivityStats effectivity(std::vector<ElementError>& elements)
{
    double est2 = 0, ex2 = 0;
    for (const ElementError& el : elements) {
        est2 += el.estimated * el.estimated;
        ex2 += el.exact * el.exact;
    }
    EffectivityStats stats;
    if (!(ex2 > 0))
        throw NumericalError("effectivity undefined: exact error is zero");
    stats.theta = std::sqrt(est2 / ex2);
    const double cutoff = 1e-14 * std::sqrt(ex2);

    double sum_abs = 0, sum = 0;
    int count = 0;
    for (ElementError& el : elements) {
        el.included = el.exact > cutoff;
        if (!el.included) {
            el.theta = 0;
            el.d = 0;
            ++stats.excluded;
            continue;
        }
        el.theta = el.estimated / el.exact;
        el.d = local_effectivity(el.theta);
        sum_abs += std::abs(el.d);
        sum += el.d;
        ++count;
    }
    if (count > 0) {
        stats.mean_abs_d = sum_abs / count;
        const double mean = sum / count;
        double var = 0;
        for (const ElementError& el : elements)
            if (el.included)
                var += (el.d - mean) * (el.d - mean);
        stats.sigma_d = std::sqrt(var / count);
    }
    return stats;
}

ErrorReport compute_error_report(const DiscreteSolution& solution, const RecoveredStressField& field,
                                 const StressFunction& exact, const QuadratureOptions& options)
{
    ErrorReport report;
    report.dofs = solution.num_dofs();
    double est2 = 0, ex2 = 0, rec2 = 0;
    report.elements.reserve(solution.mesh().num_elements());
    for (int e = 0; e < solution.mesh().num_elements(); ++e) {
        const NormSquares n = element_norms(solution, &field, &exact, e, options);
        est2 += n.estimated;
        ex2 += n.exact;
        rec2 += n.recovered;
        report.elements.push_back({e, std::sqrt(n.estimated), std::sqrt(n.exact), std::sqrt(n.recovered), 0, 0, true});
    }
    report.estimated = std::sqrt(est2);
    report.exact = std::sqrt(ex2);
    report.recovered = std::sqrt(rec2);
    if (!(ex2 > 0)) {
        for (ElementError& el : report.elements)
            el.included = false;
        report.excluded = static_cast<int>(report.elements.size());
        return report;
    }
    const EffectivityStats stats = effectivity(report.elements);
    report.theta = stats.theta;
    report.mean_abs_d = stats.mean_abs_d;
    report.sigma_d = stats.sigma_d;
    report.excluded = stats.excluded;
    return report;
}

ConvergenceRate convergence_rate(const std::vector<double>& dofs, const std::vector<double>& values)
{
    if (dofs.size() != values.size() || dofs.size() < 2)
        throw std::invalid_argument("convergence rate needs at least two (dof, value) pairs");
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        if (!(values[i] > 0) || !(dofs[i] > 0))
            throw std::invalid_argument("convergence rate needs positive values");
        if (i > 0 && !(dofs[i] > dofs[i - 1]))
            throw std::invalid_argument("convergence rate needs strictly increasing dofs");
    }
    const std::size_t n = dofs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(dofs[i]);
        ly[i] = std::log(values[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    ConvergenceRate rate;
    rate.fitted = -sxy / sxx;
    for (std::size_t i = 1; i < n; ++i)
        rate.pairwise.push_back(-(ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]));
    rate.average = std::accumulate(rate.pairwise.begin(), rate.pairwise.end(), 0.0) / rate.pairwise.size();
    return rate;
}

} // namespace zzsfem
