#include <specprune/denoise.hpp>

#include <specprune/parallel.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <limits>

namespace specprune {

namespace {

constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

double sample_std(const Eigen::Ref<const Vector> &v) {
    if (v.size() < 2)
        return 0.0;
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

} // namespace

NoiseEstimate estimate_noise_mlr(const HsiCube &cube, std::optional<double> ridge,
                                 std::size_t threads) {
    if (ridge && !(*ridge >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "ridge must be >= 0");
    cube.check_finite();
    const Matrix &x = cube.data();
    const Index n = x.rows();
    const Index l = x.cols();

    NoiseEstimate est;
    est.noise = Matrix::Zero(n, l);
    est.band_sigma.assign(static_cast<std::size_t>(l), 0.0);
    if (n == 1) {
        est.warnings.emplace_back("single-pixel cube: regression undefined, noise set to zero");
        return est;
    }
    if (n < l)
        est.warnings.emplace_back("fewer pixels (" + std::to_string(n) + ") than bands (" +
                                  std::to_string(l) + "): noise estimate is unreliable");

    std::vector<Index> regressors;
    for (Index b = 0; b < l; ++b) {
        if (x.col(b).maxCoeff() == x.col(b).minCoeff())
            est.warnings.emplace_back("band " + std::to_string(b) +
                                      " is constant: passed through unchanged");
        else
            regressors.push_back(b);
    }

    const Matrix gram = x.transpose() * x;

    parallel_for(regressors.size(), threads, [&](std::size_t t) {
        const Index band = regressors[t];
        std::vector<Index> others;
        others.reserve(regressors.size());
        for (Index b : regressors)
            if (b != band)
                others.push_back(b);
        if (others.empty())
            return;

        const Index q = static_cast<Index>(others.size());
        Matrix normal(q, q);
        Vector rhs(q);
        Matrix design(n, q);
        for (Index a = 0; a < q; ++a) {
            rhs(a) = gram(others[static_cast<std::size_t>(a)], band);
            design.col(a) = x.col(others[static_cast<std::size_t>(a)]);
            for (Index c = 0; c < q; ++c)
                normal(a, c) = gram(others[static_cast<std::size_t>(a)],
                                    others[static_cast<std::size_t>(c)]);
        }

        Vector beta;
        if (!ridge) {
            // Minimum-norm least squares, the zero-ridge limit: invert the
            // normal matrix on its numerically nonzero eigenvalues only.
            const Eigen::SelfAdjointEigenSolver<Matrix> eig(normal);
            const Vector &mu = eig.eigenvalues();
            const double cutoff = static_cast<double>(q) * kEpsilon * std::max(mu.maxCoeff(), 0.0);
            const Vector proj = eig.eigenvectors().transpose() * rhs;
            Vector scaled = Vector::Zero(q);
            for (Index i = 0; i < q; ++i)
                if (mu(i) > cutoff)
                    scaled(i) = proj(i) / mu(i);
            beta = eig.eigenvectors() * scaled;
        } else if (*ridge == 0.0) {
            const Eigen::FullPivLU<Matrix> lu(normal);
            if (!lu.isInvertible())
                throw Error(ErrorKind::SingularRegression,
                            "normal matrix for band " + std::to_string(band) + " is singular");
            beta = lu.solve(rhs);
        } else {
            normal.diagonal().array() += *ridge;
            beta = normal.ldlt().solve(rhs);
        }
        est.noise.col(band) = x.col(band) - design * beta;
        est.band_sigma[static_cast<std::size_t>(band)] = sample_std(est.noise.col(band));
    });
    return est;
}

HsiCube denoise(const HsiCube &cube, std::optional<double> ridge,
                std::vector<std::string> *warnings) {
    NoiseEstimate est = estimate_noise_mlr(cube, ridge);
    if (warnings)
        warnings->insert(warnings->end(), est.warnings.begin(), est.warnings.end());
    return HsiCube(cube.data() - est.noise, cube.lines(), cube.samples(), cube.wavelengths());
}

} // namespace specprune
