#include "optolattice/measure.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace optolattice {

namespace {

/// exp(A) for real antisymmetric A via the Hermitian matrix iA.
Eigen::MatrixXd expm_antisymmetric(const Eigen::MatrixXd& a) {
    const Eigen::MatrixXcd h = Complex(0.0, 1.0) * a.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success) throw NumericalError("matrix exponential: eigensolver failed");
    const Eigen::VectorXcd phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, -1.0)).array().exp();
    const Eigen::MatrixXcd e = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return e.real();
}

}  // namespace

double branch_cut_margin(const Eigen::MatrixXd& u) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(u, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalues of U~ did not converge");
    double margin = M_PI;
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
        const Complex l = es.eigenvalues()(j);
        if (std::abs(l) < 1e-12) return 0.0;
        margin = std::min(margin, M_PI - std::abs(std::arg(l)));
    }
    return margin;
}

Eigen::MatrixXd orthogonalize(const Eigen::MatrixXd& u_tilde, double min_margin) {
    const Eigen::Index n = u_tilde.rows();
    if (n == 0 || u_tilde.cols() != n) throw InputError("orthogonalize needs a square matrix");
    if (!u_tilde.allFinite()) throw InputError("orthogonalize: non-finite input");

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u_tilde.cast<Complex>());
    if (es.info() != Eigen::Success) throw NumericalError("orthogonalize: eigendecomposition failed");
    const Eigen::VectorXcd lam = es.eigenvalues();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex l = lam(j);
        if (std::abs(l) < 1e-12 || M_PI - std::abs(std::arg(l)) < min_margin) {
            std::ostringstream os;
            os << "orthogonalize: eigenvalue " << l << " violates the principal-branch condition"
               << " (singular or on the negative real axis); report U~ without orthogonalization instead";
            throw NumericalError(os.str());
        }
    }
    const Eigen::MatrixXcd& v = es.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12)) throw NumericalError("orthogonalize: eigenvector basis is ill-conditioned");
    const Eigen::VectorXcd log_lam = lam.array().log();
    const Eigen::MatrixXcd g = v * log_lam.asDiagonal() * lu.inverse();
    const Eigen::MatrixXd gr = g.real();
    const Eigen::MatrixXd a = 0.5 * (gr - gr.transpose());
    return expm_antisymmetric(a);
}

}  // namespace optolattice
