#pragma once

// Assembly of sparse Jacobians from SparseDual residuals and a thin wrapper
// around the UMFPACK sparse LU.

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <string>
#include <vector>

#include "porehom/errors.hpp"
#include "porehom/sparse_dual.hpp"

namespace porehom {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Builds the Jacobian (rows = residual entries) and the residual vector.
inline void assemble_jacobian(const std::vector<ad::SparseDual>& residual, int n_unknowns, SparseMatrix& jac,
                              Vector& value)
{
    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t nnz = 0;
    for (const auto& r : residual) nnz += r.derivatives().size();
    triplets.reserve(nnz);
    value.resize(static_cast<Eigen::Index>(residual.size()));
    for (std::size_t row = 0; row < residual.size(); ++row) {
        value[static_cast<Eigen::Index>(row)] = residual[row].value();
        for (const auto& e : residual[row].derivatives())
            triplets.emplace_back(static_cast<int>(row), e.index, e.value);
    }
    jac.resize(static_cast<Eigen::Index>(residual.size()), n_unknowns);
    jac.setFromTriplets(triplets.begin(), triplets.end());
    jac.makeCompressed();
}

inline std::vector<ad::SparseDual> make_variables(const Vector& x)
{
    std::vector<ad::SparseDual> vars;
    vars.reserve(static_cast<std::size_t>(x.size()));
    for (Eigen::Index k = 0; k < x.size(); ++k) vars.push_back(ad::SparseDual::variable(x[k], static_cast<int>(k)));
    return vars;
}

/// LU factorization that keeps its symbolic analysis across refactorizations
/// with the same sparsity pattern.
class SparseLuSolver {
public:
    void factorize(const SparseMatrix& a, const std::string& context)
    {
        if (!same_pattern(a)) {
            lu_.analyzePattern(a);
            outer_.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
            inner_.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
            rows_ = a.rows();
        }
        lu_.factorize(a);
        if (lu_.info() != Eigen::Success)
            throw SolverError(context + ": sparse LU factorization failed (singular or ill-conditioned matrix)");
    }

    Vector solve(const Vector& b, const std::string& context) const
    {
        Vector x = lu_.solve(b);
        if (lu_.info() != Eigen::Success || !x.allFinite())
            throw SolverError(context + ": sparse LU solve failed");
        return x;
    }

private:
    bool same_pattern(const SparseMatrix& a) const
    {
        if (a.rows() != rows_ || static_cast<std::size_t>(a.outerSize() + 1) != outer_.size() ||
            static_cast<std::size_t>(a.nonZeros()) != inner_.size())
            return false;
        return std::equal(outer_.begin(), outer_.end(), a.outerIndexPtr()) &&
               std::equal(inner_.begin(), inner_.end(), a.innerIndexPtr());
    }

    Eigen::UmfPackLU<SparseMatrix> lu_;
    std::vector<int> outer_;
    std::vector<int> inner_;
    Eigen::Index rows_ = -1;
};

/// Preconditioned BiCGSTAB for diagonally dominant systems (implicit
/// Allen-Cahn steps), falling back to the sparse LU when it stalls.
class IterativeSolver {
public:
    explicit IterativeSolver(double tolerance = 1e-10) : tolerance_(tolerance) {}

    void compute(const SparseMatrix& a, const std::string& context)
    {
        matrix_ = &a;
        use_fallback_ = false;
        solver_.setTolerance(tolerance_);
        solver_.setMaxIterations(500);
        solver_.compute(a);
        if (solver_.info() != Eigen::Success) switch_to_fallback(context);
    }

    Vector solve(const Vector& b, const std::string& context)
    {
        if (!use_fallback_) {
            Vector x = solver_.solve(b);
            if (solver_.info() == Eigen::Success && x.allFinite()) return x;
            switch_to_fallback(context);
        }
        return fallback_.solve(b, context);
    }

private:
    void switch_to_fallback(const std::string& context)
    {
        fallback_.factorize(*matrix_, context);
        use_fallback_ = true;
    }

    double tolerance_;
    const SparseMatrix* matrix_ = nullptr;
    bool use_fallback_ = false;
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver_;
    SparseLuSolver fallback_;
};

}  // namespace porehom
