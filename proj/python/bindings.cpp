// Python bindings for the core operations: sparse matrices, the symmetric
// solvers (CR, MINRES, RMINRES), sparse approximate maps, sequence
// experiments, and the Pareto tracer.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <sstream>

#include "seqkrylov/lanczos.hpp"
#include "seqkrylov/linalg.hpp"
#include "seqkrylov/matrix_market.hpp"
#include "seqkrylov/pareto.hpp"
#include "seqkrylov/precond.hpp"
#include "seqkrylov/recycling.hpp"
#include "seqkrylov/sam.hpp"
#include "seqkrylov/sequence.hpp"
#include "seqkrylov/solve.hpp"

namespace py = pybind11;
using namespace seqkrylov;

namespace {

PatternStrategy strategy_from_string(const std::string& s) {
  if (s == "a" || s == "pattern-of-a") return PatternStrategy::PatternOfA;
  if (s == "diag" || s == "diagonal") return PatternStrategy::Diagonal;
  if (s == "threshold") return PatternStrategy::Threshold;
  throw std::invalid_argument("unknown pattern strategy: " + s);
}

SpectrumKind spectrum_from_string(const std::string& s) {
  if (s == "indefinite") return SpectrumKind::Indefinite;
  if (s == "spd") return SpectrumKind::Spd;
  if (s == "ill") return SpectrumKind::Ill;
  throw std::invalid_argument("unknown spectrum: " + s);
}

SolveOptions make_options(double tol, Index max_iter, bool record_history,
                          bool reorthogonalize) {
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.record_history = record_history;
  opts.reorthogonalize = reorthogonalize;
  opts.validate();
  return opts;
}

// Operators handed to Python own their matrix through a shared_ptr so the
// Python object lifetime is enough to keep them valid.
LinearOperator owning_operator(const SparseMatrix& a) {
  auto held = std::make_shared<SparseMatrix>(a);
  return LinearOperator{held->rows(), held->symmetric(),
                        [held](const Vector& x) { return matvec(*held, x); }};
}

LinearOperator resolve_operator(const py::object& a) {
  if (py::isinstance<SparseMatrix>(a))
    return owning_operator(a.cast<const SparseMatrix&>());
  return a.cast<LinearOperator>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Matrix-free iterative solvers for sequences of symmetric linear "
      "systems: MINRES/CR, recycling MINRES, and sparse approximate map "
      "preconditioner updates";

  py::register_exception<SolverBreakdown>(m, "SolverBreakdown");
  py::register_exception<ParseError>(m, "ParseError");

  py::class_<SparseMatrix>(m, "SparseMatrix")
      .def_static(
          "from_csc",
          [](Index n_rows, Index n_cols, std::vector<Index> col_ptr,
             std::vector<Index> row_idx, std::vector<double> vals,
             bool symmetric) {
            return SparseMatrix(n_rows, n_cols, std::move(col_ptr),
                                std::move(row_idx), std::move(vals),
                                symmetric);
          },
          py::arg("n_rows"), py::arg("n_cols"), py::arg("col_ptr"),
          py::arg("row_idx"), py::arg("vals"), py::arg("symmetric") = false)
      .def_static(
          "from_triplets",
          [](Index n_rows, Index n_cols, std::vector<Index> rows,
             std::vector<Index> cols, std::vector<double> vals,
             bool symmetric) {
            if (rows.size() != cols.size() || rows.size() != vals.size())
              throw std::invalid_argument("triplet arrays differ in length");
            std::vector<Triplet> tr(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
              tr[i] = {rows[i], cols[i], vals[i]};
            return SparseMatrix::from_triplets(n_rows, n_cols, tr, symmetric);
          },
          py::arg("n_rows"), py::arg("n_cols"), py::arg("rows"),
          py::arg("cols"), py::arg("vals"), py::arg("symmetric") = false)
      .def_static("from_dense", &SparseMatrix::from_dense, py::arg("dense"),
                  py::arg("drop_tol") = 0.0, py::arg("symmetric") = false)
      .def_static("identity", &SparseMatrix::identity, py::arg("n"))
      .def_property_readonly("shape",
                             [](const SparseMatrix& a) {
                               return py::make_tuple(a.rows(), a.cols());
                             })
      .def_property_readonly("nnz", &SparseMatrix::nnz)
      .def_property_readonly("symmetric", &SparseMatrix::symmetric)
      .def("check_symmetric", &SparseMatrix::check_symmetric,
           py::arg("tol") = 1e-12)
      .def("to_dense", &SparseMatrix::to_dense)
      .def("diagonal", &SparseMatrix::diagonal)
      .def("matvec", [](const SparseMatrix& a,
                        const Vector& x) { return matvec(a, x); })
      .def("__matmul__", [](const SparseMatrix& a,
                            const Vector& x) { return matvec(a, x); })
      .def("__repr__", [](const SparseMatrix& a) {
        std::ostringstream ss;
        ss << "SparseMatrix(" << a.rows() << "x" << a.cols()
           << ", nnz=" << a.nnz() << (a.symmetric() ? ", symmetric" : "")
           << ")";
        return ss.str();
      });

  m.def("matvec",
        [](const SparseMatrix& a, const Vector& x) { return matvec(a, x); });
  m.def("frobenius_diff", &frobenius_diff);
  m.def("add_scaled", &add_scaled);
  m.def(
      "cond_estimate",
      [](const SparseMatrix& a, Index iters) { return cond_estimate(a, iters); },
      py::arg("a"), py::arg("iters") = 200);
  m.def("cond_exact", &cond_exact);
  m.def(
      "orthonormalize",
      [](const Matrix& v, double rank_tol) {
        QrResult qr = orthonormalize(v, rank_tol);
        return py::make_tuple(qr.q, qr.r, qr.dropped);
      },
      py::arg("v"), py::arg("rank_tol") = 1e-12);

  py::class_<LinearOperator>(m, "LinearOperator")
      .def(py::init([](Index dim, std::function<Vector(const Vector&)> apply,
                       bool symmetric) {
             return LinearOperator{dim, symmetric, std::move(apply)};
           }),
           py::arg("dim"), py::arg("apply"), py::arg("symmetric") = true)
      .def_readonly("dim", &LinearOperator::dim)
      .def_readonly("symmetric", &LinearOperator::symmetric)
      .def("__call__", &LinearOperator::operator());
  m.def("operator_from_matrix", &owning_operator, py::arg("a"),
        "Wrap a SparseMatrix as a LinearOperator (copies the matrix)");

  py::class_<Preconditioner>(m, "Preconditioner")
      .def_readonly("dim", &Preconditioner::dim)
      .def_readonly("description", &Preconditioner::description)
      .def("apply_inverse", [](const Preconditioner& p, const Vector& v) {
        return p.apply_inverse(v);
      });
  m.def("identity_preconditioner", &identity_preconditioner);
  m.def("jacobi_precond", &jacobi_precond);
  m.def("ic0", &ic0);
  m.def("ic0_factor", &ic0_factor);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("relres_history", &SolveReport::relres_history)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("final_relres", &SolveReport::final_relres)
      .def_readonly("deflation_history", &SolveReport::deflation_history)
      .def("__repr__", [](const SolveReport& r) {
        std::ostringstream ss;
        ss << "SolveReport(iterations=" << r.iterations
           << ", converged=" << (r.converged ? "True" : "False")
           << ", final_relres=" << r.final_relres << ")";
        return ss.str();
      });

  py::class_<RecycleSpace>(m, "RecycleSpace")
      .def(py::init<>())
      .def(py::init([](const py::object& a, const Matrix& u_raw) {
             return RecycleSpace(resolve_operator(a), u_raw);
           }),
           py::arg("a"), py::arg("u_raw"))
      .def_property_readonly("k", &RecycleSpace::k)
      .def_property_readonly("empty", &RecycleSpace::empty)
      .def_property_readonly("u", &RecycleSpace::u)
      .def_property_readonly("c", &RecycleSpace::c);

  m.def(
      "cr_solve",
      [](const py::object& a, const Vector& b, std::optional<Vector> x0,
         double tol, Index max_iter) {
        const LinearOperator op = resolve_operator(a);
        const Vector start = x0 ? *x0 : Vector(Vector::Zero(op.dim));
        SolveResult res =
            cr_solve(op, b, start, make_options(tol, max_iter, true, false));
        return py::make_tuple(res.x, res.report);
      },
      py::arg("a"), py::arg("b"), py::arg("x0") = std::nullopt,
      py::arg("tol") = 1e-8, py::arg("max_iter") = 0);

  m.def(
      "minres_solve",
      [](const py::object& a, const Vector& b, std::optional<Vector> x0,
         double tol, Index max_iter, const Preconditioner* precond,
         bool reorthogonalize) {
        const LinearOperator op = resolve_operator(a);
        const Vector start = x0 ? *x0 : Vector(Vector::Zero(op.dim));
        SolveResult res =
            minres_solve(op, b, start,
                         make_options(tol, max_iter, true, reorthogonalize),
                         precond);
        return py::make_tuple(res.x, res.report);
      },
      py::arg("a"), py::arg("b"), py::arg("x0") = std::nullopt,
      py::arg("tol") = 1e-8, py::arg("max_iter") = 0,
      py::arg("precond") = nullptr, py::arg("reorthogonalize") = false);

  m.def(
      "rminres_solve",
      [](const py::object& a, const Vector& b, std::optional<Vector> x0,
         double tol, Index max_iter, const RecycleSpace* recycle,
         const Preconditioner* precond, Index k_out, bool record_deflation) {
        const LinearOperator op = resolve_operator(a);
        const Vector start = x0 ? *x0 : Vector(Vector::Zero(op.dim));
        RminresResult res = rminres_solve(
            op, b, start, make_options(tol, max_iter, true, false), recycle,
            precond, k_out, record_deflation);
        return py::make_tuple(res.x, res.report, res.recycle);
      },
      py::arg("a"), py::arg("b"), py::arg("x0") = std::nullopt,
      py::arg("tol") = 1e-8, py::arg("max_iter") = 0,
      py::arg("recycle") = nullptr, py::arg("precond") = nullptr,
      py::arg("k_out") = 10, py::arg("record_deflation") = false);

  m.def(
      "ritz_extract",
      [](const Matrix& basis, const RecycleSpace* r_in, Index k_out,
         const py::object& a) {
        return ritz_extract(basis, r_in, k_out, resolve_operator(a));
      },
      py::arg("basis"), py::arg("r_in"), py::arg("k_out"), py::arg("a"));

  m.def(
      "project_initial",
      [](const py::object& a, const Vector& b, const Vector& x0,
         const RecycleSpace& r) {
        ProjectionResult pr = project_initial(resolve_operator(a), b, x0, r);
        return py::make_tuple(pr.x, pr.r);
      },
      py::arg("a"), py::arg("b"), py::arg("x0"), py::arg("recycle"));

  // Sparse approximate maps
  py::class_<SamMap>(m, "SamMap")
      .def_property_readonly("n_map",
                             [](const SamMap& s) { return s.n_map; })
      .def_readonly("residual_fro", &SamMap::residual_fro)
      .def_readonly("column_residuals", &SamMap::column_residuals)
      .def_readonly("rank_deficient_columns", &SamMap::rank_deficient_columns)
      .def_readonly("empty_columns", &SamMap::empty_columns);

  m.def(
      "compute_sam",
      [](const SparseMatrix& a_k, const SparseMatrix& a_0,
         const std::string& pattern, double tau, int threads) {
        const SparsityPattern p =
            build_pattern(a_k, strategy_from_string(pattern), tau);
        return compute_sam(a_k, a_0, p, threads);
      },
      py::arg("a_k"), py::arg("a_0"), py::arg("pattern") = "a",
      py::arg("tau") = 0.1, py::arg("threads") = 0);
  m.def("sam_precondition", &sam_precondition);

  // Sequences and experiments
  py::class_<SystemSequence>(m, "SystemSequence")
      .def_readonly("mats", &SystemSequence::mats)
      .def_readonly("rhs", &SystemSequence::rhs)
      .def_readonly("n", &SystemSequence::n)
      .def_readonly("provenance", &SystemSequence::provenance)
      .def("__len__", &SystemSequence::count);

  m.def(
      "generate_sequence",
      [](Index n, Index m_count, double eps, const std::string& spectrum,
         double kappa, std::uint64_t seed) {
        SequenceConfig cfg;
        cfg.n = n;
        cfg.m = m_count;
        cfg.drift = eps;
        cfg.spectrum = spectrum_from_string(spectrum);
        cfg.kappa = kappa;
        cfg.seed = seed;
        return generate_sequence(cfg);
      },
      py::arg("n"), py::arg("m"), py::arg("eps") = 1e-4,
      py::arg("spectrum") = "indefinite", py::arg("kappa") = 1e6,
      py::arg("seed") = 1);
  m.def("load_sequence", &load_sequence, py::arg("paths"));

  py::class_<ComparisonRecord>(m, "ComparisonRecord")
      .def_readonly("k", &ComparisonRecord::k)
      .def_readonly("minres_iters", &ComparisonRecord::minres_iters)
      .def_readonly("rminres_iters", &ComparisonRecord::rminres_iters)
      .def_readonly("frob_diff_prev", &ComparisonRecord::frob_diff_prev)
      .def_readonly("cond_est", &ComparisonRecord::cond_est)
      .def_readonly("minres_relres", &ComparisonRecord::minres_relres)
      .def_readonly("rminres_relres", &ComparisonRecord::rminres_relres)
      .def_readonly("minres_converged", &ComparisonRecord::minres_converged)
      .def_readonly("rminres_converged", &ComparisonRecord::rminres_converged);

  py::class_<SequenceSummary>(m, "SequenceSummary")
      .def_readonly("total_minres_iters", &SequenceSummary::total_minres_iters)
      .def_readonly("total_rminres_iters",
                    &SequenceSummary::total_rminres_iters)
      .def_readonly("reduction_percent", &SequenceSummary::reduction_percent)
      .def_readonly("partial", &SequenceSummary::partial)
      .def_readonly("records", &SequenceSummary::records);

  m.def(
      "run_comparison",
      [](const SystemSequence& seq, double tol, Index max_iter,
         Index k_recycle, bool exact_cond) {
        ComparisonOptions opts;
        opts.solve = make_options(tol, max_iter, true, false);
        opts.k_recycle = k_recycle;
        opts.exact_cond = exact_cond;
        return run_comparison(seq, opts);
      },
      py::arg("seq"), py::arg("tol") = 1e-8, py::arg("max_iter") = 0,
      py::arg("k_recycle") = 10, py::arg("exact_cond") = false);

  py::class_<SamEvalRecord>(m, "SamEvalRecord")
      .def_readonly("k", &SamEvalRecord::k)
      .def_readonly("residual_fro", &SamEvalRecord::residual_fro)
      .def_readonly("map_nnz", &SamEvalRecord::map_nnz)
      .def_readonly("iters_seed", &SamEvalRecord::iters_seed)
      .def_readonly("iters_sam", &SamEvalRecord::iters_sam)
      .def_readonly("seed_converged", &SamEvalRecord::seed_converged)
      .def_readonly("sam_converged", &SamEvalRecord::sam_converged);

  py::class_<SamEvalReport>(m, "SamEvalReport")
      .def_readonly("records", &SamEvalReport::records)
      .def_readonly("warning", &SamEvalReport::warning);

  m.def(
      "run_sam_eval",
      [](const SystemSequence& seq, const std::string& pattern, double tau,
         const std::string& seed_precond, bool target_previous, double tol,
         Index max_iter, int threads) {
        SamEvalOptions opts;
        opts.pattern = strategy_from_string(pattern);
        opts.tau = tau;
        opts.target_previous = target_previous;
        opts.solve = make_options(tol, max_iter, true, false);
        opts.threads = threads;
        if (seed_precond == "jacobi")
          opts.seed_precond = SeedPrecond::Jacobi;
        else if (seed_precond == "ic0")
          opts.seed_precond = SeedPrecond::Ic0;
        else if (seed_precond != "none")
          throw std::invalid_argument("unknown seed preconditioner: " +
                                      seed_precond);
        return run_sam_eval(seq, opts);
      },
      py::arg("seq"), py::arg("pattern") = "a", py::arg("tau") = 0.1,
      py::arg("seed_precond") = "none", py::arg("target_previous") = false,
      py::arg("tol") = 1e-8, py::arg("max_iter") = 0, py::arg("threads") = 0);

  m.def(
      "emit_report",
      [](const SequenceSummary& summary, const std::string& format,
         const std::string& path) {
        emit_report(summary,
                    format == "json" ? ReportFormat::Json : ReportFormat::Csv,
                    path);
      },
      py::arg("summary"), py::arg("format"), py::arg("path"));

  m.def("load_matrix_market", &load_matrix_market);
  m.def("save_matrix_market", &save_matrix_market);
  m.def("load_vector", &load_vector);
  m.def("save_vector", &save_vector);

  // Pareto tracer
  py::class_<ParetoPoint>(m, "ParetoPoint")
      .def_readonly("x", &ParetoPoint::x)
      .def_readonly("w", &ParetoPoint::w)
      .def_readonly("f", &ParetoPoint::f)
      .def_readonly("stationarity_norm", &ParetoPoint::stationarity_norm);

  py::class_<FrontTrace>(m, "FrontTrace")
      .def_readonly("points", &FrontTrace::points)
      .def_readonly("predictor_iters", &FrontTrace::predictor_iters)
      .def_readonly("total_predictor_iters",
                    &FrontTrace::total_predictor_iters)
      .def_readonly("completed", &FrontTrace::completed);

  m.def(
      "trace_front",
      [](const std::string& model_name, Index dim, Index steps, double h,
         const std::string& solver, Index k_recycle, double tol,
         std::uint64_t seed) {
        const ObjectiveModel model = model_name == "quartic"
                                         ? make_quartic_model(dim, seed)
                                         : make_biquad_model(dim, seed);
        Vector w0(2);
        w0 << 1.0, 0.0;
        const ParetoPoint start =
            corrector_step(model, Vector::Zero(dim), w0, tol, 1000);
        TraceOptions opts;
        opts.steps = steps;
        opts.h = h;
        opts.solver = solver == "rminres" ? PredictorSolver::Rminres
                                          : PredictorSolver::Minres;
        opts.k_recycle = k_recycle;
        opts.corrector_tol = tol;
        return trace_front(model, start, opts);
      },
      py::arg("model") = "biquad", py::arg("dim") = 50, py::arg("steps") = 10,
      py::arg("h") = 1.0, py::arg("solver") = "minres",
      py::arg("k_recycle") = 10, py::arg("tol") = 1e-8, py::arg("seed") = 1);
}
