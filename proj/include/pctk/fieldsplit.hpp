/// \file fieldsplit.hpp
/// \brief Fieldsplit preconditioning over a SplittableMatrix: additive,
/// multiplicative (block Gauss-Seidel) and Schur-factorization composition,
/// with per-group sub-solvers built from the options database.
///
/// Groups default to one per field; {prefix}pc_fieldsplit_<i>_fields keys
/// (comma-separated field names, optional {prefix}pc_fieldsplit_<i>_name)
/// combine fields arbitrarily, including non-adjacent ones. Sub-solvers read
/// their configuration on child scopes fieldsplit_<group>_.

#pragma once

#include <sstream>

#include "pctk/solver.hpp"

namespace pctk {

enum class FieldsplitType { additive, multiplicative, schur };
enum class SchurFactType { diag, lower, upper, full };
enum class SchurPrecondition { selfp, user, a11 };

namespace detail {

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(pos, comma - pos);
    const auto a = item.find_first_not_of(" \t");
    if (a != std::string::npos) {
      const auto b = item.find_last_not_of(" \t");
      out.push_back(item.substr(a, b - a + 1));
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

class FieldsplitPc final : public Preconditioner {
public:
  FieldsplitPc(std::shared_ptr<const SplittableMatrix> M, const OptionsScope& scope,
               const AuxOperators& aux, const PcFactory& factory)
      : M_(std::move(M)) {
    require(M_ != nullptr, "fieldsplit: null operator");
    require(M_->matrix.nrows() == M_->matrix.ncols(),
            "fieldsplit: operator must be square");
    n_ = M_->matrix.nrows();
    check_layouts_match();
    read_groups(scope);
    read_type(scope);

    // validates coverage / duplicates / unknown names
    std::vector<std::pair<std::string, std::vector<std::string>>> as_pairs;
    for (const Group& g : groups_) as_pairs.push_back({g.name, g.fields});
    group_fields(M_->row_layout, as_pairs);

    if (type_ == FieldsplitType::schur) {
      if (groups_.size() != 2)
        throw ConfigError(scope.full_key("pc_fieldsplit_type"),
                          detail::strfmt("schur fieldsplit requires exactly 2 groups, got %zu",
                                         groups_.size()));
      setup_schur(scope, aux, factory);
    } else {
      setup_split(scope, aux, factory);
    }
    stationary_ = true;
    for (const auto& s : solvers_)
      if (!s->effectively_stationary()) stationary_ = false;
  }

  void apply(const DenseVector& r, DenseVector& z) override {
    require(static_cast<index_t>(r.size()) == n_, "fieldsplit: size mismatch");
    z.assign(r.size(), 0.0);
    switch (type_) {
      case FieldsplitType::additive: apply_additive(r, z); break;
      case FieldsplitType::multiplicative: apply_multiplicative(r, z); break;
      case FieldsplitType::schur: apply_schur(r, z); break;
    }
  }

  index_t size() const override { return n_; }

  std::string name() const override {
    switch (type_) {
      case FieldsplitType::additive: return "fieldsplit(additive)";
      case FieldsplitType::multiplicative: return "fieldsplit(multiplicative)";
      case FieldsplitType::schur:
        return detail::strfmt("fieldsplit(schur, fact=%s, precondition=%s)",
                              fact_name(), sprec_name());
    }
    return "fieldsplit";
  }

  bool stationary() const override { return stationary_; }

  void collect_stats(std::vector<SubSolveStats>& out) const override {
    for (const auto& s : solvers_) out.push_back(s->stats());
  }

  void describe(std::ostream& os, int indent) const override {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    os << pad << name() << "\n";
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      os << pad << "  [" << groups_[i].name << "] fields:";
      for (const std::string& f : groups_[i].fields) os << " " << f;
      os << " -> ";
      std::ostringstream sub;
      solvers_[i]->solver().describe(sub, indent + 4);
      std::string s = sub.str();
      // first line inline, rest verbatim
      const auto nl = s.find('\n');
      os << s.substr(static_cast<std::size_t>(indent) + 4,
                     nl == std::string::npos ? std::string::npos
                                             : nl - static_cast<std::size_t>(indent) - 4)
         << "\n"
         << (nl == std::string::npos ? "" : s.substr(nl + 1));
    }
  }

  FieldsplitType type() const { return type_; }

private:
  struct Group {
    std::string name;
    std::vector<std::string> fields;
  };

  struct SchurData {
    SchurFactType fact = SchurFactType::full;
    SchurPrecondition sprec = SchurPrecondition::a11;
    double scale = 1.0;  // applied to the S-solve result (sign convention knob)
    CsrMatrix B;   // (1,0) block
    CsrMatrix Bt;  // (0,1) block
    CsrMatrix C;   // (1,1) block
    std::shared_ptr<const CsrMatrix> Sp;  // Schur preconditioning matrix
  };

  void check_layouts_match() const {
    const auto& rf = M_->row_layout.fields();
    const auto& cf = M_->col_layout.fields();
    require(rf.size() == cf.size(), "fieldsplit: row/column field layouts differ");
    for (std::size_t i = 0; i < rf.size(); ++i)
      require(rf[i].name == cf[i].name, "fieldsplit: row/column field layouts differ");
  }

  void read_groups(const OptionsScope& scope) {
    for (index_t i = 0;; ++i) {
      auto v = scope.get_if(detail::strfmt("pc_fieldsplit_%d_fields", i));
      if (!v) break;
      Group g;
      g.fields = detail::split_csv(*v);
      if (g.fields.empty())
        throw ConfigError(scope.full_key(detail::strfmt("pc_fieldsplit_%d_fields", i)),
                          "empty fieldsplit group");
      g.name = scope.get(detail::strfmt("pc_fieldsplit_%d_name", i),
                         detail::strfmt("%d", i));
      groups_.push_back(std::move(g));
    }
    if (groups_.empty())
      for (const FieldSpec& f : M_->row_layout.fields())
        groups_.push_back({f.name, {f.name}});
    if (groups_.size() < 2)
      throw ConfigError(
          scope.full_key("pc_type"),
          "fieldsplit requires at least 2 fields or groups; the operator exposes "
          "fewer");
  }

  void read_type(const OptionsScope& scope) {
    const std::string t = scope.get("pc_fieldsplit_type", "additive");
    if (t == "additive")
      type_ = FieldsplitType::additive;
    else if (t == "multiplicative")
      type_ = FieldsplitType::multiplicative;
    else if (t == "schur")
      type_ = FieldsplitType::schur;
    else
      throw ConfigError(scope.full_key("pc_fieldsplit_type"),
                        "option " + scope.full_key("pc_fieldsplit_type") +
                            ": expected additive|multiplicative|schur, got '" + t + "'");
  }

  std::shared_ptr<const SplittableMatrix> extract_shared(const Group& gr,
                                                         const Group& gc) const {
    return std::make_shared<const SplittableMatrix>(
        extract_block(*M_, gr.fields, gc.fields));
  }

  void add_solver(const OptionsScope& scope, const AuxOperators& aux,
                  const PcFactory& factory, const Group& g,
                  std::shared_ptr<const SplittableMatrix> block) {
    const OptionsScope sub = scope.child("fieldsplit_" + g.name);
    Solver s = solver_from_options(sub, LinearOperator::from_csr(std::shared_ptr<const CsrMatrix>(
                                            block, &block->matrix)),
                                   factory, make_pc_input(block, aux));
    solvers_.push_back(std::make_unique<NestedSolver>(sub.prefix(), std::move(s)));
  }

  void setup_split(const OptionsScope& scope, const AuxOperators& aux,
                   const PcFactory& factory) {
    for (const Group& g : groups_) add_solver(scope, aux, factory, g, extract_shared(g, g));
    if (type_ == FieldsplitType::multiplicative) {
      offdiag_.resize(groups_.size());
      for (std::size_t i = 1; i < groups_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
          offdiag_[i].push_back(
              extract_block(*M_, groups_[i].fields, groups_[j].fields).matrix);
    }
  }

  void setup_schur(const OptionsScope& scope, const AuxOperators& aux,
                   const PcFactory& factory) {
    schur_ = std::make_unique<SchurData>();
    const std::string fact = scope.get("pc_fieldsplit_schur_fact_type", "full");
    if (fact == "diag")
      schur_->fact = SchurFactType::diag;
    else if (fact == "lower")
      schur_->fact = SchurFactType::lower;
    else if (fact == "upper")
      schur_->fact = SchurFactType::upper;
    else if (fact == "full")
      schur_->fact = SchurFactType::full;
    else
      throw ConfigError(scope.full_key("pc_fieldsplit_schur_fact_type"),
                        "option " + scope.full_key("pc_fieldsplit_schur_fact_type") +
                            ": expected diag|lower|upper|full, got '" + fact + "'");
    // Sign convention for the S-solve result. The exact Schur complement of a
    // saddle point is negative definite while the usual preconditioning
    // matrices (Laplacian surrogates, selfp) are positive; scale = -1 restores
    // the one-sided preconditioned spectrum in that situation.
    schur_->scale = scope.get_real("pc_fieldsplit_schur_scale", 1.0);
    const std::string sprec = scope.get("pc_fieldsplit_schur_precondition", "a11");
    if (sprec == "selfp")
      schur_->sprec = SchurPrecondition::selfp;
    else if (sprec == "user")
      schur_->sprec = SchurPrecondition::user;
    else if (sprec == "a11")
      schur_->sprec = SchurPrecondition::a11;
    else
      throw ConfigError(scope.full_key("pc_fieldsplit_schur_precondition"),
                        "option " + scope.full_key("pc_fieldsplit_schur_precondition") +
                            ": expected selfp|user|a11, got '" + sprec + "'");

    const Group& g0 = groups_[0];
    const Group& g1 = groups_[1];
    auto K00 = extract_shared(g0, g0);
    schur_->B = extract_block(*M_, g1.fields, g0.fields).matrix;
    schur_->Bt = extract_block(*M_, g0.fields, g1.fields).matrix;
    schur_->C = extract_block(*M_, g1.fields, g1.fields).matrix;
    const index_t n1 = schur_->C.nrows();

    switch (schur_->sprec) {
      case SchurPrecondition::selfp: {
        // B diag(A)^-1 B^T assembled explicitly
        DenseVector d = diagonal(K00->matrix);
        std::vector<Triplet> t;
        for (index_t i = 0; i < K00->matrix.nrows(); ++i) {
          require(d[i] != 0.0,
                  detail::strfmt("schur_precondition=selfp: zero diagonal at row %d of "
                                 "the (0,0) block",
                                 i));
          t.push_back({i, i, 1.0 / d[i]});
        }
        const CsrMatrix Dinv =
            CsrMatrix::from_triplets(K00->matrix.nrows(), K00->matrix.nrows(), t);
        schur_->Sp = std::make_shared<const CsrMatrix>(
            matmat(matmat(schur_->B, Dinv), schur_->Bt));
        break;
      }
      case SchurPrecondition::user: {
        if (!aux.user_schur)
          throw ConfigError(scope.full_key("pc_fieldsplit_schur_precondition"),
                            "schur_precondition=user requires a user Schur matrix");
        require(aux.user_schur->nrows() == n1 && aux.user_schur->ncols() == n1,
                detail::strfmt("user Schur matrix is %d x %d, Schur block is %d x %d",
                               aux.user_schur->nrows(), aux.user_schur->ncols(), n1, n1));
        schur_->Sp = aux.user_schur;
        break;
      }
      case SchurPrecondition::a11: {
        schur_->Sp = std::make_shared<const CsrMatrix>(schur_->C);
        break;
      }
    }

    add_solver(scope, aux, factory, g0, K00);  // solvers_[0] = A solve

    // Schur operator applied matrix-free: S y = C y - B (A^-1 (B^T y)),
    // the A-solve being the group-0 sub-solver.
    SchurData* sd = schur_.get();
    NestedSolver* a_solver = solvers_[0].get();
    LinearOperator Sop{n1, n1, [sd, a_solver](const DenseVector& y, DenseVector& out) {
                         DenseVector t1 = spmv(sd->Bt, y);
                         DenseVector t2;
                         a_solver->solve_zero(t1, t2);
                         DenseVector t3 = spmv(sd->B, t2);
                         spmv(sd->C, y, out);
                         for (std::size_t i = 0; i < out.size(); ++i) out[i] -= t3[i];
                       }};
    const OptionsScope sub = scope.child("fieldsplit_" + g1.name);
    Solver s1 = solver_from_options(sub, std::move(Sop), factory,
                                    make_pc_input(schur_->Sp, aux));
    solvers_.push_back(std::make_unique<NestedSolver>(sub.prefix(), std::move(s1)));
  }

  void apply_additive(const DenseVector& r, DenseVector& z) {
    DenseVector zi;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      const DenseVector ri = restrict_vector(M_->row_layout, r, groups_[i].fields);
      solvers_[i]->solve_zero(ri, zi);
      prolong_vector(M_->col_layout, groups_[i].fields, zi, z);
    }
  }

  void apply_multiplicative(const DenseVector& r, DenseVector& z) {
    std::vector<DenseVector> zs(groups_.size());
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      DenseVector ri = restrict_vector(M_->row_layout, r, groups_[i].fields);
      for (std::size_t j = 0; j < i; ++j) {
        const DenseVector coupling = spmv(offdiag_[i][j], zs[j]);
        for (std::size_t k = 0; k < ri.size(); ++k) ri[k] -= coupling[k];
      }
      solvers_[i]->solve_zero(ri, zs[i]);
      prolong_vector(M_->col_layout, groups_[i].fields, zs[i], z);
    }
  }

  void apply_schur(const DenseVector& r, DenseVector& z) {
    const DenseVector r0 = restrict_vector(M_->row_layout, r, groups_[0].fields);
    const DenseVector r1 = restrict_vector(M_->row_layout, r, groups_[1].fields);
    DenseVector z0, z1;
    auto solve_schur = [this](const DenseVector& rhs, DenseVector& out) {
      solvers_[1]->solve_zero(rhs, out);
      if (schur_->scale != 1.0) scal(schur_->scale, out);
    };
    switch (schur_->fact) {
      case SchurFactType::diag: {
        solvers_[0]->solve_zero(r0, z0);
        solve_schur(r1, z1);
        break;
      }
      case SchurFactType::lower: {
        solvers_[0]->solve_zero(r0, z0);
        DenseVector t = spmv(schur_->B, z0);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = r1[i] - t[i];
        solve_schur(t, z1);
        break;
      }
      case SchurFactType::upper: {
        solve_schur(r1, z1);
        DenseVector t = spmv(schur_->Bt, z1);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = r0[i] - t[i];
        solvers_[0]->solve_zero(t, z0);
        break;
      }
      case SchurFactType::full: {
        // L^-1, D^-1, U^-1 in sequence, reusing the first A-solve
        DenseVector t0;
        solvers_[0]->solve_zero(r0, t0);
        DenseVector s1 = spmv(schur_->B, t0);
        for (std::size_t i = 0; i < s1.size(); ++i) s1[i] = r1[i] - s1[i];
        solve_schur(s1, z1);
        DenseVector w = spmv(schur_->Bt, z1);
        DenseVector t2;
        solvers_[0]->solve_zero(w, t2);
        z0 = t0;
        for (std::size_t i = 0; i < z0.size(); ++i) z0[i] -= t2[i];
        break;
      }
    }
    prolong_vector(M_->col_layout, groups_[0].fields, z0, z);
    prolong_vector(M_->col_layout, groups_[1].fields, z1, z);
  }

  const char* fact_name() const {
    switch (schur_->fact) {
      case SchurFactType::diag: return "diag";
      case SchurFactType::lower: return "lower";
      case SchurFactType::upper: return "upper";
      case SchurFactType::full: return "full";
    }
    return "?";
  }

  const char* sprec_name() const {
    switch (schur_->sprec) {
      case SchurPrecondition::selfp: return "selfp";
      case SchurPrecondition::user: return "user";
      case SchurPrecondition::a11: return "a11";
    }
    return "?";
  }

  std::shared_ptr<const SplittableMatrix> M_;
  index_t n_ = 0;
  FieldsplitType type_ = FieldsplitType::additive;
  std::vector<Group> groups_;
  std::vector<std::unique_ptr<NestedSolver>> solvers_;
  std::vector<std::vector<CsrMatrix>> offdiag_;  // multiplicative: [i][j], j < i
  std::unique_ptr<SchurData> schur_;
  bool stationary_ = false;
};

}  // namespace pctk
