/// \file layout.hpp
/// \brief Field-layout metadata for monolithic matrices.
///
/// A BlockLayout names disjoint index sets ("fields") that together cover the
/// global degree-of-freedom range. A SplittableMatrix is a CsrMatrix plus row
/// and column layouts; blocks over arbitrary field groups can be extracted
/// from it, which is the mechanism every fieldsplit preconditioner rests on.
/// Index-set order is significant everywhere: it defines sub-vector layout
/// and is preserved under concatenation, never sorted.

#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "pctk/csr.hpp"

namespace pctk {

struct IndexSet {
  std::vector<index_t> indices;

  IndexSet() = default;
  explicit IndexSet(std::vector<index_t> idx) : indices(std::move(idx)) {
    std::unordered_set<index_t> seen;
    for (index_t i : indices)
      require(seen.insert(i).second,
              detail::strfmt("IndexSet: duplicate index %d", i));
  }

  static IndexSet range(index_t start, index_t len) {
    std::vector<index_t> idx(static_cast<std::size_t>(len));
    for (index_t k = 0; k < len; ++k) idx[k] = start + k;
    IndexSet s;
    s.indices = std::move(idx);  // trivially duplicate free
    return s;
  }

  index_t size() const { return static_cast<index_t>(indices.size()); }

  /// True when the set is exactly start, start+1, ..., start+size-1.
  bool is_contiguous_range() const {
    for (std::size_t k = 1; k < indices.size(); ++k)
      if (indices[k] != indices[k - 1] + 1) return false;
    return true;
  }
};

struct FieldSpec {
  std::string name;
  IndexSet indices;
};

/// Ordered, named partition of {0, ..., global_size-1}.
class BlockLayout {
public:
  BlockLayout() = default;
  BlockLayout(std::vector<FieldSpec> fields, index_t global_size)
      : fields_(std::move(fields)), global_size_(global_size) {
    std::vector<char> seen(static_cast<std::size_t>(global_size), 0);
    std::unordered_set<std::string> names;
    for (const FieldSpec& f : fields_) {
      require(!f.name.empty(), "BlockLayout: empty field name");
      require(names.insert(f.name).second,
              "BlockLayout: duplicate field name '" + f.name + "'");
      for (index_t i : f.indices.indices) {
        require(i >= 0 && i < global_size,
                detail::strfmt("BlockLayout: index %d outside [0, %d) in field '%s'",
                               i, global_size, f.name.c_str()));
        require(!seen[i], detail::strfmt("BlockLayout: index %d owned by two fields", i));
        seen[i] = 1;
      }
    }
    for (index_t i = 0; i < global_size; ++i)
      require(seen[i], detail::strfmt("BlockLayout: index %d not covered by any field", i));
  }

  const std::vector<FieldSpec>& fields() const { return fields_; }
  index_t global_size() const { return global_size_; }
  std::size_t num_fields() const { return fields_.size(); }

  bool has_field(std::string_view name) const {
    for (const FieldSpec& f : fields_)
      if (f.name == name) return true;
    return false;
  }

  const FieldSpec& field(std::string_view name) const {
    for (const FieldSpec& f : fields_)
      if (f.name == name) return f;
    throw Error("BlockLayout: unknown field '" + std::string(name) + "'");
  }

private:
  std::vector<FieldSpec> fields_;
  index_t global_size_ = 0;
};

/// Field i owns the contiguous half-open range following field i-1.
inline BlockLayout make_contiguous_layout(
    const std::vector<std::pair<std::string, index_t>>& field_sizes) {
  std::vector<FieldSpec> fields;
  index_t offset = 0;
  for (const auto& [name, size] : field_sizes) {
    require(size > 0, "make_contiguous_layout: field '" + name + "' has zero size");
    fields.push_back({name, IndexSet::range(offset, size)});
    offset += size;
  }
  return BlockLayout(std::move(fields), offset);
}

/// Node-interleaved layout: each node carries pattern[i] consecutive dofs of
/// field i, nodes repeating until the stated field sizes are exhausted.
inline BlockLayout make_interleaved_layout(
    const std::vector<std::pair<std::string, index_t>>& field_sizes,
    const std::vector<index_t>& pattern) {
  require(field_sizes.size() == pattern.size(),
          "make_interleaved_layout: one multiplicity per field required");
  index_t nodes = -1;
  index_t total = 0;
  for (std::size_t f = 0; f < field_sizes.size(); ++f) {
    require(pattern[f] > 0, "make_interleaved_layout: zero multiplicity");
    require(field_sizes[f].second > 0 && field_sizes[f].second % pattern[f] == 0,
            "make_interleaved_layout: size of field '" + field_sizes[f].first +
                "' not a multiple of its per-node multiplicity");
    const index_t n = field_sizes[f].second / pattern[f];
    require(nodes < 0 || nodes == n,
            "make_interleaved_layout: fields imply different node counts");
    nodes = n;
    total += field_sizes[f].second;
  }
  std::vector<std::vector<index_t>> idx(field_sizes.size());
  index_t pos = 0;
  for (index_t node = 0; node < nodes; ++node)
    for (std::size_t f = 0; f < field_sizes.size(); ++f)
      for (index_t k = 0; k < pattern[f]; ++k) idx[f].push_back(pos++);
  require(pos == total, "make_interleaved_layout: internal size mismatch");
  std::vector<FieldSpec> fields;
  for (std::size_t f = 0; f < field_sizes.size(); ++f)
    fields.push_back({field_sizes[f].first, IndexSet(std::move(idx[f]))});
  return BlockLayout(std::move(fields), total);
}

/// Concatenation of the given fields' index sets, in listed order.
inline IndexSet concat_fields(const BlockLayout& layout,
                              const std::vector<std::string>& names) {
  std::vector<index_t> idx;
  for (const std::string& name : names) {
    const FieldSpec& f = layout.field(name);
    idx.insert(idx.end(), f.indices.indices.begin(), f.indices.indices.end());
  }
  return IndexSet(std::move(idx));
}

/// New layout whose fields are concatenations of the member fields, in listed
/// order. Groups must reference each field exactly once.
inline BlockLayout group_fields(
    const BlockLayout& layout,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& groups) {
  std::unordered_set<std::string> used;
  std::vector<FieldSpec> fields;
  for (const auto& [gname, members] : groups) {
    for (const std::string& m : members) {
      require(layout.has_field(m), "group_fields: unknown field '" + m + "'");
      require(used.insert(m).second, "group_fields: field '" + m + "' in two groups");
    }
    fields.push_back({gname, concat_fields(layout, members)});
  }
  require(used.size() == layout.num_fields(),
          "group_fields: groups must cover every field");
  return BlockLayout(std::move(fields), layout.global_size());
}

/// Monolithic matrix with field metadata attached.
struct SplittableMatrix {
  CsrMatrix matrix;
  BlockLayout row_layout;
  BlockLayout col_layout;

  SplittableMatrix() = default;
  SplittableMatrix(CsrMatrix m, BlockLayout rows, BlockLayout cols)
      : matrix(std::move(m)), row_layout(std::move(rows)), col_layout(std::move(cols)) {
    require(matrix.nrows() == row_layout.global_size(),
            detail::strfmt("SplittableMatrix: %d rows vs row layout of size %d",
                           matrix.nrows(), row_layout.global_size()));
    require(matrix.ncols() == col_layout.global_size(),
            detail::strfmt("SplittableMatrix: %d cols vs col layout of size %d",
                           matrix.ncols(), col_layout.global_size()));
  }

  /// Square matrix sharing one layout for rows and columns.
  SplittableMatrix(CsrMatrix m, const BlockLayout& layout)
      : SplittableMatrix(std::move(m), layout, layout) {}

  /// Wraps a bare matrix as a single-field layout (no real field metadata).
  static SplittableMatrix monolithic(CsrMatrix m, const std::string& name = "all") {
    BlockLayout rows = make_contiguous_layout({{name, m.nrows()}});
    BlockLayout cols = make_contiguous_layout({{name, m.ncols()}});
    return SplittableMatrix(std::move(m), std::move(rows), std::move(cols));
  }
};

namespace detail {

inline BlockLayout local_layout_for(const BlockLayout& layout,
                                    const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, index_t>> sizes;
  for (const std::string& n : names) sizes.push_back({n, layout.field(n).indices.size()});
  return make_contiguous_layout(sizes);
}

}  // namespace detail

/// Submatrix over the concatenated index sets of the named row/column fields.
/// The result carries a derived layout with the selected fields renumbered
/// locally, so extraction is recursively applicable.
inline SplittableMatrix extract_block(const SplittableMatrix& M,
                                      const std::vector<std::string>& row_group,
                                      const std::vector<std::string>& col_group) {
  const IndexSet rows = concat_fields(M.row_layout, row_group);
  const IndexSet cols = concat_fields(M.col_layout, col_group);
  CsrMatrix sub = extract_submatrix(M.matrix, rows.indices, cols.indices);
  return SplittableMatrix(std::move(sub),
                          detail::local_layout_for(M.row_layout, row_group),
                          detail::local_layout_for(M.col_layout, col_group));
}

/// Gather of x over the group's concatenated index set.
inline DenseVector restrict_vector(const BlockLayout& layout, const DenseVector& x,
                                   const std::vector<std::string>& group) {
  require(static_cast<index_t>(x.size()) == layout.global_size(),
          "restrict_vector: vector/layout size mismatch");
  const IndexSet sel = concat_fields(layout, group);
  DenseVector sub(static_cast<std::size_t>(sel.size()));
  for (index_t k = 0; k < sel.size(); ++k) sub[k] = x[sel.indices[k]];
  return sub;
}

enum class ScatterMode { overwrite, add };

/// Scatter of a sub-vector back into the full vector. With
/// ScatterMode::overwrite, prolong(restrict(x)) restores the selected entries.
inline void prolong_vector(const BlockLayout& layout,
                           const std::vector<std::string>& group,
                           const DenseVector& sub, DenseVector& x,
                           ScatterMode mode = ScatterMode::overwrite) {
  require(static_cast<index_t>(x.size()) == layout.global_size(),
          "prolong_vector: vector/layout size mismatch");
  const IndexSet sel = concat_fields(layout, group);
  require(static_cast<index_t>(sub.size()) == sel.size(),
          "prolong_vector: sub-vector size mismatch");
  for (index_t k = 0; k < sel.size(); ++k) {
    if (mode == ScatterMode::overwrite)
      x[sel.indices[k]] = sub[k];
    else
      x[sel.indices[k]] += sub[k];
  }
}

// ---------------------------------------------------------------------------
// Layout sidecar files: {"global_size": N, "fields": [{"name": ...,
// "range": [start, len]} | {"name": ..., "indices": [...]}, ...]}
// ---------------------------------------------------------------------------

inline nlohmann::json layout_to_json(const BlockLayout& layout) {
  nlohmann::json j;
  j["global_size"] = layout.global_size();
  j["fields"] = nlohmann::json::array();
  for (const FieldSpec& f : layout.fields()) {
    nlohmann::json jf;
    jf["name"] = f.name;
    if (f.indices.size() > 0 && f.indices.is_contiguous_range())
      jf["range"] = {f.indices.indices.front(), f.indices.size()};
    else
      jf["indices"] = f.indices.indices;
    j["fields"].push_back(std::move(jf));
  }
  return j;
}

inline BlockLayout layout_from_json(const nlohmann::json& j) {
  require(j.contains("global_size") && j.contains("fields"),
          "layout sidecar: missing global_size or fields");
  std::vector<FieldSpec> fields;
  for (const auto& jf : j.at("fields")) {
    FieldSpec f;
    f.name = jf.at("name").get<std::string>();
    if (jf.contains("range")) {
      const auto r = jf.at("range");
      f.indices = IndexSet::range(r.at(0).get<index_t>(), r.at(1).get<index_t>());
    } else {
      f.indices = IndexSet(jf.at("indices").get<std::vector<index_t>>());
    }
    fields.push_back(std::move(f));
  }
  return BlockLayout(std::move(fields), j.at("global_size").get<index_t>());
}

inline void write_layout_json(const std::string& path, const BlockLayout& layout) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << layout_to_json(layout).dump(2) << "\n";
  require(out.good(), "write failed: " + path);
}

inline BlockLayout read_layout_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open for reading: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(path + ": invalid JSON (" + e.what() + ")");
  }
  return layout_from_json(j);
}

}  // namespace pctk
