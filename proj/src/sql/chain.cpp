#include "cocte/sql/chain.hpp"

#include <algorithm>
#include <set>

#include "cocte/errors.hpp"
#include "cocte/util/util.hpp"

namespace cocte::sql {

SqlAst CocteChain::to_ast() const {
  std::vector<SqlAst> kids;
  kids.reserve(steps.size() + 1);
  for (const CteStep& s : steps)
    kids.push_back(inner(node::cte, {leaf(node::identifier, s.name), s.body}));
  kids.push_back(final_query);
  return inner(node::statement, std::move(kids));
}

bool CocteChain::structurally_equal(const CocteChain& other) const {
  if (steps.size() != other.steps.size()) return false;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].name != other.steps[i].name) return false;
    if (!(steps[i].body == other.steps[i].body)) return false;
  }
  return final_query == other.final_query;
}

std::string serialize(const CocteChain& chain) {
  return render(chain.to_ast());
}

std::string prefix_with_clause(const CocteChain& chain, size_t i) {
  if (i > chain.size())
    throw IndexOutOfRange("prefix length " + std::to_string(i) + " exceeds K=" +
                          std::to_string(chain.size()));
  if (i == 0) return "";
  std::string out = "WITH ";
  for (size_t k = 0; k < i; ++k) {
    if (k) out += ", ";
    out += chain.steps[k].name + " AS (" + render(chain.steps[k].body) + ")";
  }
  return out;
}

std::string prefix_query(const CocteChain& chain, size_t i) {
  if (i < 1 || i > chain.size())
    throw IndexOutOfRange("step index " + std::to_string(i) + " not in [1, " +
                          std::to_string(chain.size()) + "]");
  return prefix_with_clause(chain, i) + " SELECT * FROM " + chain.steps[i - 1].name;
}

namespace {

void collect_relations(const SqlAst& n, std::vector<std::string>& out) {
  if (n.kind == node::table) {
    out.push_back(n.children[0].text);
    return;  // alias child holds no relations
  }
  for (const SqlAst& c : n.children) collect_relations(c, out);
}

// Best-effort source span for a name inside a step's raw text.
std::pair<size_t, size_t> find_span(const CocteChain& chain, size_t raw_begin,
                                    const std::string& raw, const std::string& name) {
  std::string hay = util::lower(raw);
  std::string needle = util::lower(name);
  size_t p = hay.find(needle);
  if (p == std::string::npos) return {0, 0};
  (void)chain;
  return {raw_begin + p, needle.size()};
}

}  // namespace

std::vector<std::string> referenced_relations(const SqlAst& query_node) {
  std::vector<std::string> out;
  collect_relations(query_node, out);
  return out;
}

std::vector<Diagnostic> validate_chain(const CocteChain& chain, const DbSchema& schema) {
  std::vector<Diagnostic> diags;
  std::vector<std::string> cte_names;
  cte_names.reserve(chain.size());
  for (const CteStep& s : chain.steps) cte_names.push_back(s.name);

  auto check = [&](const SqlAst& query, size_t step_index, size_t raw_begin,
                   const std::string& raw) {
    // step_index is 1-based; K+1 denotes the final query
    size_t visible = step_index <= chain.size() ? step_index - 1 : chain.size();
    for (const std::string& rel : referenced_relations(query)) {
      auto it = std::find(cte_names.begin(), cte_names.end(), rel);
      if (it != cte_names.end()) {
        size_t j = static_cast<size_t>(it - cte_names.begin());
        if (j >= visible) {
          auto [b, l] = find_span(chain, raw_begin, raw, rel);
          diags.push_back({static_cast<int>(step_index), "ForwardReference",
                           "step references CTE '" + rel +
                               "' which is not defined yet",
                           b, l});
        }
        continue;
      }
      if (!schema.has_table(rel)) {
        auto [b, l] = find_span(chain, raw_begin, raw, rel);
        diags.push_back({static_cast<int>(step_index), "UnknownRelation",
                         "unknown relation '" + rel + "'", b, l});
      }
    }
  };

  for (size_t i = 0; i < chain.size(); ++i)
    check(chain.steps[i].body, i + 1, chain.steps[i].raw_begin, chain.steps[i].raw_text);
  check(chain.final_query, chain.size() + 1, 0, chain.final_raw);
  return diags;
}

}  // namespace cocte::sql
