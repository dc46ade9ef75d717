#include "rrindex/index.hpp"

#include <vector>

#include "rrindex/dag.hpp"
#include "rrindex/grammar.hpp"
#include "rrindex/text_access.hpp"

namespace rrindex {

Index build_index(const std::string& text, const BuildOptions& opt) {
    Index ix;
    ix.seed = opt.seed;
    ix.w = opt.w;
    ix.budget_alpha = opt.budget_alpha;
    ix.kappa = opt.kappa;
    build_grammar(ix, text, opt.max_attempts);
    finalize_index(ix);
    return ix;
}

void verify_index(Index& ix) {
    verify_structure(ix);
    ix.grid.validate();
    if (ix.grid.size() != ix.recs.size())
        throw InvariantError("grid point count differs from record count");
    std::vector<u32> ids;
    ids.reserve(ix.recs.size());
    ix.recs.for_each([&](u32 id) { ids.push_back(id); });
    for (u32 id : ids) {
        PathRecord& r = ix.recs[id];
        if (r.x_prefix != x_prefix_key(ix, id) || r.y_prefix != y_prefix_key(ix, id))
            throw InvariantError("stale coordinate key");
        if (r.x_handle == GridStore::kNil || r.y_handle == GridStore::kNil)
            throw InvariantError("record without a grid point");
        u32 anchor = r.cache_anchor;
        u64 shift = r.cache_shift;
        recompute_cache(ix, id);
        if (r.cache_anchor != anchor || r.cache_shift != shift)
            throw InvariantError("stale ancestor cache");
    }
    for (u64 i = 0; i + 1 < ix.grid.size(); ++i) {
        if (!x_less(ix, ix.grid.rec_at_x(i), ix.grid.rec_at_x(i + 1)))
            throw InvariantError("grid x order violation");
        if (!y_less(ix, ix.grid.rec_at_y(i), ix.grid.rec_at_y(i + 1)))
            throw InvariantError("grid y order violation");
    }
}

IndexStats index_stats(const Index& ix) {
    IndexStats st;
    st.n = ix.text_len;
    st.height = ix.empty() ? 0 : ix.tree_height();
    st.records = ix.recs.size();
    st.impl_nodes = ix.impl_count;
    st.grammar_size = st.records + st.impl_nodes;
    st.edges = ix.edge_count;
    st.grid_points = ix.grid.size();
    return st;
}

} // namespace rrindex
