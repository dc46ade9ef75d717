#include "rrindex/serialize.hpp"

#include <cassert>
#include <cstring>
#include <fstream>
#include <vector>

#include "rrindex/dag.hpp"
#include "rrindex/text_access.hpp"

namespace rrindex {

namespace {

constexpr char kMagic[5] = {'R', 'R', 'I', 'X', '1'};
constexpr u32 kVersion = 1;

u64 body_checksum(std::string_view b) {
    u64 h = 0x9ae16a3b2f90404full;
    size_t i = 0;
    for (; i + 8 <= b.size(); i += 8) {
        u64 v;
        std::memcpy(&v, b.data() + i, 8);
        h = mix64(h ^ v);
    }
    u64 tail = 0;
    for (u32 sh = 0; i < b.size(); ++i, sh += 8)
        tail |= static_cast<u64>(static_cast<u8>(b[i])) << sh;
    return mix64(mix64(h ^ tail) + b.size());
}

struct Writer {
    std::string out;

    void u8_(u8 v) { out.push_back(static_cast<char>(v)); }
    void u32_(u32 v) { raw(&v, 4); }
    void u64_(u64 v) { raw(&v, 8); }
    void raw(const void* p, size_t n) {
        out.append(static_cast<const char*>(p), n);
    }
    void varint(u64 v) {
        while (v >= 0x80) {
            u8_(static_cast<u8>(v | 0x80));
            v >>= 7;
        }
        u8_(static_cast<u8>(v));
    }
};

struct Reader {
    std::string_view in;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > in.size()) throw DataError("truncated index image");
    }
    u8 u8_() {
        need(1);
        return static_cast<u8>(in[pos++]);
    }
    u32 u32_() {
        need(4);
        u32 v;
        std::memcpy(&v, in.data() + pos, 4);
        pos += 4;
        return v;
    }
    u64 u64_() {
        need(8);
        u64 v;
        std::memcpy(&v, in.data() + pos, 8);
        pos += 8;
        return v;
    }
    u64 varint() {
        u64 v = 0;
        for (u32 sh = 0; sh < 64; sh += 7) {
            u8 b = u8_();
            v |= static_cast<u64>(b & 0x7f) << sh;
            if (!(b & 0x80)) return v;
        }
        throw DataError("overlong varint");
    }
};

} // namespace

std::string save_index_bytes(const Index& ix) {
    if (ix.empty()) throw DataError("cannot save an empty index");
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32_(kVersion);
    w.u64_(ix.seed);
    w.u64_(ix.text_len);
    w.u8_(static_cast<u8>(ix.w));
    w.u8_(static_cast<u8>(ix.budget_alpha));
    w.u8_(static_cast<u8>(ix.kappa));
    w.u8_(0);
    w.u32_(ix.start_rec);
    w.u64_(ix.recs.capacity());
    w.u64_(ix.recs.size());
    for (u32 id = 0; id < ix.recs.capacity(); ++id) {
        if (!ix.recs.live(id)) {
            w.u8_(0);
            continue;
        }
        const PathRecord& r = ix.recs[id];
        w.u8_(1);
        w.u8_(static_cast<u8>(r.tag));
        switch (r.tag) {
        case RuleTag::Leaf:
            w.u8_(r.byte);
            break;
        case RuleTag::Pair:
            w.u64_(r.left.pack());
            w.u64_(r.right.pack());
            break;
        case RuleTag::Power:
            w.u64_(r.left.pack());
            w.varint(r.exp);
            break;
        }
        w.varint(r.path_len);
        w.raw(r.assign.data(), r.assign.size());
        w.varint(r.base_height);
        w.varint(r.val_len);
        w.u64_(r.fp.hi);
        w.u64_(r.fp.lo);
        w.u32_(r.cache_anchor);
        w.varint(r.cache_shift);
        w.u64_(r.x_prefix);
        w.u64_(r.y_prefix);
    }
    for (u64 i = 0; i < ix.grid.size(); ++i) w.u32_(ix.grid.rec_at_x(i));
    for (u64 i = 0; i < ix.grid.size(); ++i) w.u32_(ix.grid.rec_at_y(i));
    w.u64_(body_checksum(w.out));
    return std::move(w.out);
}

Index load_index_bytes(std::string_view bytes) {
    Reader rd{bytes, 0};
    rd.need(sizeof kMagic);
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw DataError("not an index image");
    rd.pos += sizeof kMagic;
    if (rd.u32_() != kVersion) throw DataError("unsupported index version");
    Index ix;
    ix.seed = rd.u64_();
    ix.text_len = rd.u64_();
    ix.w = rd.u8_();
    ix.budget_alpha = rd.u8_();
    ix.kappa = rd.u8_();
    rd.u8_();
    ix.start_rec = rd.u32_();
    u64 slots = rd.u64_();
    u64 live = rd.u64_();
    if (slots > bytes.size() || live > slots)
        throw DataError("corrupt slot table");
    for (u64 id = 0; id < slots; ++id) {
        if (rd.u8_() == 0) {
            ix.recs.skip_next();
            continue;
        }
        [[maybe_unused]] u32 got = ix.recs.claim_next();
        assert(got == id);
        PathRecord& r = ix.recs[static_cast<u32>(id)];
        u8 tag = rd.u8_();
        if (tag > 2) throw DataError("corrupt rule tag");
        r.tag = static_cast<RuleTag>(tag);
        switch (r.tag) {
        case RuleTag::Leaf:
            r.byte = rd.u8_();
            break;
        case RuleTag::Pair:
            r.left = NodeRef::unpack(rd.u64_());
            r.right = NodeRef::unpack(rd.u64_());
            break;
        case RuleTag::Power:
            r.left = NodeRef::unpack(rd.u64_());
            r.exp = rd.varint();
            if (r.exp < 2) throw DataError("corrupt power exponent");
            break;
        }
        r.path_len = static_cast<u32>(rd.varint());
        if (r.path_len == 0 || r.path_len > (1u << 20))
            throw DataError("corrupt path length");
        r.assign.resize(r.path_len);
        rd.need(r.path_len);
        std::memcpy(r.assign.data(), bytes.data() + rd.pos, r.path_len);
        rd.pos += r.path_len;
        r.base_height = static_cast<u32>(rd.varint());
        r.val_len = rd.varint();
        r.fp.hi = rd.u64_();
        r.fp.lo = rd.u64_();
        r.cache_anchor = rd.u32_();
        r.cache_shift = rd.varint();
        r.x_prefix = rd.u64_();
        r.y_prefix = rd.u64_();
    }
    if (ix.recs.size() != live) throw DataError("corrupt live record count");
    if (!ix.recs.live(ix.start_rec)) throw DataError("corrupt start record");
    auto valid_child = [&](NodeRef n) {
        return ix.recs.live(n.rec) && n.up < ix.recs[n.rec].path_len;
    };
    try {
        ix.recs.for_each([&](u32 id) {
            const PathRecord& r = ix.recs[id];
            if (r.tag != RuleTag::Leaf) {
                if (!valid_child(r.left) ||
                    (r.tag == RuleTag::Pair && !valid_child(r.right)))
                    throw DataError("corrupt child reference");
            }
            register_loaded(ix, id);
        });
    } catch (const InvariantError&) {
        // duplicate rule keys or edges can only come from a damaged image
        throw DataError("corrupt rule set");
    }
    // both sections must be permutations of the live ids or handle lookups
    // in the bulk build would go wild
    std::vector<GridStore::Point> pts(live);
    std::vector<u8> seen_x(slots, 0), seen_y(slots, 0);
    for (u64 i = 0; i < live; ++i) {
        u32 id = rd.u32_();
        if (!ix.recs.live(id) || seen_x[id]++) throw DataError("corrupt grid entry");
        pts[i].rec = id;
        pts[i].xh = ix.recs[id].x_handle = ix.grid.append_x(id);
    }
    for (u64 i = 0; i < live; ++i) {
        u32 id = rd.u32_();
        if (!ix.recs.live(id) || seen_y[id]++) throw DataError("corrupt grid entry");
        ix.recs[id].y_handle = ix.grid.append_y(id);
    }
    for (auto& p : pts) p.yh = ix.recs[p.rec].y_handle;
    ix.grid.bulk_build(pts);
    u64 stored = rd.u64_();
    if (rd.pos != bytes.size()) throw DataError("trailing bytes in index image");
    if (stored != body_checksum(bytes.substr(0, bytes.size() - 8)))
        throw DataError("index image checksum mismatch");
    return ix;
}

void save_index(const Index& ix, const std::string& path) {
    std::string bytes = save_index_bytes(ix);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open " + path + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.flush();
    if (!f) throw DataError("write failed: " + path);
}

Index load_index(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
    return load_index_bytes(bytes);
}

} // namespace rrindex
