#pragma once
// Family file serialization: a line-oriented header (key=value) followed by
// one member per line, in either a human-readable text encoding (sorted
// decimal elements, 1-based) or a compact one (lowercase hex mask,
// little-endian bit order, 0-based, fixed width ceil(n/4) digits). Both
// encodings are byte-identical across platforms and round-trip exactly.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "galvin/family.hpp"
#include "galvin/layout.hpp"
#include "galvin/mask.hpp"

namespace galvin {

enum class FileEncoding { text, compact };

inline const char* encoding_name(FileEncoding e) { return e == FileEncoding::text ? "text" : "compact"; }

inline FileEncoding encoding_from_name(const std::string& s) {
    if (s == "text") return FileEncoding::text;
    if (s == "compact") return FileEncoding::compact;
    throw io_error("unknown encoding '" + s + "'");
}

namespace detail {

inline std::string member_text_line(const SubsetMask& s) {
    std::ostringstream out;
    bool first = true;
    s.for_each_bit([&](int e) {
        if (!first) out << ' ';
        out << (e + 1);  // elements print 1-based
        first = false;
    });
    return out.str();
}

inline std::string member_compact_line(const SubsetMask& s) {
    int digits = (s.universe() + 3) / 4;
    std::string out(size_t(digits), '0');
    for (int t = 0; t < digits; ++t) {
        int nib = 0;
        for (int b = 0; b < 4; ++b) {
            int e = 4 * t + b;
            if (e < s.universe() && s.test(e)) nib |= 1 << b;
        }
        out[size_t(t)] = "0123456789abcdef"[nib];
    }
    return out;
}

}  // namespace detail

inline std::string serialize_family(const GalvinFamily& fam, FileEncoding enc) {
    std::ostringstream out;
    out << "galvin-family v1\n";
    out << "n=" << fam.n << "\n";
    out << "d=" << fam.d << "\n";
    out << "variant=" << variant_name(fam.variant) << "\n";
    out << "seed=" << fam.seed << "\n";
    out << "copies=" << fam.copies << "\n";
    out << "pre-dedup=" << fam.pre_dedup << "\n";
    out << "count=" << fam.sets.size() << "\n";
    out << "encoding=" << encoding_name(enc) << "\n";
    for (const SubsetMask& s : fam.sets)
        out << (enc == FileEncoding::text ? detail::member_text_line(s) : detail::member_compact_line(s)) << "\n";
    return out.str();
}

namespace detail {

// Strict line reader: tracks line numbers for error messages, tolerates a
// trailing carriage return, nothing else.
class LineReader {
  public:
    LineReader(const std::string& content, std::string origin)
        : content_(content), origin_(std::move(origin)) {}

    bool next(std::string& line) {
        if (pos_ >= content_.size()) {
            // Errors raised at end of input point at the missing line.
            if (!eof_) ++line_no_;
            eof_ = true;
            return false;
        }
        size_t nl = content_.find('\n', pos_);
        if (nl == std::string::npos) {
            line = content_.substr(pos_);
            pos_ = content_.size();
        } else {
            line = content_.substr(pos_, nl - pos_);
            pos_ = nl + 1;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no_;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream msg;
        msg << origin_ << ":" << line_no_ << ": " << what;
        throw io_error(msg.str());
    }

    std::string expect(const std::string& key) {
        std::string line;
        if (!next(line)) fail("unexpected end of file, expected '" + key + "='");
        std::string prefix = key + "=";
        if (line.compare(0, prefix.size(), prefix) != 0) fail("expected '" + key + "=...', got '" + line + "'");
        return line.substr(prefix.size());
    }

    uint64_t expect_u64(const std::string& key) {
        std::string v = expect(key);
        return parse_u64(v, key);
    }

    uint64_t parse_u64(const std::string& v, const std::string& what) {
        if (v.empty()) fail("empty value for " + what);
        uint64_t out = 0;
        for (char c : v) {
            if (c < '0' || c > '9') fail("bad digit in " + what + " value '" + v + "'");
            uint64_t digit = uint64_t(c - '0');
            if (out > (UINT64_MAX - digit) / 10) fail("value for " + what + " overflows");
            out = out * 10 + digit;
        }
        return out;
    }

    int line_no() const { return line_no_; }

  private:
    const std::string& content_;
    std::string origin_;
    size_t pos_ = 0;
    int line_no_ = 0;
    bool eof_ = false;
};

inline SubsetMask parse_text_member(LineReader& in, const std::string& line, int n) {
    SubsetMask s = SubsetMask::empty_set(n);
    size_t pos = 0;
    int prev = 0;
    bool any = false;
    while (pos < line.size()) {
        size_t sp = line.find(' ', pos);
        std::string tok = line.substr(pos, sp == std::string::npos ? std::string::npos : sp - pos);
        pos = sp == std::string::npos ? line.size() : sp + 1;
        uint64_t v = in.parse_u64(tok, "element");
        if (v < 1 || v > uint64_t(n)) in.fail("element " + tok + " out of range 1.." + std::to_string(n));
        if (int(v) <= prev) in.fail("elements must be strictly increasing");
        s.set(int(v) - 1);
        prev = int(v);
        any = true;
    }
    if (!any) in.fail("empty member line");
    return s;
}

inline SubsetMask parse_compact_member(LineReader& in, const std::string& line, int n) {
    int digits = (n + 3) / 4;
    if (int(line.size()) != digits)
        in.fail("compact member must have exactly " + std::to_string(digits) + " hex digits");
    SubsetMask s = SubsetMask::empty_set(n);
    for (int t = 0; t < digits; ++t) {
        char c = line[size_t(t)];
        int nib;
        if (c >= '0' && c <= '9') nib = c - '0';
        else if (c >= 'a' && c <= 'f') nib = c - 'a' + 10;
        else { in.fail(std::string("bad hex digit '") + c + "'"); }
        for (int b = 0; b < 4; ++b) {
            if (!(nib & (1 << b))) continue;
            int e = 4 * t + b;
            if (e >= n) in.fail("mask bit set beyond the ground set");
            s.set(e);
        }
    }
    return s;
}

}  // namespace detail

inline GalvinFamily parse_family(const std::string& content, const std::string& origin = "<string>") {
    detail::LineReader in(content, origin);
    std::string magic;
    if (!in.next(magic)) in.fail("empty input");
    if (magic != "galvin-family v1") in.fail("bad magic line '" + magic + "'");
    GalvinFamily fam;
    uint64_t n = in.expect_u64("n");
    if (n < 2 || n > 1u << 20) in.fail("n out of range");
    fam.n = int(n);
    uint64_t d = in.expect_u64("d");
    if (d < 1 || d > n) in.fail("d out of range");
    fam.d = int(d);
    std::string vname = in.expect("variant");
    try {
        fam.variant = variant_from_name(vname);
    } catch (const param_error& e) {
        in.fail(e.what());
    }
    fam.seed = in.expect_u64("seed");
    uint64_t copies = in.expect_u64("copies");
    if (copies < 1 || copies > 1u << 24) in.fail("copies out of range");
    fam.copies = int(copies);
    fam.pre_dedup = in.expect_u64("pre-dedup");
    uint64_t count = in.expect_u64("count");
    FileEncoding enc;
    try {
        enc = encoding_from_name(in.expect("encoding"));
    } catch (const io_error&) {
        in.fail("encoding must be 'text' or 'compact'");
    }
    fam.sets.reserve(size_t(count));
    for (uint64_t i = 0; i < count; ++i) {
        std::string line;
        if (!in.next(line)) in.fail("unexpected end of file: expected " + std::to_string(count) + " members");
        fam.sets.push_back(enc == FileEncoding::text ? detail::parse_text_member(in, line, fam.n)
                                                     : detail::parse_compact_member(in, line, fam.n));
    }
    std::string extra;
    while (in.next(extra))
        if (!extra.empty()) in.fail("trailing content after the member list");
    // Members may arrive in any order from foreign files; store them sorted
    // but treat duplicates as corruption rather than silently merging.
    std::sort(fam.sets.begin(), fam.sets.end());
    for (size_t i = 1; i < fam.sets.size(); ++i)
        if (fam.sets[i] == fam.sets[i - 1]) throw io_error(origin + ": duplicate member in the member list");
    if (fam.variant == Variant::indivisible) {
        try {
            fam.plan = indivisible_plan(fam.n, fam.d);
        } catch (const param_error& e) {
            throw io_error(origin + ": " + std::string(e.what()));
        }
    }
    return fam;
}

inline void write_family(const std::string& path, const GalvinFamily& fam, FileEncoding enc) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    std::string data = serialize_family(fam, enc);
    f.write(data.data(), std::streamsize(data.size()));
    if (!f.good()) throw io_error("write failed on '" + path + "'");
}

inline GalvinFamily read_family(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << f.rdbuf();
    if (f.bad()) throw io_error("read failed on '" + path + "'");
    return parse_family(buf.str(), path);
}

}  // namespace galvin
