#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "galvin/construct.hpp"
#include "galvin/io.hpp"

using galvin::BuildConfig;
using galvin::FileEncoding;
using galvin::GalvinFamily;
using galvin::io_error;
using galvin::parse_family;
using galvin::serialize_family;
using galvin::SubsetMask;
using galvin::Variant;

namespace {

SubsetMask mask_of(int n, std::initializer_list<int> elems) {
    SubsetMask s = SubsetMask::empty_set(n);
    for (int e : elems) s.set(e);
    return s;
}

GalvinFamily sample_family() {
    BuildConfig cfg;
    cfg.n = 12;
    cfg.d = 3;
    cfg.r = 2;
    cfg.copies = 4;
    cfg.seed = 55;
    return galvin::build_galvin(cfg);
}

bool message_mentions_line(const io_error& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("serialization round-trips in both encodings") {
    GalvinFamily fam = sample_family();
    for (FileEncoding enc : {FileEncoding::text, FileEncoding::compact}) {
        std::string data = serialize_family(fam, enc);
        GalvinFamily back = parse_family(data);
        CHECK(back.n == fam.n);
        CHECK(back.d == fam.d);
        CHECK(back.variant == fam.variant);
        CHECK(back.seed == fam.seed);
        CHECK(back.copies == fam.copies);
        CHECK(back.pre_dedup == fam.pre_dedup);
        CHECK(back.sets == fam.sets);
        CHECK(back.provenance.empty());
        // Re-serializing the parse gives the identical bytes.
        CHECK(serialize_family(back, enc) == data);
    }
}

TEST_CASE("round-trip across the machine word boundary") {
    GalvinFamily fam;
    fam.n = 70;
    fam.d = 2;
    fam.sets = {mask_of(70, {0, 63, 64, 69}), mask_of(70, {1, 2, 65})};
    fam.pre_dedup = 2;
    fam.canonicalize();
    for (FileEncoding enc : {FileEncoding::text, FileEncoding::compact}) {
        GalvinFamily back = parse_family(serialize_family(fam, enc));
        CHECK(back.sets == fam.sets);
    }
}

TEST_CASE("text encoding prints sorted one-based elements") {
    GalvinFamily fam;
    fam.n = 8;
    fam.d = 2;
    fam.sets = {mask_of(8, {0, 1, 2, 3})};
    fam.pre_dedup = 1;
    std::string data = serialize_family(fam, FileEncoding::text);
    CHECK(data.find("\n1 2 3 4\n") != std::string::npos);
    CHECK(data.rfind("galvin-family v1\n", 0) == 0);
    CHECK(data.find("encoding=text\n") != std::string::npos);
}

TEST_CASE("compact encoding uses little-endian nibbles at fixed width") {
    GalvinFamily fam;
    fam.n = 8;
    fam.d = 2;
    fam.sets = {mask_of(8, {0, 1, 2, 3})};
    fam.pre_dedup = 1;
    std::string data = serialize_family(fam, FileEncoding::compact);
    // Elements 0..3 fill the first nibble; the second is empty.
    CHECK(data.find("\nf0\n") != std::string::npos);

    GalvinFamily fam6;
    fam6.n = 6;
    fam6.d = 2;
    fam6.sets = {mask_of(6, {1, 4})};
    fam6.pre_dedup = 1;
    std::string data6 = serialize_family(fam6, FileEncoding::compact);
    CHECK(data6.find("\n21\n") != std::string::npos);  // bit 1 -> 0x2, bit 4 -> 0x1
    CHECK(parse_family(data6).sets == fam6.sets);
}

TEST_CASE("parser accepts unsorted foreign members and canonicalizes") {
    std::string data =
        "galvin-family v1\n"
        "n=8\nd=2\nvariant=standard\nseed=0\ncopies=1\npre-dedup=2\ncount=2\nencoding=text\n"
        "5 6 7 8\n"
        "1 2 3 4\n";
    GalvinFamily fam = parse_family(data);
    REQUIRE(fam.sets.size() == 2);
    CHECK(fam.sets[0] == mask_of(8, {0, 1, 2, 3}));
    CHECK(fam.sets[1] == mask_of(8, {4, 5, 6, 7}));
}

TEST_CASE("parser restores the indivisible size plan") {
    BuildConfig cfg;
    cfg.n = 10;
    cfg.d = 3;
    cfg.variant = Variant::indivisible;
    cfg.r = 1;
    cfg.copies = 2;
    GalvinFamily fam = galvin::build_galvin(cfg);
    GalvinFamily back = parse_family(serialize_family(fam, FileEncoding::text));
    REQUIRE(back.plan.has_value());
    CHECK(back.plan->k_prime == fam.plan->k_prime);
    CHECK(back.plan->bucket_sizes == fam.plan->bucket_sizes);

    // An indivisible header too small for any plan is file corruption.
    std::string bad =
        "galvin-family v1\n"
        "n=4\nd=3\nvariant=indivisible\nseed=0\ncopies=1\npre-dedup=1\ncount=1\nencoding=text\n"
        "1 2\n";
    CHECK_THROWS_AS(parse_family(bad), io_error);
}

TEST_CASE("header corruption is reported with origin and line number") {
    auto expect_fail = [](const std::string& data, const std::string& needle) {
        try {
            parse_family(data, "fam.txt");
            FAIL_CHECK("expected an io_error for: " << needle);
        } catch (const io_error& e) {
            CHECK(message_mentions_line(e, needle));
        }
    };

    expect_fail("", "fam.txt:1");  // empty input: the missing line is line 1
    expect_fail("galvin-family v2\n", "bad magic");
    expect_fail("galvin-family v1\nn=8\nd=2\n", "fam.txt:4");  // truncated header
    expect_fail("galvin-family v1\nn=abc\n", "bad digit");
    expect_fail("galvin-family v1\nn=1\n", "n out of range");
    expect_fail("galvin-family v1\nn=8\nd=9\n", "d out of range");
    expect_fail("galvin-family v1\nn=8\nd=2\nvariant=banana\n", "fam.txt:4");
    expect_fail(
        "galvin-family v1\nn=8\nd=2\nvariant=standard\nseed=0\ncopies=0\n",
        "copies out of range");
    expect_fail(
        "galvin-family v1\nn=8\nd=2\nvariant=standard\nseed=0\ncopies=1\npre-dedup=1\ncount=1\nencoding=dna\n",
        "encoding must be");
    expect_fail(
        "galvin-family v1\nn=8\nd=2\nvariant=standard\nseed=99999999999999999999\n",
        "overflows");
}

TEST_CASE("member list corruption is rejected") {
    const std::string header =
        "galvin-family v1\nn=8\nd=2\nvariant=standard\nseed=0\ncopies=1\npre-dedup=2\ncount=2\nencoding=text\n";

    // Too few member lines.
    CHECK_THROWS_AS(parse_family(header + "1 2 3 4\n"), io_error);
    // Element out of range; the second member sits on line 11 (9 header lines).
    try {
        parse_family(header + "1 2 3 4\n1 2 3 9\n", "fam.txt");
        FAIL_CHECK("out-of-range element accepted");
    } catch (const io_error& e) {
        CHECK(message_mentions_line(e, "fam.txt:11"));
        CHECK(message_mentions_line(e, "out of range"));
    }
    // Zero is not a valid 1-based element.
    CHECK_THROWS_AS(parse_family(header + "0 1 2 3\n1 2 3 4\n"), io_error);
    // Non-increasing elements.
    CHECK_THROWS_AS(parse_family(header + "1 2 2 4\n5 6 7 8\n"), io_error);
    CHECK_THROWS_AS(parse_family(header + "4 3 2 1\n5 6 7 8\n"), io_error);
    // Empty member line.
    CHECK_THROWS_AS(parse_family(header + "\n1 2 3 4\n"), io_error);
    // Duplicate members.
    CHECK_THROWS_AS(parse_family(header + "1 2 3 4\n1 2 3 4\n"), io_error);
    // Trailing non-empty content.
    CHECK_THROWS_AS(parse_family(header + "1 2 3 4\n5 6 7 8\njunk\n"), io_error);
    // A trailing newline-only tail is tolerated.
    CHECK_NOTHROW(parse_family(header + "1 2 3 4\n5 6 7 8\n\n"));
}

TEST_CASE("compact member corruption is rejected") {
    const std::string header =
        "galvin-family v1\nn=6\nd=2\nvariant=standard\nseed=0\ncopies=1\npre-dedup=1\ncount=1\nencoding=compact\n";
    CHECK_NOTHROW(parse_family(header + "21\n"));
    CHECK_THROWS_AS(parse_family(header + "2\n"), io_error);    // wrong width
    CHECK_THROWS_AS(parse_family(header + "215\n"), io_error);  // wrong width
    CHECK_THROWS_AS(parse_family(header + "2G\n"), io_error);   // bad digit
    CHECK_THROWS_AS(parse_family(header + "2F\n"), io_error);   // hex must be lowercase
    CHECK_THROWS_AS(parse_family(header + "24\n"), io_error);   // bit 6 is beyond n=6
}

TEST_CASE("carriage returns are tolerated at line ends") {
    std::string data =
        "galvin-family v1\r\nn=8\r\nd=2\r\nvariant=standard\r\nseed=3\r\ncopies=1\r\npre-dedup=1\r\ncount=1\r\n"
        "encoding=text\r\n1 2 3 4\r\n";
    GalvinFamily fam = parse_family(data);
    CHECK(fam.seed == 3);
    REQUIRE(fam.sets.size() == 1);
    CHECK(fam.sets[0] == mask_of(8, {0, 1, 2, 3}));
}

TEST_CASE("file write and read round-trip, and missing files raise io errors") {
    namespace fs = std::filesystem;
    GalvinFamily fam = sample_family();
    fs::path dir = fs::temp_directory_path() / "galvin-io-test";
    fs::create_directories(dir);
    fs::path path = dir / "fam.galvin";

    galvin::write_family(path.string(), fam, FileEncoding::compact);
    GalvinFamily back = galvin::read_family(path.string());
    CHECK(back.sets == fam.sets);
    CHECK(back.n == fam.n);

    CHECK_THROWS_AS(galvin::read_family((dir / "absent.galvin").string()), io_error);
    CHECK_THROWS_AS(galvin::write_family((dir / "no" / "such" / "dir.galvin").string(), fam, FileEncoding::text),
                    io_error);
    std::error_code ec;
    fs::remove_all(dir, ec);
}

TEST_CASE("encoding names round-trip and reject unknowns") {
    CHECK(galvin::encoding_name(FileEncoding::text) == std::string("text"));
    CHECK(galvin::encoding_name(FileEncoding::compact) == std::string("compact"));
    CHECK(galvin::encoding_from_name("text") == FileEncoding::text);
    CHECK(galvin::encoding_from_name("compact") == FileEncoding::compact);
    CHECK_THROWS_AS(galvin::encoding_from_name("base64"), io_error);
}
