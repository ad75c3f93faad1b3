// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "neumat/binaryio.h"
#include "neumat/material.h"
#include "neumat/rng.h"
#include "support.h"

using namespace neumat;
using namespace neumat::test;

namespace {

std::vector<char> slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string &path, const std::vector<char> &bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), (std::streamsize)bytes.size());
}

FormatErrorKind load_error(const std::string &path) {
    try {
        load_material(path);
    } catch (const FileFormatError &e) {
        return e.kind();
    }
    FAIL("expected a format error");
    return FormatErrorKind::Io;
}

}  // namespace

TEST_CASE("init layout and parameter counts") {
    MbtfMaterial mat = material_init(4, 7, 7, true, 0);
    CHECK(mat.k() == 4);
    CHECK(mat.channels() == 7);
    CHECK(mat.offset_channels() == 7);
    CHECK(mat.pyramid.levels.size() == 5);
    CHECK(mat.pyramid.levels[4].resolution == 16);
    CHECK(mat.offset.texture.resolution == 16);
    CHECK(param_count(mat.decoder) == 1678);
    CHECK(param_count(mat.offset.mlp) == 1576);
    // 7 * (1 + 4 + 16 + 64 + 256) pyramid + 256 * 7 offset texels + MLPs.
    CHECK(material_param_count(mat) == 2387 + 1792 + 1678 + 1576);

    MbtfMaterial base = material_init(3, 5, 5, false, 0);
    CHECK(!base.has_offset);
    CHECK(base.offset_channels() == 0);
    CHECK(material_param_count(base) ==
          5 * (1 + 4 + 16 + 64) + param_count(base.decoder));
}

TEST_CASE("init is deterministic in the seed") {
    MbtfMaterial a = material_init(2, 3, 3, true, 9);
    MbtfMaterial b = material_init(2, 3, 3, true, 9);
    MbtfMaterial c = material_init(2, 3, 3, true, 10);
    CHECK(a.pyramid.levels[2].data == b.pyramid.levels[2].data);
    CHECK(a.decoder.weights[0] == b.decoder.weights[0]);
    CHECK(a.pyramid.levels[2].data != c.pyramid.levels[2].data);
}

TEST_CASE("eval consumes the offset, eval_baseline does not") {
    MbtfMaterial mat = material_init(3, 4, 4, true, 1);
    // Give the offset texture some signal so the shift is nonzero.
    Pcg32 rng(2, 2);
    for (Float &v : mat.offset.texture.data) v = rng.uniform(-0.5, 0.5);
    quantize_storage(mat);

    Query q;
    q.p = {0.3, 0.7};
    q.sigma = 0.1;
    q.wi = {0.2, 0.1};
    q.wo = {0.5, -0.2};

    EvalContext ctx;
    Rgb full = eval(mat, q, ctx);
    CHECK(ctx.used_offset);
    Rgb base = eval_baseline(mat, q, ctx);
    CHECK(!ctx.used_offset);
    CHECK((full.x != base.x || full.y != base.y || full.z != base.z));

    // At normal incidence the offset vanishes and the two paths agree.
    q.wo = {0, 0};
    Rgb f0 = eval(mat, q);
    Rgb b0 = eval_baseline(mat, q);
    CHECK(f0.x == b0.x);
    CHECK(f0.y == b0.y);
    CHECK(f0.z == b0.z);

    // Output is non-negative (decoder final relu).
    CHECK(full.x >= 0);
    CHECK(full.y >= 0);
    CHECK(full.z >= 0);
}

TEST_CASE("eval rejects invalid directions") {
    MbtfMaterial mat = material_init(2, 3, 3, true, 4);
    Query q;
    q.p = {0.5, 0.5};
    q.sigma = 0.25;
    q.wi = {1.2, 0.3};  // outside the unit disk
    q.wo = {0, 0};
    CHECK_THROWS_AS((void)eval(mat, q), std::invalid_argument);
}

TEST_CASE("save and load round trip bit-exactly") {
    MbtfMaterial mat = material_init(3, 5, 4, true, 77);
    mat.meta.iterations = 1234;
    mat.meta.dataset_hash = 0xdeadbeefcafef00dULL;
    std::string p1 = tmp_path("mat_a.neumat"), p2 = tmp_path("mat_b.neumat");
    save_material(mat, p1);
    MbtfMaterial loaded = load_material(p1);
    save_material(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(loaded.meta.iterations == 1234);
    CHECK(loaded.meta.dataset_hash == 0xdeadbeefcafef00dULL);
    CHECK(loaded.k() == 3);
    CHECK(loaded.channels() == 5);
    CHECK(loaded.offset_channels() == 4);

    // Storage is quantized, so evaluation agrees bitwise too.
    Query q;
    q.p = {0.21, 0.84};
    q.sigma = 0.2;
    q.wi = {0.1, 0.2};
    q.wo = {0.3, -0.1};
    Rgb a = eval(mat, q), b = eval(loaded, q);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.z == b.z);
}

TEST_CASE("baseline materials omit the offset block") {
    MbtfMaterial mat = material_init(2, 3, 3, false, 5);
    std::string p = tmp_path("mat_base.neumat");
    save_material(mat, p);
    MbtfMaterial loaded = load_material(p);
    CHECK(!loaded.has_offset);
    std::string pf = tmp_path("mat_full.neumat");
    save_material(material_init(2, 3, 3, true, 5), pf);
    CHECK(slurp(p).size() < slurp(pf).size());
}

TEST_CASE("corrupt material files fail with the right error") {
    MbtfMaterial mat = material_init(2, 3, 3, true, 8);
    std::string good = tmp_path("mat_good.neumat");
    save_material(mat, good);
    std::vector<char> bytes = slurp(good);
    std::string bad = tmp_path("mat_bad.neumat");

    SUBCASE("bad magic") {
        bytes[0] = 'X';
        spit(bad, bytes);
        CHECK(load_error(bad) == FormatErrorKind::BadMagic);
    }
    SUBCASE("bad version") {
        bytes[4] = 99;
        spit(bad, bytes);
        CHECK(load_error(bad) == FormatErrorKind::BadVersion);
    }
    SUBCASE("truncated") {
        bytes.resize(bytes.size() / 2);
        spit(bad, bytes);
        CHECK(load_error(bad) == FormatErrorKind::Truncated);
    }
    SUBCASE("non-finite parameter") {
        // Inside the pyramid floats, just before the 16-byte trailer.
        float nan = std::nanf("");
        std::memcpy(bytes.data() + bytes.size() - 24, &nan, sizeof nan);
        spit(bad, bytes);
        CHECK(load_error(bad) == FormatErrorKind::NonFinite);
    }
    SUBCASE("trailing bytes") {
        bytes.push_back(0);
        spit(bad, bytes);
        CHECK(load_error(bad) == FormatErrorKind::InvalidValue);
    }
    SUBCASE("absurd header field") {
        // Channel count beyond any supported width.
        uint32_t big = 100000;
        std::memcpy(bytes.data() + 12, &big, sizeof big);
        spit(bad, bytes);
        CHECK(load_error(bad) == FormatErrorKind::InvalidValue);
    }
    SUBCASE("missing file") {
        CHECK(load_error(tmp_path("no_such.neumat")) == FormatErrorKind::Io);
    }
}

TEST_CASE("quantize_storage is idempotent") {
    MbtfMaterial mat = material_init(2, 3, 3, true, 11);
    // Perturb past float precision, then quantize twice.
    mat.decoder.weights[0][0] += 1e-12;
    quantize_storage(mat);
    MbtfMaterial once = mat;
    quantize_storage(mat);
    CHECK(once.decoder.weights[0] == mat.decoder.weights[0]);
    CHECK(once.pyramid.levels[1].data == mat.pyramid.levels[1].data);
    // Every parameter is exactly representable in 32 bits.
    for (Float w : mat.decoder.weights[0])
        CHECK(Float(float(w)) == w);
}
