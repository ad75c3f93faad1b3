// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/dataset.h"

#include <cmath>

namespace neumat {

namespace {

constexpr uint32_t kDatasetVersion = 1;
// u.xy, sigma, wi.xy, wo.xy, rgb: 10 fields, 40 bytes per record.
constexpr size_t kRecordFloats = 10;

void pack_record(const QueryRecord &rec, float out[kRecordFloats]) {
    out[0] = static_cast<float>(rec.query.p.x);
    out[1] = static_cast<float>(rec.query.p.y);
    out[2] = static_cast<float>(rec.query.sigma);
    out[3] = static_cast<float>(rec.query.wi.x);
    out[4] = static_cast<float>(rec.query.wi.y);
    out[5] = static_cast<float>(rec.query.wo.x);
    out[6] = static_cast<float>(rec.query.wo.y);
    out[7] = static_cast<float>(rec.target.x);
    out[8] = static_cast<float>(rec.target.y);
    out[9] = static_cast<float>(rec.target.z);
}

QueryRecord unpack_record(const float in[kRecordFloats]) {
    QueryRecord rec;
    rec.query.p = {in[0], in[1]};
    rec.query.sigma = in[2];
    rec.query.wi = {in[3], in[4]};
    rec.query.wo = {in[5], in[6]};
    rec.target = {in[7], in[8], in[9]};
    return rec;
}

void validate_record(const QueryRecord &rec, const std::string &path) {
    const Query &q = rec.query;
    bool finite = is_finite(q.p) && std::isfinite(q.sigma) &&
                  std::isfinite(q.wi.x) && std::isfinite(q.wi.y) &&
                  std::isfinite(q.wo.x) && std::isfinite(q.wo.y) &&
                  is_finite(rec.target);
    if (!finite)
        throw FileFormatError(FormatErrorKind::NonFinite,
                              "non-finite query record in " + path);
    bool in_range = q.sigma > 0 && q.wi.valid() && q.wo.valid() &&
                    rec.target.x >= 0 && rec.target.y >= 0 && rec.target.z >= 0;
    if (!in_range)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "out-of-range query record in " + path);
}

}  // namespace

uint64_t dataset_hash(const QueryDataset &ds) {
    Fnv1a64 h;
    float buf[kRecordFloats];
    for (const QueryRecord &rec : ds.records) {
        pack_record(rec, buf);
        h.update(buf, sizeof(buf));
    }
    return h.digest();
}

void dataset_write(const QueryDataset &ds, const std::string &path) {
    for (const QueryRecord &rec : ds.records)
        validate_record(rec, path);

    BinaryWriter w(path);
    w.magic("MBTQ");
    w.u32(kDatasetVersion);
    w.u32(static_cast<uint32_t>(ds.k));
    w.u64(ds.records.size());
    w.u32(0);  // flags, reserved
    float buf[kRecordFloats];
    for (const QueryRecord &rec : ds.records) {
        pack_record(rec, buf);
        w.bytes(buf, sizeof(buf));
    }
    w.close();
}

QueryDataset dataset_read(const std::string &path) {
    DatasetReader r(path);
    QueryDataset ds;
    ds.k = r.k();
    ds.records.reserve(r.count());
    QueryRecord rec;
    while (r.next(rec))
        ds.records.push_back(rec);
    return ds;
}

DatasetReader::DatasetReader(const std::string &path) : in_(path) {
    in_.expect_magic("MBTQ");
    uint32_t version = in_.u32();
    if (version != kDatasetVersion)
        throw FileFormatError(FormatErrorKind::BadVersion,
                              "unsupported dataset version in " + path);
    uint32_t k = in_.u32();
    if (k > 16)
        throw FileFormatError(FormatErrorKind::InvalidValue,
                              "bad pyramid depth in " + path);
    k_ = static_cast<int>(k);
    count_ = in_.u64();
    in_.u32();  // flags, reserved
}

bool DatasetReader::next(QueryRecord &rec) {
    if (read_ == count_) {
        if (!in_.at_eof())
            throw FileFormatError(FormatErrorKind::InvalidValue,
                                  "trailing bytes in " + in_.path());
        return false;
    }
    float buf[kRecordFloats];
    in_.bytes(buf, sizeof(buf));
    rec = unpack_record(buf);
    validate_record(rec, in_.path());
    ++read_;
    return true;
}

}  // namespace neumat
