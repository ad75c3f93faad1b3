// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NEUMAT_DATASET_H
#define NEUMAT_DATASET_H

#include <cstdint>
#include <string>
#include <vector>

#include "neumat/binaryio.h"
#include "neumat/material.h"

namespace neumat {

/// One supervised training example: a 7D query plus the reference
/// reflectance it should reproduce.
struct QueryRecord {
    Query query;
    Rgb target;
};

struct QueryDataset {
    int k = 0;  // pyramid depth the sigma range was drawn for
    std::vector<QueryRecord> records;

    size_t size() const { return records.size(); }
};

/// FNV-1a over the packed storage encoding of every record, in order. This
/// is the provenance hash recorded in trained materials.
uint64_t dataset_hash(const QueryDataset &ds);

/// Dataset file, magic "MBTQ": little-endian header (version, k, record
/// count, flags) followed by packed 40-byte records
/// (u.xy, sigma, wi.xy, wo.xy, rgb as f32). Writing validates records
/// (finite, sigma > 0, directions on the disk, target >= 0); reading
/// re-validates and reports failures as distinct FileFormatError kinds.
void dataset_write(const QueryDataset &ds, const std::string &path);
QueryDataset dataset_read(const std::string &path);

/// Record-at-a-time reader with bounded memory for large files.
class DatasetReader {
public:
    explicit DatasetReader(const std::string &path);

    int k() const { return k_; }
    uint64_t count() const { return count_; }

    /// Reads and validates the next record. Returns false at end of payload.
    bool next(QueryRecord &rec);

private:
    BinaryReader in_;
    int k_ = 0;
    uint64_t count_ = 0;
    uint64_t read_ = 0;
};

}  // namespace neumat

#endif  // NEUMAT_DATASET_H
