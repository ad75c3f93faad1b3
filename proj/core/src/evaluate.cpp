// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "neumat/evaluate.h"

#include <cmath>

#include "neumat/parallel.h"
#include "neumat/trainer.h"

namespace neumat {

Float dataset_mse(const MbtfMaterial &mat, const QueryDataset &ds, bool baseline,
                  int threads) {
    check_contract(!ds.records.empty(), "dataset_mse: empty dataset");
    int workers = resolve_threads(threads);
    std::vector<double> sums(workers, 0.0);
    parallel_chunks(static_cast<int64_t>(ds.records.size()), workers,
                    [&](int w, int64_t begin, int64_t end) {
                        EvalContext ctx;
                        double sum = 0;
                        for (int64_t i = begin; i < end; ++i) {
                            const QueryRecord &rec = ds.records[i];
                            Rgb pred = baseline ? eval_baseline(mat, rec.query, ctx)
                                                : eval(mat, rec.query, ctx);
                            sum += loss(pred, rec.target);
                        }
                        sums[w] = sum;
                    });
    double total = 0;
    for (double s : sums)
        total += s;
    return total / static_cast<double>(ds.records.size());
}

std::vector<LodBucket> lod_sweep(const MbtfMaterial &mat, const Heightfield &hf,
                                 const OracleOptions &opt, int per_level,
                                 uint64_t seed, bool baseline, int threads) {
    check_contract(per_level >= 1, "lod_sweep: per_level must be positive");
    const int k = mat.k();
    std::vector<LodBucket> rows;
    rows.reserve(k);

    int workers = resolve_threads(threads);
    for (int s = 1; s <= k; ++s) {
        Float sigma = std::ldexp(1.0, -s);
        std::vector<double> err(workers, 0.0), noise(workers, 0.0);
        parallel_chunks(per_level, workers, [&](int w, int64_t begin, int64_t end) {
            EvalContext ctx;
            double e = 0, nz = 0;
            for (int64_t i = begin; i < end; ++i) {
                // Stream index unique per (level, query).
                Pcg32 rng(seed, static_cast<uint64_t>(s) << 32 |
                                    static_cast<uint64_t>(i));
                Query q;
                q.p = {rng.next_double(), rng.next_double()};
                q.wi = sample_query_direction(rng);
                q.wo = sample_query_direction(rng);
                q.sigma = sigma;
                Rgb var(0);
                Rgb target = mbtf_oracle_stats(hf, q.p, sigma, q.wi, q.wo, opt,
                                               rng, &var);
                Rgb pred = baseline ? eval_baseline(mat, q, ctx) : eval(mat, q, ctx);
                e += loss(pred, target);
                nz += (var.x + var.y + var.z) / 3.0;
            }
            err[w] = e;
            noise[w] = nz;
        });
        double e_total = 0, n_total = 0;
        for (int w = 0; w < workers; ++w) {
            e_total += err[w];
            n_total += noise[w];
        }
        LodBucket row;
        row.level = s;
        row.sigma = sigma;
        row.count = per_level;
        row.mse = e_total / per_level;
        row.debiased_mse = row.mse - n_total / per_level;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace neumat
