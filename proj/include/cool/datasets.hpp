#ifndef COOL_DATASETS_HPP
#define COOL_DATASETS_HPP

#include <map>
#include <string>
#include <vector>

#include "cool/bddb.hpp"
#include "cool/domains.hpp"
#include "cool/rng.hpp"

namespace cool {

// One collected trace row, as stored on disk.
struct SampleRecord {
    std::vector<int> tokens;
    int root = -1;
    double delta_pi = 1.0;
};

struct DatasetSample {
    std::vector<int> tokens;
    int root = -1;   // -1 on negative samples
    bool indom = true;
};

struct Dataset {
    std::vector<DatasetSample> samples;
    size_t positives() const {
        size_t n = 0;
        for (const auto& s : samples) n += s.indom ? 1 : 0;
        return n;
    }
    size_t negatives() const { return samples.size() - positives(); }
    bool empty() const { return samples.empty(); }
};

struct DatasetParams {
    int n_max = 5;                // oversampling ceiling
    double delta_tolerance = 0.1; // policy error that triggers no duplication
    int window = 4;               // sliding window over prior cycles
    double psi = 0.5;             // sequential attrition undersample rate
    double phi = 0.3;             // negative-to-positive ratio
    double split_ratio = 0.8;     // train fraction at first use
};

// Duplication count for one new record:
//   max(ceil(n_max * (delta - tol) / (1 - tol)), 0)
int oversample_count(double delta_pi, const DatasetParams& p);

// Old-cycle retention: ceil(psi^age * min(new_count, old_count)).
size_t saur_count(size_t new_count, size_t old_count, int age, double psi);

// floor(phi * positive_count)
size_t negative_count(size_t positive_count, double phi);

// Positive + negative dataset assembly; `old_by_age` carries (age, records)
// for cycles m-window .. m-1; the negative pool holds deduplicated state
// encodings from domains disjoint with the owner.
Dataset build_training_dataset(const std::vector<SampleRecord>& new_records,
                               const std::vector<std::pair<int, std::vector<SampleRecord>>>& old_by_age,
                               const std::vector<std::vector<int>>& negative_pool,
                               const DatasetParams& p, Rng& rng);

// Same pipeline without duplication of the new records.
Dataset build_testing_dataset(const std::vector<SampleRecord>& new_records,
                              const std::vector<std::pair<int, std::vector<SampleRecord>>>& old_by_age,
                              const std::vector<std::vector<int>>& negative_pool,
                              const DatasetParams& p, Rng& rng);

// ---------------------------------------------------------------------------
// Disk store: one line-delimited file per (domain, cycle) plus an index table.
// Appends are best-effort; failures surface as warnings, never as compile
// failures.
class DataStore {
public:
    DataStore(std::string root_dir, uint64_t seed, bool enabled = true);

    bool enabled() const { return enabled_; }
    int cycle() const { return cycle_; }
    int advance_cycle();

    void append_batch(const DomainSet& d, const std::vector<ModelingRecord>& records);

    std::vector<DomainSet> pending_domains() const; // domains with unconsumed records
    std::vector<DomainSet> known_domains() const;
    void mark_consumed(const DomainSet& d);

    struct BuilderInput {
        std::vector<SampleRecord> new_train, new_test;
        std::vector<std::pair<int, std::vector<SampleRecord>>> old_train, old_test;
        std::vector<std::vector<int>> neg_pool_train, neg_pool_test;
    };
    BuilderInput gather(const DomainSet& d, const DatasetParams& p) const;

    // every stored record of a domain (pretraining source)
    std::vector<SampleRecord> all_records(const DomainSet& d) const;

    // records of one split across all of a domain's files
    std::vector<SampleRecord> split_records(const DomainSet& d, double ratio, bool train) const;

    // deterministic record split
    bool is_train(const std::string& key, int cycle, long index, double ratio) const;

    const std::string& root() const { return root_; }

private:
    struct FileEntry {
        int cycle = 0;
        std::string path;
        long watermark = 0; // first unconsumed record
        long count = 0;
    };
    struct DomainEntry {
        DomainSet members;
        std::vector<FileEntry> files; // strictly increasing cycles
    };

    std::string root_;
    uint64_t seed_;
    bool enabled_;
    int cycle_ = 1;
    std::map<std::string, DomainEntry> domains_;

    void load_index();
    void save_index() const;
    std::vector<SampleRecord> read_file(const FileEntry& f) const;
    std::string file_path(const std::string& key, int cycle) const;
};

} // namespace cool

#endif
