#include "cool/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace cool {

int oversample_count(double delta_pi, const DatasetParams& p) {
    double tol = p.delta_tolerance;
    double raw = double(p.n_max) * (delta_pi - tol) / (1.0 - tol);
    long v = long(std::ceil(raw - 1e-12));
    return int(std::max(v, 0L));
}

size_t saur_count(size_t new_count, size_t old_count, int age, double psi) {
    double raw = std::pow(psi, double(age)) * double(std::min(new_count, old_count));
    return size_t(std::ceil(raw - 1e-12));
}

size_t negative_count(size_t positive_count, double phi) {
    return size_t(std::floor(phi * double(positive_count) + 1e-12));
}

namespace {

template <class T>
std::vector<T> sample_without_replacement(const std::vector<T>& pool, size_t n, Rng& rng) {
    std::vector<size_t> idx(pool.size());
    for (size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    rng.shuffle(idx);
    n = std::min(n, pool.size());
    std::vector<T> out;
    out.reserve(n);
    for (size_t k = 0; k < n; ++k) out.push_back(pool[idx[k]]);
    return out;
}

Dataset build_dataset(const std::vector<SampleRecord>& new_records,
                      const std::vector<std::pair<int, std::vector<SampleRecord>>>& old_by_age,
                      const std::vector<std::vector<int>>& negative_pool, const DatasetParams& p,
                      Rng& rng, bool oversample_new) {
    Dataset g;
    for (const auto& rec : new_records) {
        int copies = oversample_new ? oversample_count(rec.delta_pi, p) : 1;
        for (int k = 0; k < copies; ++k) {
            g.samples.push_back(DatasetSample{rec.tokens, rec.root, true});
        }
    }
    for (const auto& [age, records] : old_by_age) {
        if (age < 1 || age > p.window) continue;
        size_t take = saur_count(new_records.size(), records.size(), age, p.psi);
        for (const auto& rec : sample_without_replacement(records, take, rng)) {
            g.samples.push_back(DatasetSample{rec.tokens, rec.root, true});
        }
    }
    size_t want_neg = negative_count(g.samples.size(), p.phi);
    for (const auto& tokens : sample_without_replacement(negative_pool, want_neg, rng)) {
        g.samples.push_back(DatasetSample{tokens, -1, false});
    }
    rng.shuffle(g.samples);
    return g;
}

} // namespace

Dataset build_training_dataset(const std::vector<SampleRecord>& new_records,
                               const std::vector<std::pair<int, std::vector<SampleRecord>>>& old_by_age,
                               const std::vector<std::vector<int>>& negative_pool,
                               const DatasetParams& p, Rng& rng) {
    return build_dataset(new_records, old_by_age, negative_pool, p, rng, true);
}

Dataset build_testing_dataset(const std::vector<SampleRecord>& new_records,
                              const std::vector<std::pair<int, std::vector<SampleRecord>>>& old_by_age,
                              const std::vector<std::vector<int>>& negative_pool,
                              const DatasetParams& p, Rng& rng) {
    return build_dataset(new_records, old_by_age, negative_pool, p, rng, false);
}

// ---------------------------------------------------------------------------

DataStore::DataStore(std::string root_dir, uint64_t seed, bool enabled)
    : root_(std::move(root_dir)), seed_(seed), enabled_(enabled) {
    if (enabled_) load_index();
}

std::string DataStore::file_path(const std::string& key, int cycle) const {
    return root_ + "/" + key + "/cycle-" + std::to_string(cycle) + ".jsonl";
}

void DataStore::load_index() {
    std::ifstream in(root_ + "/index.json");
    if (!in) return;
    try {
        json j;
        in >> j;
        cycle_ = j.value("cycle", 1);
        if (j.contains("domains")) {
            for (auto& [key, dj] : j["domains"].items()) {
                DomainEntry e;
                for (const auto& m : dj["members"]) e.members.add(m.get<std::string>());
                for (const auto& fj : dj["files"]) {
                    FileEntry f;
                    f.cycle = fj.value("cycle", 1);
                    f.path = fj.value("path", "");
                    f.watermark = fj.value("watermark", 0L);
                    f.count = fj.value("count", 0L);
                    e.files.push_back(std::move(f));
                }
                domains_[key] = std::move(e);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "warning: unreadable data index (" << e.what() << "); starting fresh\n";
        domains_.clear();
        cycle_ = 1;
    }
}

void DataStore::save_index() const {
    if (!enabled_) return;
    try {
        fs::create_directories(root_);
        json j;
        j["cycle"] = cycle_;
        json dj = json::object();
        for (const auto& [key, e] : domains_) {
            json fj = json::array();
            for (const auto& f : e.files) {
                fj.push_back({{"cycle", f.cycle},
                              {"path", f.path},
                              {"watermark", f.watermark},
                              {"count", f.count}});
            }
            dj[key] = {{"members", std::vector<std::string>(e.members.names.begin(),
                                                            e.members.names.end())},
                       {"files", fj}};
        }
        j["domains"] = dj;
        std::string tmp = root_ + "/index.json.tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            out << j.dump(1) << "\n";
        }
        fs::rename(tmp, root_ + "/index.json");
    } catch (const std::exception& e) {
        std::cerr << "warning: could not persist data index: " << e.what() << "\n";
    }
}

int DataStore::advance_cycle() {
    ++cycle_;
    save_index();
    return cycle_;
}

void DataStore::append_batch(const DomainSet& d, const std::vector<ModelingRecord>& records) {
    if (!enabled_ || records.empty()) return;
    try {
        std::string key = d.key();
        auto& entry = domains_[key];
        entry.members = d;
        FileEntry* file = nullptr;
        if (!entry.files.empty() && entry.files.back().cycle == cycle_) file = &entry.files.back();
        if (!file) {
            FileEntry f;
            f.cycle = cycle_;
            f.path = file_path(key, cycle_);
            entry.files.push_back(std::move(f));
            file = &entry.files.back();
        }
        fs::create_directories(fs::path(file->path).parent_path());
        std::ofstream out(file->path, std::ios::app);
        if (!out) throw std::runtime_error("cannot open " + file->path);
        for (const auto& rec : records) {
            json j;
            j["state_tokens"] = rec.state_tokens;
            j["root"] = rec.root;
            j["delta_pi"] = rec.delta_pi;
            out << j.dump() << "\n";
        }
        out.flush();
        file->count += long(records.size());
        save_index();
    } catch (const std::exception& e) {
        std::cerr << "warning: trace collection failed: " << e.what() << "\n";
    }
}

std::vector<SampleRecord> DataStore::read_file(const FileEntry& f) const {
    std::vector<SampleRecord> out;
    std::ifstream in(f.path);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            SampleRecord r;
            r.tokens = j.at("state_tokens").get<std::vector<int>>();
            r.root = j.value("root", -1);
            r.delta_pi = j.value("delta_pi", 1.0);
            out.push_back(std::move(r));
        } catch (const std::exception&) {
            // tolerate a torn trailing line
        }
    }
    return out;
}

std::vector<DomainSet> DataStore::pending_domains() const {
    std::vector<DomainSet> out;
    for (const auto& [key, e] : domains_) {
        for (const auto& f : e.files) {
            if (f.cycle == cycle_ && f.watermark < f.count) {
                out.push_back(e.members);
                break;
            }
        }
    }
    return out;
}

std::vector<DomainSet> DataStore::known_domains() const {
    std::vector<DomainSet> out;
    for (const auto& [key, e] : domains_) out.push_back(e.members);
    return out;
}

void DataStore::mark_consumed(const DomainSet& d) {
    auto it = domains_.find(d.key());
    if (it == domains_.end()) return;
    for (auto& f : it->second.files) {
        if (f.cycle == cycle_) f.watermark = f.count;
    }
    save_index();
}

bool DataStore::is_train(const std::string& key, int cycle, long index, double ratio) const {
    uint64_t h = mix64(seed_ ^ mix64(fnv1a(key)) ^ mix64(uint64_t(cycle) * 1315423911ull) ^
                       mix64(uint64_t(index) + 0x51ull));
    double u = double(h >> 11) * 0x1.0p-53;
    return u < ratio;
}

DataStore::BuilderInput DataStore::gather(const DomainSet& d, const DatasetParams& p) const {
    BuilderInput bi;
    auto it = domains_.find(d.key());
    if (it == domains_.end()) return bi;
    const auto& entry = it->second;

    for (const auto& f : entry.files) {
        auto records = read_file(f);
        if (f.cycle == cycle_) {
            // records past the watermark are new; earlier cycles are old
            for (long k = f.watermark; k < long(records.size()); ++k) {
                auto& dst = is_train(d.key(), f.cycle, k, p.split_ratio) ? bi.new_train : bi.new_test;
                dst.push_back(records[size_t(k)]);
            }
        } else {
            int age = cycle_ - f.cycle;
            if (age < 1 || age > p.window) continue;
            std::vector<SampleRecord> tr, te;
            for (long k = 0; k < long(records.size()); ++k) {
                (is_train(d.key(), f.cycle, k, p.split_ratio) ? tr : te)
                    .push_back(records[size_t(k)]);
            }
            if (!tr.empty()) bi.old_train.emplace_back(age, std::move(tr));
            if (!te.empty()) bi.old_test.emplace_back(age, std::move(te));
        }
    }

    // negative pools from disjoint domains, split-respecting, deduplicated
    std::set<std::vector<int>> seen_train, seen_test;
    for (const auto& [key, other] : domains_) {
        if (key == d.key()) continue;
        if (!other.members.intersect(d).empty()) continue;
        for (const auto& f : other.files) {
            auto records = read_file(f);
            for (long k = 0; k < long(records.size()); ++k) {
                bool train = is_train(key, f.cycle, k, p.split_ratio);
                auto& seen = train ? seen_train : seen_test;
                if (seen.insert(records[size_t(k)].tokens).second) {
                    (train ? bi.neg_pool_train : bi.neg_pool_test)
                        .push_back(records[size_t(k)].tokens);
                }
            }
        }
    }
    return bi;
}

std::vector<SampleRecord> DataStore::split_records(const DomainSet& d, double ratio,
                                                   bool train) const {
    std::vector<SampleRecord> out;
    auto it = domains_.find(d.key());
    if (it == domains_.end()) return out;
    for (const auto& f : it->second.files) {
        auto records = read_file(f);
        for (long k = 0; k < long(records.size()); ++k) {
            if (is_train(d.key(), f.cycle, k, ratio) == train) out.push_back(records[size_t(k)]);
        }
    }
    return out;
}

std::vector<SampleRecord> DataStore::all_records(const DomainSet& d) const {
    std::vector<SampleRecord> out;
    auto it = domains_.find(d.key());
    if (it == domains_.end()) return out;
    for (const auto& f : it->second.files) {
        auto records = read_file(f);
        out.insert(out.end(), records.begin(), records.end());
    }
    return out;
}

} // namespace cool
