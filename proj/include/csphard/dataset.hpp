#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace csphard {

enum class SatLabel { Yes, No, Timeout };
enum class HardClass { Easy, Medium, Hard };
enum class ThresholdMode { WallClock, Backtracks };

const char* to_string(SatLabel s);
const char* to_string(HardClass c);
SatLabel sat_from_string(const std::string& s);
HardClass class_from_string(const std::string& s);

// Easy strictly below easy_below, Hard strictly above hard_above, the closed
// band [easy_below, hard_above] is Medium. Backtracks mode applies the same
// partition to the backtrack count, which keeps CI runs machine-independent.
struct HardnessThresholds {
    double easy_below = 5.0;
    double hard_above = 60.0;
    ThresholdMode mode = ThresholdMode::WallClock;
    std::int64_t bt_easy_below = 50;
    std::int64_t bt_hard_above = 2000;
};

// One solved sweep point: generation parameters plus the solve outcome.
struct InstanceRecord {
    int n = 0, d = 0, e = 0, nf = 0;
    double t = 0.0;
    std::uint64_t seed = 0;
    SatLabel sat = SatLabel::Yes;
    std::int64_t backtracks = 0;
    std::int64_t nodes = 0;
    double elapsed_s = 0.0;
    HardClass cls = HardClass::Easy;

    bool operator==(const InstanceRecord&) const = default;
};

// Wall-clock classification per the three-band table.
HardClass classify(double elapsed_s, const HardnessThresholds& th);

// Mode-aware classification; a timed-out solve is Hard regardless of the
// recorded numbers.
HardClass classify_outcome(SatLabel sat, double elapsed_s, std::int64_t backtracks,
                           const HardnessThresholds& th);

// Drops the Easy class; only medium and hard instances are worth mining.
std::vector<InstanceRecord> select_for_mining(const std::vector<InstanceRecord>& records);

struct FeatureColumn {
    std::string name;
    bool numeric = true;
    std::vector<double> nums;
    std::vector<std::string> cats;
};

struct FeatureTable {
    std::size_t rows = 0;
    std::vector<FeatureColumn> columns;
};

// Mining feature set: e, nf, t, sat, class. backtracks/nodes/elapsed/seed
// are noise (running time is monotone in backtracks); zero-variance
// parameter columns (typically n and d, fixed per sweep) carry no
// information and are excluded.
FeatureTable drop_redundant(const std::vector<InstanceRecord>& records);

struct BinSpec {
    std::string attr;
    bool constant = false;
    double min = 0.0, max = 0.0, width = 0.0;
    int bins = 0;
    std::vector<std::string> labels;  // one per bin, or the single constant label
};

struct BinningScheme {
    int bins = 0;
    std::vector<BinSpec> specs;
};

struct TransactionDb {
    std::vector<std::string> items;                 // universe, sorted lexicographically
    std::vector<std::vector<int>> transactions;     // sorted ids into items

    const std::string& label(int id) const { return items[id]; }
    // -1 when the label is not in the universe.
    int id_of(const std::string& label) const;
};

// Equal-width binning over observed min/max: value v falls in bin
// min(bins-1, floor((v-min)/width)). Labels read "attr=(lo-hi]" with the
// lowest bin closed, "attr=[lo-hi]". Constant numeric columns and
// categorical columns pass through as "attr=value". Every transaction gets
// exactly one item per column.
std::pair<TransactionDb, BinningScheme> discretize(const FeatureTable& table, int bins);

// CSV persistence. Header is exactly
//   n,d,e,nf,t,seed,sat,backtracks,nodes,elapsed_s,class
// and rows are sorted by (e, nf, t, seed). Parse errors name the line.
extern const char* const kInstanceCsvHeader;
void write_csv(const std::vector<InstanceRecord>& records, std::ostream& os);
std::vector<InstanceRecord> read_csv(std::istream& is);
void write_csv_file(const std::string& path, const std::vector<InstanceRecord>& records);
std::vector<InstanceRecord> read_csv_file(const std::string& path);
std::string record_csv_row(const InstanceRecord& r);
InstanceRecord record_from_csv_row(const std::string& line, int lineno);
std::vector<InstanceRecord> sorted_by_sweep_key(std::vector<InstanceRecord> records);

// One line per transaction, items space-separated.
void write_transactions(const TransactionDb& db, std::ostream& os);
TransactionDb read_transactions(std::istream& is);

}  // namespace csphard
