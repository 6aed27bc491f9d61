#include "csphard/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csphard/format.hpp"

namespace csphard {

const char* to_string(SatLabel s) {
    switch (s) {
        case SatLabel::Yes: return "YES";
        case SatLabel::No: return "NO";
        case SatLabel::Timeout: return "TIMEOUT";
    }
    return "?";
}

const char* to_string(HardClass c) {
    switch (c) {
        case HardClass::Easy: return "Easy";
        case HardClass::Medium: return "Medium";
        case HardClass::Hard: return "Hard";
    }
    return "?";
}

SatLabel sat_from_string(const std::string& s) {
    if (s == "YES") return SatLabel::Yes;
    if (s == "NO") return SatLabel::No;
    if (s == "TIMEOUT") return SatLabel::Timeout;
    throw std::invalid_argument("bad sat label: '" + s + "'");
}

HardClass class_from_string(const std::string& s) {
    if (s == "Easy") return HardClass::Easy;
    if (s == "Medium") return HardClass::Medium;
    if (s == "Hard") return HardClass::Hard;
    throw std::invalid_argument("bad class label: '" + s + "'");
}

HardClass classify(double elapsed_s, const HardnessThresholds& th) {
    if (elapsed_s < th.easy_below) return HardClass::Easy;
    if (elapsed_s > th.hard_above) return HardClass::Hard;
    return HardClass::Medium;
}

HardClass classify_outcome(SatLabel sat, double elapsed_s, std::int64_t backtracks,
                           const HardnessThresholds& th) {
    if (sat == SatLabel::Timeout) return HardClass::Hard;
    if (th.mode == ThresholdMode::WallClock) return classify(elapsed_s, th);
    if (backtracks < th.bt_easy_below) return HardClass::Easy;
    if (backtracks > th.bt_hard_above) return HardClass::Hard;
    return HardClass::Medium;
}

std::vector<InstanceRecord> select_for_mining(const std::vector<InstanceRecord>& records) {
    std::vector<InstanceRecord> out;
    for (const auto& r : records)
        if (r.cls != HardClass::Easy) out.push_back(r);
    return out;
}

FeatureTable drop_redundant(const std::vector<InstanceRecord>& records) {
    FeatureTable table;
    table.rows = records.size();

    auto add_numeric = [&](const std::string& name, auto getter) {
        FeatureColumn col;
        col.name = name;
        col.numeric = true;
        for (const auto& r : records) col.nums.push_back(static_cast<double>(getter(r)));
        bool constant = !col.nums.empty() &&
                        std::all_of(col.nums.begin(), col.nums.end(),
                                    [&](double v) { return v == col.nums.front(); });
        if (!constant) table.columns.push_back(std::move(col));
    };
    add_numeric("n", [](const InstanceRecord& r) { return r.n; });
    add_numeric("d", [](const InstanceRecord& r) { return r.d; });
    add_numeric("e", [](const InstanceRecord& r) { return r.e; });
    add_numeric("nf", [](const InstanceRecord& r) { return r.nf; });
    add_numeric("t", [](const InstanceRecord& r) { return r.t; });

    FeatureColumn sat;
    sat.name = "sat";
    sat.numeric = false;
    for (const auto& r : records) sat.cats.push_back(to_string(r.sat));
    table.columns.push_back(std::move(sat));

    FeatureColumn cls;
    cls.name = "class";
    cls.numeric = false;
    for (const auto& r : records) cls.cats.push_back(to_string(r.cls));
    table.columns.push_back(std::move(cls));
    return table;
}

int TransactionDb::id_of(const std::string& label) const {
    auto it = std::lower_bound(items.begin(), items.end(), label);
    if (it == items.end() || *it != label) return -1;
    return static_cast<int>(it - items.begin());
}

std::pair<TransactionDb, BinningScheme> discretize(const FeatureTable& table, int bins) {
    if (table.rows == 0) throw std::invalid_argument("discretize: empty table");
    if (bins < 1) throw std::invalid_argument("discretize: bins must be >= 1");

    BinningScheme scheme;
    scheme.bins = bins;
    std::vector<std::vector<std::string>> row_items(table.rows);

    for (const auto& col : table.columns) {
        if (!col.numeric) {
            for (std::size_t r = 0; r < table.rows; ++r)
                row_items[r].push_back(col.name + "=" + col.cats[r]);
            continue;
        }
        auto [mn_it, mx_it] = std::minmax_element(col.nums.begin(), col.nums.end());
        double mn = *mn_it, mx = *mx_it;
        BinSpec spec;
        spec.attr = col.name;
        spec.min = mn;
        spec.max = mx;
        if (mn == mx) {
            spec.constant = true;
            spec.bins = 1;
            spec.labels.push_back(format_number(mn));
            for (std::size_t r = 0; r < table.rows; ++r)
                row_items[r].push_back(col.name + "=" + spec.labels[0]);
            scheme.specs.push_back(std::move(spec));
            continue;
        }
        spec.bins = bins;
        spec.width = (mx - mn) / bins;
        for (int k = 0; k < bins; ++k) {
            double lo = mn + k * spec.width;
            double hi = k + 1 == bins ? mx : mn + (k + 1) * spec.width;
            if (k == 0)
                spec.labels.push_back("[" + format_number(lo) + "-" + format_number(hi) + "]");
            else
                spec.labels.push_back("(" + format_number(lo) + "-" + format_number(hi) + "]");
        }
        for (std::size_t r = 0; r < table.rows; ++r) {
            int k = std::min(bins - 1, static_cast<int>((col.nums[r] - mn) / spec.width));
            row_items[r].push_back(col.name + "=" + spec.labels[k]);
        }
        scheme.specs.push_back(std::move(spec));
    }

    TransactionDb db;
    std::set<std::string> universe;
    for (const auto& row : row_items) universe.insert(row.begin(), row.end());
    db.items.assign(universe.begin(), universe.end());
    db.transactions.reserve(table.rows);
    for (const auto& row : row_items) {
        std::vector<int> tr;
        tr.reserve(row.size());
        for (const auto& item : row) tr.push_back(db.id_of(item));
        std::sort(tr.begin(), tr.end());
        db.transactions.push_back(std::move(tr));
    }
    return {std::move(db), std::move(scheme)};
}

const char* const kInstanceCsvHeader = "n,d,e,nf,t,seed,sat,backtracks,nodes,elapsed_s,class";

std::vector<InstanceRecord> sorted_by_sweep_key(std::vector<InstanceRecord> records) {
    std::sort(records.begin(), records.end(), [](const InstanceRecord& a, const InstanceRecord& b) {
        return std::tuple{a.e, a.nf, a.t, a.seed} < std::tuple{b.e, b.nf, b.t, b.seed};
    });
    return records;
}

std::string record_csv_row(const InstanceRecord& r) {
    std::ostringstream os;
    os << r.n << ',' << r.d << ',' << r.e << ',' << r.nf << ',' << format_number(r.t) << ','
       << r.seed << ',' << to_string(r.sat) << ',' << r.backtracks << ',' << r.nodes << ','
       << format_number(r.elapsed_s) << ',' << to_string(r.cls);
    return os.str();
}

InstanceRecord record_from_csv_row(const std::string& line, int lineno) {
    auto fields = split(line, ',');
    if (fields.size() != 11)
        throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 11 fields, got " +
                                 std::to_string(fields.size()));
    try {
        InstanceRecord r;
        r.n = std::stoi(fields[0]);
        r.d = std::stoi(fields[1]);
        r.e = std::stoi(fields[2]);
        r.nf = std::stoi(fields[3]);
        r.t = parse_number(fields[4]);
        r.seed = std::stoull(fields[5]);
        r.sat = sat_from_string(fields[6]);
        r.backtracks = std::stoll(fields[7]);
        r.nodes = std::stoll(fields[8]);
        r.elapsed_s = parse_number(fields[9]);
        r.cls = class_from_string(fields[10]);
        return r;
    } catch (const std::exception& e) {
        throw std::runtime_error("csv line " + std::to_string(lineno) + ": " + e.what());
    }
}

void write_csv(const std::vector<InstanceRecord>& records, std::ostream& os) {
    os << kInstanceCsvHeader << '\n';
    for (const auto& r : sorted_by_sweep_key(records)) os << record_csv_row(r) << '\n';
}

std::vector<InstanceRecord> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kInstanceCsvHeader)
        throw std::runtime_error("csv line 1: header mismatch, expected '" +
                                 std::string(kInstanceCsvHeader) + "'");
    std::vector<InstanceRecord> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        out.push_back(record_from_csv_row(line, lineno));
    }
    return out;
}

void write_csv_file(const std::string& path, const std::vector<InstanceRecord>& records) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(records, os);
}

std::vector<InstanceRecord> read_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_csv(is);
}

void write_transactions(const TransactionDb& db, std::ostream& os) {
    for (const auto& tr : db.transactions) {
        for (std::size_t i = 0; i < tr.size(); ++i) {
            if (i) os << ' ';
            os << db.items[tr[i]];
        }
        os << '\n';
    }
}

TransactionDb read_transactions(std::istream& is) {
    std::vector<std::vector<std::string>> rows;
    std::set<std::string> universe;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto items = split(line, ' ');
        items.erase(std::remove(items.begin(), items.end(), std::string{}), items.end());
        universe.insert(items.begin(), items.end());
        rows.push_back(std::move(items));
    }
    TransactionDb db;
    db.items.assign(universe.begin(), universe.end());
    for (const auto& row : rows) {
        std::vector<int> tr;
        for (const auto& item : row) tr.push_back(db.id_of(item));
        std::sort(tr.begin(), tr.end());
        tr.erase(std::unique(tr.begin(), tr.end()), tr.end());
        db.transactions.push_back(std::move(tr));
    }
    return db;
}

}  // namespace csphard
