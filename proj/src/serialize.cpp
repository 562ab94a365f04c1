#include "coexsim/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "coexsim/errors.hpp"
#include "coexsim/version.hpp"

namespace coexsim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double db10(double linear) {
    if (linear <= 0.0) return -HUGE_VAL;
    return 10.0 * std::log10(linear);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot open output file: " + path);
    return out;
}

MetaList with_version(const MetaList& meta) {
    MetaList full;
    full.emplace_back("tool", std::string("coexsim ") + kVersion);
    full.insert(full.end(), meta.begin(), meta.end());
    return full;
}

nlohmann::json meta_object(const MetaList& meta) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [k, v] : with_version(meta)) obj[k] = v;
    return obj;
}

} // namespace

void write_rows_csv(const std::string& path, const MetaList& meta,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    auto out = open_out(path);
    for (const auto& [k, v] : with_version(meta)) out << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

void write_rows_json(const std::string& path, const MetaList& meta,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    nlohmann::json doc;
    doc["meta"] = meta_object(meta);
    doc["columns"] = header;
    auto& data = doc["rows"] = nlohmann::json::array();
    for (const auto& row : rows) data.push_back(row);
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

MetaList interference_table_meta(const InterferenceTable& table) {
    MetaList meta;
    meta.emplace_back("model", to_string(table.model));
    meta.emplace_back("victim", table.victim_label);
    meta.emplace_back("aggressor", table.aggressor_label);
    meta.emplace_back("sync", to_string(table.sync));
    meta.emplace_back("l_max", std::to_string(table.l_max));
    meta.emplace_back("trials", std::to_string(table.trials));
    meta.emplace_back("seed", std::to_string(table.seed));
    meta.emplace_back("normalization", "sigma_d2 = 1 (interference relative to one "
                                       "demodulated subcarrier's signal power)");
    if (table.tail_valid) {
        meta.emplace_back("tail_coeff", format_double(table.tail_coeff));
        meta.emplace_back("tail_exponent", format_double(table.tail_exponent));
    }
    if (!table.warning.empty()) meta.emplace_back("warning", table.warning);
    return meta;
}

namespace {

// One-sigma band width in dB; the CSV's stderr column.
std::string stderr_db_string(double power, double se) {
    if (power <= 0.0 || se <= 0.0) return "0";
    return format_double(10.0 * std::log10(1.0 + se / power));
}

} // namespace

void write_interference_table_csv(const std::string& path, const InterferenceTable& table,
                                  const MetaList& extra) {
    MetaList meta = interference_table_meta(table);
    meta.insert(meta.end(), extra.begin(), extra.end());
    std::vector<std::vector<std::string>> rows;
    for (int l = -table.l_max; l <= table.l_max; ++l) {
        const double p = table.at(l);
        rows.push_back({std::to_string(l), format_double(p), format_double(db10(p)),
                        stderr_db_string(p, table.std_error_at(l))});
    }
    write_rows_csv(path, meta, {"l", "I_linear", "I_db", "stderr_db"}, rows);
}

void write_interference_table_json(const std::string& path, const InterferenceTable& table,
                                   const MetaList& extra) {
    MetaList meta = interference_table_meta(table);
    meta.insert(meta.end(), extra.begin(), extra.end());
    nlohmann::json doc;
    doc["meta"] = meta_object(meta);
    auto& entries = doc["entries"] = nlohmann::json::array();
    for (int l = -table.l_max; l <= table.l_max; ++l) {
        nlohmann::json e;
        e["l"] = l;
        e["I_linear"] = table.at(l);
        e["std_error"] = table.std_error_at(l);
        entries.push_back(e);
    }
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

namespace {

MetaList psd_meta(const PsdEstimate& psd) {
    MetaList meta;
    meta.emplace_back("source", psd.meta.source.empty() ? "(buffer)" : psd.meta.source);
    meta.emplace_back("segment_len", std::to_string(psd.meta.segment_len));
    meta.emplace_back("overlap_frac", format_double(psd.meta.overlap_frac));
    meta.emplace_back("window", psd.meta.window);
    meta.emplace_back("segments", std::to_string(psd.meta.n_segments));
    meta.emplace_back("trials", std::to_string(psd.meta.n_trials));
    meta.emplace_back("seed", std::to_string(psd.meta.seed));
    meta.emplace_back("subcarrier_scale", format_double(psd.meta.subcarrier_scale));
    meta.emplace_back("db_reference", "per-subcarrier signal power (sigma_d2 = 1)");
    return meta;
}

} // namespace

void write_psd_csv(const std::string& path, const PsdEstimate& psd, const MetaList& extra) {
    MetaList meta = psd_meta(psd);
    meta.insert(meta.end(), extra.begin(), extra.end());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < psd.freqs.size(); ++i)
        rows.push_back({format_double(psd.freqs[i]), format_double(psd.values[i]),
                        format_double(db10(psd.values[i]))});
    write_rows_csv(path, meta, {"freq_over_dF", "psd_linear", "psd_db"}, rows);
}

void write_psd_json(const std::string& path, const PsdEstimate& psd, const MetaList& extra) {
    MetaList meta = psd_meta(psd);
    meta.insert(meta.end(), extra.begin(), extra.end());
    nlohmann::json doc;
    doc["meta"] = meta_object(meta);
    doc["freq_over_dF"] = psd.freqs;
    doc["psd_linear"] = psd.values;
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

} // namespace coexsim
