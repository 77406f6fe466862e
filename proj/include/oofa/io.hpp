#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oofa/moment.hpp"

namespace oofa {

using nlohmann::json;

//! Parse a block structure from either a comma-separated size list
//! ("5,3,3", labels assigned consecutively) or a JSON list of explicit label
//! sets ("[[1,4,7,9,10],[2,6,8],[3,5,11]]"). An empty string means a single
//! block over 1..m.
inline BlockStructure parse_blocks(const std::string& text, int m) {
    if (text.empty()) return BlockStructure::single(m);
    if (text.front() == '[') {
        const json j = json::parse(text);
        std::vector<std::vector<int>> blocks;
        for (const auto& b : j) blocks.push_back(b.get<std::vector<int>>());
        BlockStructure bs = BlockStructure::from_blocks(std::move(blocks));
        if (bs.m() != m)
            throw invalid_input("block label sets cover " + std::to_string(bs.m()) + " labels, expected m = " +
                                std::to_string(m));
        return bs;
    }
    std::vector<int> sizes;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
    BlockStructure bs = BlockStructure::from_sizes(sizes);
    if (bs.m() != m)
        throw invalid_input("block sizes sum to " + std::to_string(bs.m()) + ", expected m = " + std::to_string(m));
    return bs;
}

inline json blocks_to_json(const BlockStructure& bs) {
    json j = json::array();
    for (const auto& b : bs.blocks()) j.push_back(b);
    return j;
}

//! Design CSV: header "run,p1,...,pm", one 1-based run index and the labels
//! per row.
inline void write_design_csv(std::ostream& os, const std::vector<Permutation>& design) {
    if (design.empty()) throw invalid_input("refusing to write an empty design");
    os << "run";
    for (int i = 1; i <= design.front().size(); ++i) os << ",p" << i;
    os << "\n";
    for (std::size_t r = 0; r < design.size(); ++r) {
        os << (r + 1);
        for (int v : design[r].order) os << "," << v;
        os << "\n";
    }
}

inline void write_design_csv(const std::string& path, const std::vector<Permutation>& design) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_design_csv(f, design);
}

inline std::vector<Permutation> read_design_csv(std::istream& is, int m) {
    std::vector<Permutation> out;
    std::string line;
    if (!std::getline(is, line)) throw invalid_input("design CSV is empty");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ','); // run index, ignored
        Permutation a;
        while (std::getline(ss, tok, ',')) a.order.push_back(std::stoi(tok));
        if (!is_valid_permutation(a, m))
            throw invalid_input("design CSV row " + std::to_string(out.size() + 1) +
                                " is not a permutation of 1.." + std::to_string(m));
        out.push_back(std::move(a));
    }
    if (out.empty()) throw invalid_input("design CSV has no runs");
    return out;
}

inline std::vector<Permutation> read_design_csv(const std::string& path, int m) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_design_csv(f, m);
}

//! Moment matrix CSV with the column labels as header row and column.
inline void write_moment_csv(std::ostream& os, const MomentMatrix& M) {
    os << "label";
    for (const auto& l : M.labels) os << "," << l.str();
    os << "\n";
    os << std::setprecision(17);
    for (int i = 0; i < M.size(); ++i) {
        os << M.labels[i].str();
        for (int j = 0; j < M.size(); ++j) os << "," << M.values(i, j);
        os << "\n";
    }
}

inline void write_moment_csv(const std::string& path, const MomentMatrix& M) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_moment_csv(f, M);
}

//! Cost CSV: header "a1,...,am,y", one feasible run and its response per row.
inline std::vector<std::pair<Permutation, double>> read_cost_csv(std::istream& is, int m) {
    std::vector<std::pair<Permutation, double>> out;
    std::string line;
    if (!std::getline(is, line)) throw invalid_input("cost CSV is empty");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> toks;
        while (std::getline(ss, tok, ',')) toks.push_back(tok);
        if (static_cast<int>(toks.size()) != m + 1)
            throw invalid_input("cost CSV row has " + std::to_string(toks.size()) + " fields, expected " +
                                std::to_string(m + 1));
        Permutation a;
        for (int i = 0; i < m; ++i) a.order.push_back(std::stoi(toks[i]));
        if (!is_valid_permutation(a, m))
            throw invalid_input("cost CSV row " + std::to_string(out.size() + 1) + " is not a permutation");
        out.emplace_back(std::move(a), std::stod(toks.back()));
    }
    return out;
}

inline std::vector<std::pair<Permutation, double>> read_cost_csv(const std::string& path, int m) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_cost_csv(f, m);
}

inline void write_cost_csv(const std::string& path, const std::vector<std::pair<Permutation, double>>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    if (rows.empty()) throw invalid_input("refusing to write an empty cost table");
    for (int i = 1; i <= rows.front().first.size(); ++i) f << "a" << i << ",";
    f << "y\n";
    f << std::setprecision(17);
    for (const auto& [a, y] : rows) {
        for (int v : a.order) f << v << ",";
        f << y << "\n";
    }
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
}

} // namespace oofa
