#include "uavmec/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uavmec::nn {

namespace {
constexpr const char* kMagic = "uavmec-checkpoint";
}

const Matrix& Checkpoint::tensor(const std::string& name) const {
    for (const auto& [n, m] : tensors)
        if (n == name) return m;
    throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
}

const std::string& Checkpoint::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw std::runtime_error("checkpoint: missing meta '" + key + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out << kMagic << " 1\n";
    for (const auto& [k, v] : ckpt.meta) out << "meta " << k << ' ' << v << '\n';
    char buf[64];
    for (const auto& [name, m] : ckpt.tensors) {
        out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%a", m(r, c));
                if (c) out << ' ';
                out << buf;
            }
            out << '\n';
        }
    }
    out << "end\n";
    if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != kMagic || version != 1) throw std::runtime_error("not a version-1 checkpoint: " + path);
    Checkpoint ckpt;
    std::string word;
    while (in >> word) {
        if (word == "end") return ckpt;
        if (word == "meta") {
            std::string key;
            std::string value;
            in >> key;
            std::getline(in, value);
            if (!value.empty() && value.front() == ' ') value.erase(0, 1);
            ckpt.meta.emplace_back(key, value);
        } else if (word == "tensor") {
            std::string name;
            std::size_t rows = 0;
            std::size_t cols = 0;
            in >> name >> rows >> cols;
            Matrix m(rows, cols);
            std::string tok;
            for (double& v : m.values()) {
                if (!(in >> tok)) throw std::runtime_error("checkpoint truncated in tensor " + name);
                v = std::strtod(tok.c_str(), nullptr);
            }
            ckpt.tensors.emplace_back(name, std::move(m));
        } else {
            throw std::runtime_error("checkpoint: unexpected token '" + word + "'");
        }
    }
    throw std::runtime_error("checkpoint missing end marker: " + path);
}

}  // namespace uavmec::nn
