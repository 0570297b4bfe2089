#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "akbest/common.hpp"

namespace akbest {

/// Line-oriented text container for trained parameters.
///
///   akbest-model 1
///   scalar <name> <value>
///   tensor <name> <rank> <dim0> <dim1> ...
///   <value>            (one line per element, row-major)
///
/// Values are rendered with %.17g, so a written double reads back exactly and
/// rewriting a loaded file reproduces it byte for byte.
class ModelFile {
  public:
    struct Tensor {
        std::vector<long long> dims;
        std::vector<double> values;
    };

    void set_scalar(const std::string& name, double v) {
        check_name(name);
        scalars_[name] = v;
        remember(name);
    }

    void set_tensor(const std::string& name, std::vector<long long> dims,
                    std::vector<double> values) {
        check_name(name);
        long long count = 1;
        for (long long d : dims) {
            if (d < 1) throw ModelError("ModelFile: tensor dim < 1");
            count *= d;
        }
        if (count != static_cast<long long>(values.size()))
            throw ModelError("ModelFile: tensor size does not match dims");
        tensors_[name] = Tensor{std::move(dims), std::move(values)};
        remember(name);
    }

    bool has(const std::string& name) const {
        return scalars_.count(name) > 0 || tensors_.count(name) > 0;
    }

    double scalar(const std::string& name) const {
        auto it = scalars_.find(name);
        if (it == scalars_.end()) throw ModelError("ModelFile: missing scalar " + name);
        return it->second;
    }

    const Tensor& tensor(const std::string& name) const {
        auto it = tensors_.find(name);
        if (it == tensors_.end()) throw ModelError("ModelFile: missing tensor " + name);
        return it->second;
    }

    const std::vector<std::string>& names() const { return order_; }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ModelError("ModelFile: cannot write " + path);
        out << "akbest-model 1\n";
        for (const std::string& name : order_) {
            if (auto it = scalars_.find(name); it != scalars_.end()) {
                out << "scalar " << name << ' ' << render(it->second) << '\n';
            } else {
                const Tensor& t = tensors_.at(name);
                out << "tensor " << name << ' ' << t.dims.size();
                for (long long d : t.dims) out << ' ' << d;
                out << '\n';
                for (double v : t.values) out << render(v) << '\n';
            }
        }
        if (!out) throw ModelError("ModelFile: write failure on " + path);
    }

    static ModelFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ModelError("ModelFile: cannot open " + path);
        std::string line;
        if (!std::getline(in, line) || line != "akbest-model 1")
            throw ModelError("ModelFile: bad magic in " + path);

        ModelFile m;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string kind, name;
            ls >> kind >> name;
            if (m.has(name)) throw ModelError("ModelFile: duplicate entry " + name);
            if (kind == "scalar") {
                std::string value;
                if (!(ls >> value)) throw ModelError("ModelFile: malformed scalar line");
                m.set_scalar(name, parse(value));
            } else if (kind == "tensor") {
                size_t rank = 0;
                if (!(ls >> rank)) throw ModelError("ModelFile: malformed tensor line");
                std::vector<long long> dims(rank);
                long long count = 1;
                for (size_t i = 0; i < rank; ++i) {
                    if (!(ls >> dims[i]) || dims[i] < 1)
                        throw ModelError("ModelFile: malformed tensor dims");
                    count *= dims[i];
                }
                std::vector<double> values;
                values.reserve(static_cast<size_t>(count));
                for (long long i = 0; i < count; ++i) {
                    if (!std::getline(in, line)) throw ModelError("ModelFile: truncated tensor");
                    values.push_back(parse(line));
                }
                m.set_tensor(name, std::move(dims), std::move(values));
            } else {
                throw ModelError("ModelFile: unknown directive " + kind);
            }
        }
        return m;
    }

  private:
    static void check_name(const std::string& name) {
        if (name.empty()) throw ModelError("ModelFile: empty name");
        for (char ch : name)
            if (std::isspace(static_cast<unsigned char>(ch)))
                throw ModelError("ModelFile: name contains whitespace");
    }

    static std::string render(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    static double parse(const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str()) throw ModelError("ModelFile: bad number '" + s + "'");
        return v;
    }

    void remember(const std::string& name) {
        for (const std::string& n : order_)
            if (n == name) return;
        order_.push_back(name);
    }

    std::map<std::string, double> scalars_;
    std::map<std::string, Tensor> tensors_;
    std::vector<std::string> order_;
};

}  // namespace akbest
