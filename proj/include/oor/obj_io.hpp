#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "oor/geometry.hpp"

namespace oor {

// Minimal OBJ reader: `v x y z` and `f i j k ...` (1-indexed, fans
// triangulated, `i/vt/vn` suffixes ignored). Everything else is skipped.
inline TriMesh read_obj(std::istream& in) {
    TriMesh mesh;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x() >> v.y() >> v.z()))
                throw ParseError("obj: bad vertex at line " + std::to_string(lineno));
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                const std::string head = tok.substr(0, tok.find('/'));
                int i = 0;
                try {
                    i = std::stoi(head);
                } catch (const std::exception&) {
                    throw ParseError("obj: bad face index at line " + std::to_string(lineno));
                }
                if (i < 0) i = static_cast<int>(mesh.vertices.size()) + i + 1;
                if (i < 1 || i > static_cast<int>(mesh.vertices.size()))
                    throw ParseError("obj: face index out of range at line " +
                                     std::to_string(lineno));
                idx.push_back(i - 1);
            }
            if (idx.size() < 3)
                throw ParseError("obj: face with fewer than 3 vertices at line " +
                                 std::to_string(lineno));
            for (std::size_t k = 2; k < idx.size(); ++k)
                mesh.faces.push_back({idx[0], idx[k - 1], idx[k]});
        }
    }
    return mesh;
}

inline TriMesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("obj: cannot open " + path);
    return read_obj(in);
}

inline void write_obj(std::ostream& out, const TriMesh& mesh,
                      const std::string& object_name = "") {
    char buf[128];
    if (!object_name.empty()) out << "o " << object_name << "\n";
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

}  // namespace oor
