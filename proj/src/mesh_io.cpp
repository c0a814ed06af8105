#include "zzsfem/mesh_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace zzsfem {

std::string format_tag(const BoundaryTag& tag)
{
    return (tag.kind == BcKind::Neumann ? "N" : "D") + std::to_string(tag.id);
}

BoundaryTag parse_tag(const std::string& token)
{
    if (token.size() < 2 || (token[0] != 'N' && token[0] != 'D'))
        throw std::invalid_argument("mesh: bad boundary tag '" + token + "'");
    std::size_t used = 0;
    int id = 0;
    try {
        id = std::stoi(token.substr(1), &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("mesh: bad boundary tag '" + token + "'");
    }
    if (used != token.size() - 1 || id < 0)
        throw std::invalid_argument("mesh: bad boundary tag '" + token + "'");
    return {token[0] == 'N' ? BcKind::Neumann : BcKind::Dirichlet, id};
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    char buf[128];
    out << "nodes " << mesh.num_nodes() << '\n';
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", i, mesh.node(i).x(), mesh.node(i).y());
        out << buf;
    }
    out << "elements " << mesh.num_elements() << '\n';
    for (const QuadElement& e : mesh.elements())
        out << e.id << ' ' << e.nodes[0] << ' ' << e.nodes[1] << ' ' << e.nodes[2] << ' ' << e.nodes[3] << '\n';
    out << "boundary " << mesh.boundary_edges().size() << '\n';
    for (const BoundaryEdge& b : mesh.boundary_edges())
        out << b.element << ' ' << b.local_edge << ' ' << format_tag(b.tag) << '\n';
}

namespace {

int read_header(std::istream& in, const std::string& keyword)
{
    std::string word;
    int count = -1;
    if (!(in >> word >> count) || word != keyword || count < 0)
        throw std::invalid_argument("mesh: expected '" + keyword + " <count>'");
    return count;
}

} // namespace

Mesh read_mesh(std::istream& in)
{
    const int nn = read_header(in, "nodes");
    std::vector<Vec2> nodes(nn);
    for (int i = 0; i < nn; ++i) {
        int id = -1;
        double x = 0, y = 0;
        if (!(in >> id >> x >> y) || id != i)
            throw std::invalid_argument("mesh: bad node line " + std::to_string(i));
        nodes[i] = Vec2(x, y);
    }
    const int ne = read_header(in, "elements");
    std::vector<QuadElement> elements(ne);
    for (int e = 0; e < ne; ++e) {
        QuadElement& el = elements[e];
        if (!(in >> el.id >> el.nodes[0] >> el.nodes[1] >> el.nodes[2] >> el.nodes[3]))
            throw std::invalid_argument("mesh: bad element line " + std::to_string(e));
    }
    const int nb = read_header(in, "boundary");
    std::vector<BoundaryEdge> boundary(nb);
    for (int k = 0; k < nb; ++k) {
        BoundaryEdge& b = boundary[k];
        std::string tag;
        if (!(in >> b.element >> b.local_edge >> tag))
            throw std::invalid_argument("mesh: bad boundary line " + std::to_string(k));
        if (b.element < 0 || b.element >= ne || b.local_edge < 0 || b.local_edge > 3)
            throw std::invalid_argument("mesh: boundary line " + std::to_string(k) + " out of range");
        b.tag = parse_tag(tag);
        b.nodes = {elements[b.element].nodes[b.local_edge], elements[b.element].nodes[(b.local_edge + 1) % 4]};
    }
    return Mesh(std::move(nodes), std::move(elements), std::move(boundary));
}

} // namespace zzsfem
