#include "micropump/materials.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "micropump/errors.hpp"
#include "micropump/linalg.hpp"

namespace micropump::materials {

double ElasticTensor::smallest_eigenvalue() const {
    linalg::Matrix m(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m(i, j) = c[i][j];
    auto eig = linalg::eigen_symmetric(m);
    return eig.values.front();
}

void ElasticTensor::validate(const std::string& label) const {
    IssueList issues;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (c[i][j] != c[j][i])
                issues.add(label + ": stiffness not symmetric at (" + std::to_string(i) + "," +
                           std::to_string(j) + "): " + std::to_string(c[i][j]) + " vs " +
                           std::to_string(c[j][i]));
    if (issues.empty()) {
        double lam = smallest_eigenvalue();
        if (lam <= 0.0)
            issues.add(label + ": stiffness not positive definite, smallest eigenvalue " +
                       std::to_string(lam) + " Pa");
    }
    issues.throw_if_any();
}

void PiezoTensor::validate(const std::string& label) const {
    IssueList issues;
    for (int row = 0; row < 2; ++row)
        for (int col = 0; col < 3; ++col)
            if (e[row][col] != 0.0)
                issues.add(label + ": e[" + std::to_string(row) + "][" + std::to_string(col) +
                           "] must be zero for this symmetry class (normal column in a shear row)");
    issues.throw_if_any();
}

void Layer::validate(const std::string& label) const {
    IssueList issues;
    if (!(thickness > 0.0)) issues.add(label + ": thickness must be > 0");
    if (!(density > 0.0)) issues.add(label + ": density must be > 0");
    issues.throw_if_any();
    elastic.validate(label);
    if (piezo) piezo->validate(label);
}

IsotropicEquivalents isotropic_equivalents(const ElasticTensor& elastic) {
    elastic.validate("elastic tensor");
    double c11 = elastic.c[0][0], c12 = elastic.c[0][1];
    IsotropicEquivalents out;
    out.youngs_modulus = (c11 - c12) * (c11 + 2.0 * c12) / (c11 + c12);
    out.poisson_ratio = c12 / (c11 + c12);
    return out;
}

double effective_e31(const Layer& layer) {
    if (!layer.piezo) throw ValidationError("effective_e31: layer has no piezo tensor");
    double c13 = layer.elastic.c[0][2], c33 = layer.elastic.c[2][2];
    if (c33 <= 0.0) throw ValidationError("effective_e31: C33 must be > 0");
    double e31 = layer.piezo->e[2][0], e33 = layer.piezo->e[2][2];
    return e31 - e33 * c13 / c33;
}

LaminateConstants laminate_reduce(const std::vector<Layer>& stack, std::size_t drive_layer_index,
                                  double z_origin) {
    if (stack.empty()) throw ValidationError("laminate_reduce: empty stack");
    if (drive_layer_index >= stack.size())
        throw ValidationError("laminate_reduce: drive layer index " + std::to_string(drive_layer_index) +
                              " out of range (stack has " + std::to_string(stack.size()) + " layers)");
    if (!stack[drive_layer_index].piezo)
        throw ValidationError("laminate_reduce: drive layer has no piezo tensor");

    for (std::size_t i = 0; i < stack.size(); ++i)
        stack[i].validate("layer " + std::to_string(i));

    // plane-strain-corrected moduli E' = E/(1-nu^2), z from stack bottom
    std::vector<double> eprime(stack.size()), zbot(stack.size()), ztop(stack.size());
    double z = z_origin;
    double mass = 0.0, stiff_sum = 0.0, moment_sum = 0.0;
    for (std::size_t i = 0; i < stack.size(); ++i) {
        auto iso = isotropic_equivalents(stack[i].elastic);
        eprime[i] = iso.youngs_modulus / (1.0 - iso.poisson_ratio * iso.poisson_ratio);
        zbot[i] = z;
        ztop[i] = z + stack[i].thickness;
        z = ztop[i];
        double zc = 0.5 * (zbot[i] + ztop[i]);
        mass += stack[i].density * stack[i].thickness;
        stiff_sum += eprime[i] * stack[i].thickness;
        moment_sum += eprime[i] * stack[i].thickness * zc;
    }
    double zbar = moment_sum / stiff_sum;

    double d = 0.0;
    for (std::size_t i = 0; i < stack.size(); ++i) {
        double zt = ztop[i] - zbar, zb = zbot[i] - zbar;
        d += eprime[i] * (zt * zt * zt - zb * zb * zb) / 3.0;
    }

    LaminateConstants out;
    out.bending_stiffness_D = d;
    out.areal_mass = mass;
    out.neutral_axis_z = zbar;
    out.effective_e31 = effective_e31(stack[drive_layer_index]);
    double zc_drive = 0.5 * (zbot[drive_layer_index] + ztop[drive_layer_index]);
    out.piezo_moment_per_volt = out.effective_e31 * (zc_drive - zbar);

    if (!(out.bending_stiffness_D > 0.0))
        throw ValidationError("laminate_reduce: non-positive bending stiffness");
    return out;
}

MaterialSet builtin_materials() {
    MaterialSet mat;

    mat.substrate.thickness = 500e-6;
    mat.substrate.density = 2330.0;
    {
        auto& c = mat.substrate.elastic.c;
        const double u = 1e11;
        c[0] = {1.65 * u, 0.63 * u, 0.63 * u, 0, 0, 0};
        c[1] = {0.63 * u, 1.65 * u, 0.63 * u, 0, 0, 0};
        c[2] = {0.63 * u, 0.63 * u, 1.65 * u, 0, 0, 0};
        c[3] = {0, 0, 0, 0.79 * u, 0, 0};
        c[4] = {0, 0, 0, 0, 0.79 * u, 0};
        c[5] = {0, 0, 0, 0, 0, 0.79 * u};
    }

    mat.piezo.thickness = 200e-6;
    mat.piezo.density = 2330.0;
    {
        auto& c = mat.piezo.elastic.c;
        const double u = 1e10;
        c[0] = {12.1 * u, 7.54 * u, 7.52 * u, 0, 0, 0};
        c[1] = {7.54 * u, 12.1 * u, 7.52 * u, 0, 0, 0};
        c[2] = {7.52 * u, 7.52 * u, 11.1 * u, 0, 0, 0};
        c[3] = {0, 0, 0, 2.11 * u, 0, 0};
        c[4] = {0, 0, 0, 0, 2.11 * u, 0};
        c[5] = {0, 0, 0, 0, 0, 2.28 * u};
        PiezoTensor p;
        p.e[0] = {0, 0, 0, 0, 12.3, 0};
        p.e[1] = {0, 0, 0, 12.3, 0, 0};
        p.e[2] = {-5.4, -5.4, 15.8, 0, 0, 0};
        mat.piezo.piezo = p;
    }
    return mat;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t expect, int line,
                                  const std::string& key) {
    std::istringstream in(text);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw ValidationError("material file line " + std::to_string(line) + ": key '" + key +
                                  "': bad number '" + tok + "'");
        }
        if (pos != tok.size())
            throw ValidationError("material file line " + std::to_string(line) + ": key '" + key +
                                  "': bad number '" + tok + "'");
        out.push_back(v);
    }
    if (out.size() != expect)
        throw ValidationError("material file line " + std::to_string(line) + ": key '" + key + "' needs " +
                              std::to_string(expect) + " numbers, got " + std::to_string(out.size()));
    return out;
}

} // namespace

MaterialSet load_material_overrides(const std::string& path, MaterialSet base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("material file not found: " + path);

    IssueList issues;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
        s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
        if (s.empty()) continue;

        auto eq = s.find('=');
        if (eq == std::string::npos) {
            issues.add("material file line " + std::to_string(line) + ": expected 'key = value'");
            continue;
        }
        std::string key = s.substr(0, eq), val = s.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));

        Layer* layer = nullptr;
        std::string field = key;
        if (key.rfind("glass.", 0) == 0) {
            layer = &base.substrate;
            field = key.substr(6);
        } else if (key.rfind("pzt.", 0) == 0) {
            layer = &base.piezo;
            field = key.substr(4);
        } else {
            issues.add("material file line " + std::to_string(line) + ": unknown key '" + key +
                       "' (expected glass.* or pzt.*)");
            continue;
        }

        try {
            if (field == "thickness_m") {
                layer->thickness = parse_numbers(val, 1, line, key)[0];
            } else if (field == "density_kgm3") {
                layer->density = parse_numbers(val, 1, line, key)[0];
            } else if (field == "c_voigt") {
                auto nums = parse_numbers(val, 36, line, key);
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) layer->elastic.c[i][j] = nums[i * 6 + j];
            } else if (field == "e_matrix") {
                auto nums = parse_numbers(val, 18, line, key);
                PiezoTensor p;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 6; ++j) p.e[i][j] = nums[i * 6 + j];
                layer->piezo = p;
            } else {
                issues.add("material file line " + std::to_string(line) + ": unknown key '" + key + "'");
            }
        } catch (const ValidationError& e) {
            issues.add(e.what());
        }
    }
    issues.throw_if_any();

    base.substrate.validate("glass layer (" + path + ")");
    base.piezo.validate("pzt layer (" + path + ")");
    if (!base.piezo.piezo)
        throw ValidationError("material file " + path + ": pzt layer lost its piezo tensor");
    return base;
}

} // namespace micropump::materials
