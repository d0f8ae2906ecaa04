#include "cool/corpus.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cool/printer.hpp"
#include "cool/rng.hpp"
#include "cool/source.hpp"

namespace cool {

namespace {

std::string num(double v) { return format_number(v); }

const char* kLinearClass = R"(class: Linear Drill{
    expr:@(1,0){#a+#b}{
        return:b+a;
    }
    expr:@(1,0){#a*#b}{
        return:b*a;
    }
    expr:@(1,0){#a-b}{
        return:a+(-b);
    }
    @(0,2){a+$x==b}{
        x=b-a;
    }
    @(0,2){a*$x==b}{
        x=b/a;
    }
    @(0,2){a+$x+c==b}{
        x=b-a-c;
    }
}
)";

CorpusFile linear_file(int index, Rng& rng) {
    double c1 = rng.range(2, 30);
    double c2 = rng.range(2, 30);
    double c3 = rng.range(2, 30);
    int shape = rng.range(0, 5);
    std::string query;
    double expected = 0.0;
    switch (shape) {
        case 0: query = num(c1) + "+$x==" + num(c2); expected = c2 - c1; break;
        case 1: query = "$x+" + num(c1) + "==" + num(c2); expected = c2 - c1; break;
        case 2: query = num(c1) + "*$x==" + num(c2); expected = c2 / c1; break;
        case 3: query = "$x*" + num(c1) + "==" + num(c2); expected = c2 / c1; break;
        case 4:
            query = num(c1) + "+$x-" + num(c2) + "==" + num(c3);
            expected = c3 - c1 + c2;
            break;
        default:
            query = "$x+" + num(c1) + "-" + num(c2) + "==" + num(c3);
            expected = c3 - c1 + c2;
            break;
    }
    CorpusFile f;
    f.name = "linear_" + std::to_string(index) + ".cool";
    f.source = std::string(kLinearClass) +
               "class: Drill Main << Linear Drill{\n    new:x=0;\n    " + query +
               ";\n}\nDrill Main:m;\nm.x-->screen;\n";
    f.expected = expected;
    return f;
}

const char* kLogClass = R"(class: Log Laws{
    expr:@(1,0){ln(#a*#b)}{
        return:ln(a)+ln(b);
    }
    expr:@(1,0){$a+b}{
        return:b+a;
    }
    @(0,2){a+ln($x)==b}{
        x=2.718281828459045^(b-a);
    }
    @(0,2){ln($x)==b}{
        x=2.718281828459045^b;
    }
}
)";

CorpusFile loglaw_file(int index, Rng& rng) {
    double c1 = rng.range(2, 9);
    double c2 = rng.range(2, 6);
    int shape = rng.range(0, 2);
    std::string query;
    double expected;
    if (shape == 0) {
        query = "ln(" + num(c1) + "*$x)==" + num(c2);
        expected = std::exp(c2) / c1;
    } else if (shape == 1) {
        query = "ln($x*" + num(c1) + ")==" + num(c2);
        expected = std::exp(c2) / c1;
    } else {
        query = "ln($x)==" + num(c2);
        expected = std::exp(c2);
    }
    CorpusFile f;
    f.name = "loglaw_" + std::to_string(index) + ".cool";
    f.source = std::string(kLogClass) +
               "class: Log Main << Log Laws{\n    new:x=0;\n    " + query +
               ";\n}\nLog Main:m;\nm.x-->screen;\n";
    f.expected = expected;
    return f;
}

const char* kQuadraticClass = R"(class: Quadratic Drill{
    expr:@(-2,0,0){$a==b}{
        return:a-b==0;
    }
    expr:@(0,1,0){#a-b}{
        return:a+(-b);
    }
    @(0,0,2){a*$x^2+b*x+c==0}{
        x=(-b+(b^2-4*a*c)^0.5)/(2*a);
    }
}
)";

CorpusFile quadratic_file(int index, Rng& rng) {
    double a = rng.range(1, 4);
    double b = rng.range(1, 9);
    double c = rng.range(5, 120);
    int shape = rng.range(0, 1);
    std::string query;
    // positive branch of (-b + sqrt(b^2 + 4ac)) / 2a
    double expected = (-b + std::sqrt(b * b + 4.0 * a * c)) / (2.0 * a);
    if (shape == 0) {
        query = num(a) + "*$x^2+" + num(b) + "*x==" + num(c);
    } else {
        query = num(a) + "*$x^2+" + num(b) + "*x+(0-" + num(c) + ")==0";
    }
    CorpusFile f;
    f.name = "quadratic_" + std::to_string(index) + ".cool";
    f.source = std::string(kQuadraticClass) +
               "class: Quadratic Main << Quadratic Drill{\n    new:x=1;\n    " + query +
               ";\n}\nQuadratic Main:m;\nm.x-->screen;\n";
    f.expected = expected;
    return f;
}

const char* kProjectileClass = R"(class: Projectile Drill{
    @projectile distance with speed (v0) and angle (t){
        v0y=v0*sin(t);
        tf=2*v0y/g;
        return:v0y*tf;
    }=>@speed ($v0) at angle (t) given distance;
}
)";

CorpusFile projectile_file(int index, Rng& rng) {
    double angle = 0.3 + 0.1 * double(rng.range(0, 9));
    double dist = double(rng.range(100, 2000));
    double g = 9.8;
    double s = std::sin(angle);
    double expected = std::sqrt(dist * g / (2.0 * s * s));
    CorpusFile f;
    f.name = "projectile_" + std::to_string(index) + ".cool";
    f.source = "new:g=9.8;\n" + std::string(kProjectileClass) +
               "class: Projectile Main << Projectile Drill{\n    new:v=0;\n    speed ($v) at "
               "angle (" +
               num(angle) + ") given distance == " + num(dist) +
               ";\n}\nProjectile Main:m;\nm.v-->screen;\n";
    f.expected = expected;
    return f;
}

} // namespace

std::vector<CorpusFile> generate_corpus(const std::string& family, int count, uint64_t seed) {
    Rng rng(seed);
    std::vector<CorpusFile> out;
    for (int k = 0; k < count; ++k) {
        if (family == "linear") {
            out.push_back(linear_file(k, rng));
        } else if (family == "loglaw") {
            out.push_back(loglaw_file(k, rng));
        } else if (family == "quadratic") {
            out.push_back(quadratic_file(k, rng));
        } else if (family == "projectile") {
            out.push_back(projectile_file(k, rng));
        } else if (family == "mixed") {
            switch (k % 4) {
                case 0: out.push_back(linear_file(k, rng)); break;
                case 1: out.push_back(loglaw_file(k, rng)); break;
                case 2: out.push_back(quadratic_file(k, rng)); break;
                default: out.push_back(projectile_file(k, rng)); break;
            }
        } else {
            throw CoolError("unknown corpus family '" + family + "'");
        }
    }
    return out;
}

void write_corpus(const std::string& dir, const std::string& family, int count, uint64_t seed) {
    std::filesystem::create_directories(dir);
    for (const auto& f : generate_corpus(family, count, seed)) {
        std::ofstream out(dir + "/" + f.name, std::ios::trunc);
        if (!out) throw CoolError("cannot write corpus file " + f.name);
        out << f.source;
    }
}

} // namespace cool
