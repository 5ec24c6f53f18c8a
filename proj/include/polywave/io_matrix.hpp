#pragma once

#include "polywave/assembly.hpp"

#include <fstream>
#include <iomanip>
#include <string>

namespace polywave {

// Matrix Market coordinate format (1-based indices).
inline void write_matrix_market(const SparseMat& A, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open matrix file: " + path);
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    os << std::setprecision(17);
    for (int col = 0; col < A.outerSize(); ++col)
        for (SparseMat::InnerIterator it(A, col); it; ++it)
            os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

inline void dump_system(const GlobalSystem& sys, const std::string& dir)
{
    write_matrix_market(sys.M, dir + "/M.mtx");
    write_matrix_market(sys.N, dir + "/N.mtx");
    write_matrix_market(sys.B, dir + "/B.mtx");
    write_matrix_market(sys.R, dir + "/R.mtx");
}

} // namespace polywave
