#pragma once

// Class membership certificates for V_(0,b] and V_[a,b].
//
// V_(0,b]: (0, b] in the resolvent set and ||R(t, A)|| <= M_A / t there. The
// certificate samples the envelope t ||R(t, A)|| on a log grid down to 1e-8 b,
// refines the maximizer by golden-section search and inflates by 1 + 1e-6.
//
// V_[a,b]: [a, b] in the resolvent set; m_A = max ||R(t, A)|| over [a, b] and
// delta_A = 1 / m_A, the size of perturbations that keep A in the class.

#include "opcalc/matrixcore.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opcalc {

enum class CertificateKind { V0b, Vab };

struct OperatorCertificate {
    CertificateKind kind = CertificateKind::V0b;
    std::string matrix_id;
    double a = 0.0;  // 0 for V0b (interval (0, b])
    double b = 1.0;
    double M_A = 0.0;                  // V0b only
    double m_A = 0.0;                  // Vab only
    double delta_A = 0.0;              // Vab only, == 1 / m_A
    double argmax_t = 0.0;             // where the envelope / resolvent norm peaks
    std::vector<double> grid;          // sample points used before refinement
    double margin = 0.0;               // smallest reciprocal condition of tI - A seen on the grid
    double spectral_distance = 0.0;    // distance from sigma(A) to the interval
    bool rising_at_cutoff = false;     // V0b: envelope still increasing toward the lower cutoff
    std::size_t dim = 0;

    /// True when [lo, hi] is inside the certified interval.
    bool covers(double lo, double hi) const;
};

inline constexpr std::size_t kDefaultCertificateGrid = 200;

/// Throws NotInClass naming an eigenvalue in (0, b].
OperatorCertificate certify_V0b(const Matrix& A, double b, std::size_t grid_size = kDefaultCertificateGrid,
                                std::string matrix_id = {});

/// Throws NotInClass naming an eigenvalue in [a, b].
OperatorCertificate certify_Vab(const Matrix& A, double a, double b, std::size_t grid_size = kDefaultCertificateGrid,
                                std::string matrix_id = {});

/// delta_A of a V_[a,b] certificate: every Delta with ||Delta|| < delta_A keeps A + Delta in V_[a,b].
double perturbation_budget(const OperatorCertificate& cert);

/// Distance from the spectrum of A to the real interval [lo, hi].
double spectrum_distance(const Matrix& A, double lo, double hi);

/// T^{-1} + I for an invertible (Ritt) operator T; lies in V_(0,1].
Matrix ritt_inverse_plus_identity(const Matrix& T);

}  // namespace opcalc
