#include <math.h>
#include <stdio.h>
#include <string.h>

#include "polarlab.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,    \
                    #cond, polar_last_error());                        \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    double v = 0.0;
    CHECK(polar_hilbert_polarization(2, POLAR_FIELD_REAL, &v) == POLAR_STATUS_OK);
    CHECK(v == 2.0);
    CHECK(polar_dual_exponent(0.5, &v) == POLAR_STATUS_INVALID_EXPONENT);
    CHECK(strlen(polar_last_error()) > 0);

    const double rows[4] = {1.0, 0.0, 0.0, 1.0};
    PolarFunctionalSystem *sys = NULL;
    CHECK(polar_system_new(2.0, 2, POLAR_FIELD_COMPLEX, 2, rows, NULL, &sys) == POLAR_STATUS_OK);
    double w_re[2], w_im[2];
    CHECK(polar_system_sup_norm(sys, 16, 1, &v, w_re, w_im) == POLAR_STATUS_OK);
    CHECK(fabs(v - 0.5) < 1e-8);
    polar_system_free(sys);

    const int8_t signs[4] = {1, 1, 1, -1};
    PolarSignMatrix *m = NULL;
    CHECK(polar_sign_matrix_new(2, 2, signs, &m) == POLAR_STATUS_OK);
    double cert = 0.0;
    bool heuristic = true;
    CHECK(polar_sign_matrix_sup_norm(m, 0, true, &v, &cert, &heuristic) == POLAR_STATUS_OK);
    CHECK(fabs(v - 2.0) < 1e-9 && cert >= v && cert <= 2.0 * v && !heuristic);
    polar_sign_matrix_free(m);

    printf("ok %s\n", polar_version());
    return 0;
}
