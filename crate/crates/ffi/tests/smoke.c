#include <math.h>
#include <stdio.h>
#include <string.h>

#include "schatten_geo.h"

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    sg_last_error());                                      \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    double zre[4] = {0.0, 0.3, -0.3, 0.0};
    double zim[4] = {0.5, 0.1, 0.1, -0.2};
    SgMatrix *z = NULL, *u = NULL, *back = NULL, *a = NULL, *x1 = NULL, *v = NULL;
    SgOrbit *orbit = NULL;

    CHECK(sg_matrix_new(2, zre, zim, &z) == SG_STATUS_OK);
    CHECK(sg_matrix_dim(z) == 2);
    CHECK(sg_exp_skew(z, &u) == SG_STATUS_OK);
    CHECK(sg_unitary_log(u, &back) == SG_STATUS_OK);
    double re[4], im[4];
    CHECK(sg_matrix_copy_entries(back, re, im, 4) == SG_STATUS_OK);
    for (int k = 0; k < 4; k++) {
        CHECK(fabs(re[k] - zre[k]) < 1e-12 && fabs(im[k] - zim[k]) < 1e-12);
    }

    double norm = 0.0;
    CHECK(sg_schatten_norm(z, 3, &norm) == SG_STATUS_INVALID_INPUT);
    CHECK(strlen(sg_last_error()) > 0);
    CHECK(sg_schatten_norm(z, 0, &norm) == SG_STATUS_OK && norm > 0.0);

    double are[4] = {0.0, 0.0, 0.0, 1.0};
    CHECK(sg_matrix_new(2, are, NULL, &a) == SG_STATUS_OK);
    CHECK(sg_orbit_new(a, 4, -1.0, &orbit) == SG_STATUS_OK);
    /* x1 = u a u* with u = exp(0.3 (e12 - e21)) */
    double wre[4] = {0.0, 0.3, -0.3, 0.0};
    SgMatrix *w = NULL;
    CHECK(sg_matrix_new(2, wre, NULL, &w) == SG_STATUS_OK);
    CHECK(sg_exp_skew(w, &v) == SG_STATUS_OK);
    double vre[4];
    CHECK(sg_matrix_copy_entries(v, vre, NULL, 4) == SG_STATUS_OK);
    double xre[4] = {vre[1] * vre[1], vre[1] * vre[3], vre[3] * vre[1], vre[3] * vre[3]};
    CHECK(sg_matrix_new(2, xre, NULL, &x1) == SG_STATUS_OK);
    SgGeodesicInfo info;
    SgMatrix *vel = NULL;
    CHECK(sg_endpoint_geodesic(orbit, a, x1, &vel, &info) == SG_STATUS_OK);
    CHECK(fabs(info.length - 0.3 * pow(2.0, 0.25)) < 1e-8);
    CHECK(info.certified == 1);

    CHECK(sg_matrix_dim(NULL) == 0);
    CHECK(sg_exp_skew(NULL, &u) == SG_STATUS_NULL_POINTER);
    printf("ok %s\n", sg_version());

    sg_matrix_free(vel);
    sg_matrix_free(w);
    sg_matrix_free(v);
    sg_matrix_free(x1);
    sg_orbit_free(orbit);
    sg_matrix_free(a);
    sg_matrix_free(back);
    sg_matrix_free(u);
    sg_matrix_free(z);
    return 0;
}
