#include <stdio.h>
#include "apsign.h"

int main(void) {
    ApPattern *p = NULL;
    if (ap_pattern_parse("0 + 0\n0 0 +\n+ 0 0\n", &p) != AP_STATUS_OK) return 1;
    ApCheckReport rep;
    if (ap_pattern_check(p, &rep) != AP_STATUS_OK || !rep.hypothesis) return 2;
    ApRealization *r = NULL;
    if (ap_realize(p, &r) != AP_STATUS_OK) return 3;
    double m[9], lam = 0.0;
    if (ap_realization_matrix(r, m, 9) != AP_STATUS_OK) return 4;
    if (ap_verify(m, 3, &lam, NULL, NULL) != AP_STATUS_OK) return 5;
    char *json = ap_realization_json(r);
    if (!json) return 6;
    printf("lambda=%.6f\n", lam);
    ap_string_free(json);
    ap_realization_free(r);
    ap_pattern_free(p);
    if (ap_pattern_parse("?", &p) != AP_STATUS_PARSE_ERROR || !ap_last_error()) return 7;
    return 0;
}
