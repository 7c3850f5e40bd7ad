#include <stdio.h>
#include <string.h>
#include "lacunary.h"

int main(void) {
    LacField *field = NULL;
    LacPoly *poly = NULL;
    uint64_t roots[8];
    size_t count = 0;
    uint64_t best = 0;

    if (lac_field_parse("47", &field) != LAC_STATUS_OK) return 1;
    if (lac_poly_parse(field, "x^22+22x^2+24", &poly) != LAC_STATUS_OK) return 2;
    if (lac_poly_roots(poly, roots, 8, &count) != LAC_STATUS_OK || count != 6) return 3;
    if (lac_best_bound(poly, 2, &best) != LAC_STATUS_OK || best != 6) return 4;
    if (lac_poly_parse(field, "x^", &poly) != LAC_STATUS_PARSE_ERROR) return 5;
    if (strlen(lac_last_error_message()) == 0) return 6;

    for (size_t i = 0; i < count; i++) printf("%llu ", (unsigned long long)roots[i]);
    printf("\n");
    lac_poly_free(poly);
    lac_field_free(field);
    return 0;
}
